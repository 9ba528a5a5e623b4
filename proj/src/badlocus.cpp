#include "quotver/badlocus.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace qv {

namespace {

long long md(long long a, long long p) { return ((a % p) + p) % p; }

// Conway polynomials, coefficients from x^0 up to the leading 1.
const std::map<std::pair<long long, int>, std::vector<long long>>& conway_table() {
    static const std::map<std::pair<long long, int>, std::vector<long long>> t = {
        {{2, 1}, {1, 1}},          {{2, 2}, {1, 1, 1}},       {{2, 3}, {1, 1, 0, 1}},    {{2, 4}, {1, 1, 0, 0, 1}},
        {{3, 1}, {1, 1}},          {{3, 2}, {2, 2, 1}},       {{3, 3}, {1, 2, 0, 1}},    {{3, 4}, {2, 0, 0, 2, 1}},
        {{5, 1}, {3, 1}},          {{5, 2}, {2, 4, 1}},       {{5, 3}, {3, 3, 0, 1}},    {{5, 4}, {2, 4, 4, 0, 1}},
        {{7, 1}, {4, 1}},          {{7, 2}, {3, 6, 1}},       {{7, 3}, {4, 0, 6, 1}},    {{7, 4}, {3, 4, 5, 0, 1}},
    };
    return t;
}

// exp table of x modulo `mod`; empty if x is not primitive.
std::vector<std::int64_t> powers_of_x(long long p, int k, const std::vector<long long>& mod, std::int64_t q) {
    std::vector<long long> cur(static_cast<std::size_t>(k), 0);
    cur[0] = 1;
    std::vector<std::int64_t> exps;
    exps.reserve(static_cast<std::size_t>(q - 1));
    auto encode = [&](const std::vector<long long>& v) {
        std::int64_t e = 0;
        for (int i = k - 1; i >= 0; --i) e = e * p + v[static_cast<std::size_t>(i)];
        return e;
    };
    for (std::int64_t i = 0; i < q - 1; ++i) {
        std::int64_t e = encode(cur);
        if (i > 0 && e == 1) return {};
        exps.push_back(e);
        // multiply by x
        long long top = cur[static_cast<std::size_t>(k - 1)];
        for (int j = k - 1; j > 0; --j) cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)];
        cur[0] = 0;
        for (int j = 0; j < k; ++j) cur[static_cast<std::size_t>(j)] = md(cur[static_cast<std::size_t>(j)] - top * mod[static_cast<std::size_t>(j)], p);
    }
    if (encode(cur) != 1) return {};
    return exps;
}

}  // namespace

GaloisField::GaloisField(long long p, int k) : p_(p), k_(k) {
    if (k < 1) throw std::invalid_argument("field degree must be positive");
    q_ = 1;
    for (int i = 0; i < k; ++i) q_ *= p;
    if (q_ > (1LL << 24)) throw std::invalid_argument("field too large to tabulate");
    std::vector<std::int64_t> exps;
    auto it = conway_table().find({p, k});
    if (it != conway_table().end()) {
        exps = powers_of_x(p, k, it->second, q_);
        if (!exps.empty()) {
            modulus_ = it->second;
            from_table_ = true;
        }
    }
    if (exps.empty()) {
        // Search monic polynomials of degree k for a primitive one.
        std::vector<long long> cand(static_cast<std::size_t>(k + 1), 0);
        cand[static_cast<std::size_t>(k)] = 1;
        for (std::int64_t code = 1; code < q_ && exps.empty(); ++code) {
            std::int64_t c = code;
            for (int i = 0; i < k; ++i) {
                cand[static_cast<std::size_t>(i)] = c % p;
                c /= p;
            }
            if (cand[0] == 0) continue;
            exps = powers_of_x(p, k, cand, q_);
            if (!exps.empty()) modulus_ = cand;
        }
        if (exps.empty()) throw std::logic_error("no primitive polynomial found");
    }
    exp_ = exps;
    log_.assign(static_cast<std::size_t>(q_), -1);
    for (std::size_t i = 0; i < exp_.size(); ++i) log_[static_cast<std::size_t>(exp_[i])] = static_cast<std::int64_t>(i);
}

std::int64_t GaloisField::add(std::int64_t a, std::int64_t b) const {
    std::int64_t r = 0, place = 1;
    for (int i = 0; i < k_; ++i) {
        r += ((a % p_ + b % p_) % p_) * place;
        a /= p_;
        b /= p_;
        place *= p_;
    }
    return r;
}

std::int64_t GaloisField::mul(std::int64_t a, std::int64_t b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[static_cast<std::size_t>((log_[static_cast<std::size_t>(a)] + log_[static_cast<std::size_t>(b)]) % (q_ - 1))];
}

std::int64_t GaloisField::from_int(long long c) const { return md(c, p_); }

std::int64_t ModPoly::eval(const GaloisField& f, const std::vector<std::int64_t>& x) const {
    std::int64_t acc = 0;
    for (const auto& [c, e] : terms) {
        std::int64_t t = f.from_int(c);
        for (std::size_t i = 0; i < e.size() && t; ++i)
            for (int j = 0; j < e[i]; ++j) t = f.mul(t, x[i]);
        if (t) acc = f.add(acc, t);
    }
    return acc;
}

bool BadComponent::is_point() const {
    return std::all_of(coords.begin(), coords.end(), [](const auto& c) { return c.has_value(); });
}

bool BadComponent::contains(const std::vector<long long>& pt, long long p) const {
    for (std::size_t i = 0; i < coords.size(); ++i)
        if (coords[i] && md(*coords[i], p) != md(pt[i], p)) return false;
    return true;
}

int scan_degree_from_env(int fallback) {
    if (const char* s = std::getenv("QUOTVER_MAX_SCAN_DEGREE")) {
        int k = std::atoi(s);
        if (k >= 1) return std::min(k, fallback);
    }
    return fallback;
}

namespace {

ModPoly to_modpoly(const Poly& f, long long p, int n) {
    ModPoly m;
    m.p = p;
    for (const auto& t : f.terms()) {
        long long c = t.c.mod(p);
        if (!c) continue;
        std::vector<int> e(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) e[static_cast<std::size_t>(i)] = t.m.exp(i);
        m.terms.push_back({c, e});
    }
    return m;
}

Poly modp(const Poly& f, long long p) {
    return f.map_coeffs([p](const Coef& c) { return Coef(c.mod(p)); });
}

struct System {
    std::vector<Poly> num;  // must vanish
    std::vector<Poly> den;  // must not vanish
};

// Univariate coefficient list of f in variable v (f must not involve other free variables).
std::vector<long long> univariate(const Poly& f, int v, long long p) {
    std::vector<long long> c(static_cast<std::size_t>(f.degree_in(v) + 1), 0);
    for (const auto& t : f.terms()) c[static_cast<std::size_t>(t.m.exp(v))] = md(c[static_cast<std::size_t>(t.m.exp(v))] + t.c.mod(p), p);
    return c;
}

// Roots in F_p with multiplicities; returns true iff they account for the degree.
bool split_roots(std::vector<long long> c, long long p, std::vector<long long>* roots) {
    while (!c.empty() && c.back() == 0) c.pop_back();
    int deg = static_cast<int>(c.size()) - 1;
    int found = 0;
    for (long long r = 0; r < p; ++r) {
        bool any = false;
        while (c.size() > 1) {
            // synthetic division by (x - r)
            std::vector<long long> q(c.size() - 1);
            long long carry = 0;
            for (std::size_t i = c.size(); i-- > 0;) {
                long long v = md(c[i] + carry, p);
                if (i == 0) {
                    carry = v;
                    break;
                }
                q[i - 1] = v;
                carry = md(v * r, p);
            }
            if (carry != 0) break;
            c = q;
            ++found;
            any = true;
        }
        if (any) roots->push_back(r);
    }
    return found == deg;
}

class Certifier {
public:
    Certifier(const System& s, const std::vector<BadComponent>& comps, long long p, int n)
        : sys_(s), comps_(comps), p_(p), n_(n) {}

    bool run(std::vector<std::optional<long long>> assigned, std::string* log) {
        std::vector<Poly> num, den;
        for (const auto& f : sys_.num) num.push_back(apply(f, assigned));
        for (const auto& f : sys_.den) den.push_back(apply(f, assigned));
        return step(num, den, assigned, log);
    }

private:
    Poly apply(const Poly& f, const std::vector<std::optional<long long>>& a) const {
        Poly g = f;
        for (int v = 0; v < n_; ++v)
            if (a[static_cast<std::size_t>(v)]) g = g.restrict(v, Coef(*a[static_cast<std::size_t>(v)]));
        return modp(g, p_);
    }

    bool covered(const std::vector<std::optional<long long>>& a) const {
        for (const auto& c : comps_) {
            bool ok = true;
            for (int v = 0; v < n_ && ok; ++v) {
                const auto& want = c.coords[static_cast<std::size_t>(v)];
                const auto& have = a[static_cast<std::size_t>(v)];
                if (want && (!have || md(*want, p_) != md(*have, p_))) ok = false;
            }
            if (ok) return true;
        }
        return false;
    }

    bool step(std::vector<Poly> num, std::vector<Poly> den, const std::vector<std::optional<long long>>& a, std::string* log) {
        num.erase(std::remove_if(num.begin(), num.end(), [](const Poly& f) { return f.is_zero(); }), num.end());
        for (const auto& f : num)
            if (f.is_constant()) return true;  // nonzero constant: no solutions
        // A denominator vanishing identically here removes the piece from the chart.
        for (const auto& d : den)
            if (d.is_zero()) return true;
        if (num.empty()) {
            if (covered(a)) {
                *log += describe(a) + " declared; ";
                return true;
            }
            *log += describe(a) + " undeclared; ";
            return false;
        }
        for (const auto& f : num) {
            int var = -1;
            bool uni = true;
            for (int v = 0; v < n_ && uni; ++v)
                if (!a[static_cast<std::size_t>(v)] && f.degree_in(v) > 0) {
                    if (var >= 0) uni = false;
                    var = v;
                }
            if (!uni || var < 0) continue;
            std::vector<long long> roots;
            if (!split_roots(univariate(f, var, p_), p_, &roots)) continue;
            bool all = true;
            for (long long r : roots) {
                auto b = a;
                b[static_cast<std::size_t>(var)] = r;
                std::vector<Poly> n2, d2;
                for (const auto& g : num) n2.push_back(modp(g.restrict(var, Coef(r)), p_));
                for (const auto& g : den) d2.push_back(modp(g.restrict(var, Coef(r)), p_));
                if (!step(n2, d2, b, log)) all = false;
            }
            return all;
        }
        *log += "no split univariate equation at " + describe(a) + "; ";
        return false;
    }

    std::string describe(const std::vector<std::optional<long long>>& a) const {
        std::string s = "(";
        for (int v = 0; v < n_; ++v) s += (v ? "," : "") + (a[static_cast<std::size_t>(v)] ? std::to_string(*a[static_cast<std::size_t>(v)]) : std::string("*"));
        return s + ")";
    }

    const System& sys_;
    const std::vector<BadComponent>& comps_;
    long long p_;
    int n_;
};

std::string point_str(const std::vector<long long>& pt) {
    std::string s = "(";
    for (std::size_t i = 0; i < pt.size(); ++i) s += (i ? "," : "") + std::to_string(pt[i]);
    return s + ")";
}

}  // namespace

BadLocusReport certify_bad_locus(const Action& a, const BadLocusClaim& c, int max_scan_degree) {
    const RingPtr& ring = a.ring();
    const long long p = ring->p();
    const int n = ring->nvars();
    BadLocusReport rep;
    rep.scan_degree = max_scan_degree;
    if (static_cast<int>(c.cartier.size()) != n) throw std::invalid_argument("Cartier part needs one exponent per coordinate");

    // Cofactors of the fixed scheme generators.
    std::vector<Frac> cof;
    for (int i = 0; i < n; ++i) {
        try {
            cof.push_back(a.I_coord(i).local_divide_monomial(c.cartier));
        } catch (const DivisionError& e) {
            rep.problems.push_back("Cartier part does not divide I(" + ring->names()[static_cast<std::size_t>(i)] + "): " + e.what());
            return rep;
        }
    }
    std::vector<int> support = c.support;
    if (support.empty())
        for (int v = 0; v < n; ++v)
            if (c.cartier[static_cast<std::size_t>(v)] > 0) support.push_back(v);
    if (support.empty()) {
        // No exceptional divisor: the fixed locus itself is scanned.
        support.push_back(-1);
    }

    std::vector<std::pair<int, System>> systems;
    for (int t : support) {
        System sys;
        for (const auto& q : cof) {
            if (q.is_zero()) continue;
            if (ring->mixed() && q.scalar().valuation(p) > 0 && t >= 0 && ring->p_valuation(t) > 0) continue;
            if (ring->mixed() && q.scalar().valuation(p) < 0) {
                rep.problems.push_back("cofactor with p in the denominator: " + q.str());
                return rep;
            }
            Poly numer(Coef(q.scalar().mod(p)));
            for (const auto& f : q.factors()) {
                Poly g = t >= 0 ? f.poly.at_zero(t) : f.poly;
                g = modp(g, p);
                if (f.exp > 0) {
                    for (int k = 0; k < f.exp; ++k) numer = modp(numer * g, p);
                } else {
                    if (g.is_zero()) {
                        rep.problems.push_back("cofactor has a pole along the divisor: " + q.str());
                        return rep;
                    }
                    sys.den.push_back(g);
                }
            }
            sys.num.push_back(numer);
        }
        systems.push_back({t, sys});
    }

    auto solves = [&](const System& s, const std::vector<long long>& pt) {
        for (const auto& f : s.num)
            if (f.eval_mod(pt, p) != 0) return false;
        return true;
    };
    auto excluded = [&](const System& s, const std::vector<long long>& pt) {
        for (const auto& f : s.den)
            if (f.eval_mod(pt, p) == 0) return true;
        return false;
    };

    // (a) containment
    rep.containment = true;
    for (const auto& comp : c.components) {
        bool ok = false;
        for (const auto& [t, sys] : systems) {
            if (t >= 0 && (!comp.coords[static_cast<std::size_t>(t)] || md(*comp.coords[static_cast<std::size_t>(t)], p) != 0)) continue;
            if (comp.is_point()) {
                std::vector<long long> pt;
                for (const auto& x : comp.coords) pt.push_back(*x);
                if (solves(sys, pt) && !excluded(sys, pt)) ok = true;
            } else {
                bool all = true;
                for (const auto& f : sys.num) {
                    Poly g = f;
                    for (int v = 0; v < n; ++v)
                        if (comp.coords[static_cast<std::size_t>(v)]) g = g.restrict(v, Coef(*comp.coords[static_cast<std::size_t>(v)]));
                    if (!modp(g, p).is_zero()) all = false;
                }
                if (all) ok = true;
            }
        }
        if (!ok) {
            rep.containment = false;
            rep.problems.push_back("declared component " + comp.label + " does not satisfy the cofactor equations");
        }
    }

    // (b) scan over F_{p^k}: the maximal degrees up to K cover every subfield.
    std::vector<int> degrees;
    for (int k = max_scan_degree; k >= 1; --k) {
        bool covered = false;
        for (int d : degrees)
            if (d % k == 0) covered = true;
        if (!covered) degrees.push_back(k);
    }
    rep.complete = true;
    std::set<std::vector<long long>> fp_points;
    std::set<std::string> excluded_pts;
    for (int d : degrees) {
        GaloisField F(p, d);
        for (const auto& [t, sys] : systems) {
            std::vector<ModPoly> num, den;
            for (const auto& f : sys.num) num.push_back(to_modpoly(f, p, n));
            for (const auto& f : sys.den) den.push_back(to_modpoly(f, p, n));
            std::vector<int> free;
            for (int v = 0; v < n; ++v)
                if (v != t) free.push_back(v);
            std::vector<std::int64_t> x(static_cast<std::size_t>(n), 0);
            std::int64_t total = 1;
            for (std::size_t i = 0; i < free.size(); ++i) total *= F.size();
            for (std::int64_t code = 0; code < total; ++code) {
                std::int64_t cc = code;
                bool prime = true;
                for (int v : free) {
                    x[static_cast<std::size_t>(v)] = cc % F.size();
                    cc /= F.size();
                    if (!F.in_prime_field(x[static_cast<std::size_t>(v)])) prime = false;
                }
                // Points over proper subfields were seen at a smaller degree
                // only when that degree is scanned too; F_p points are
                // handled once below.
                bool zero = true;
                for (const auto& f : num)
                    if (f.eval(F, x) != 0) {
                        zero = false;
                        break;
                    }
                if (!zero) continue;
                bool exc = false;
                for (const auto& f : den)
                    if (f.eval(F, x) == 0) exc = true;
                if (prime) {
                    std::vector<long long> pt(x.begin(), x.end());
                    if (exc) {
                        excluded_pts.insert(point_str(pt));
                        continue;
                    }
                    fp_points.insert(pt);
                    continue;
                }
                if (exc) continue;
                // A non-rational solution must lie on a declared curve.
                bool on_curve = false;
                for (const auto& comp : c.components) {
                    if (comp.is_point()) continue;
                    bool ok = true;
                    for (int v = 0; v < n && ok; ++v)
                        if (comp.coords[static_cast<std::size_t>(v)]) {
                            std::int64_t want = F.from_int(*comp.coords[static_cast<std::size_t>(v)]);
                            if (x[static_cast<std::size_t>(v)] != want) ok = false;
                        }
                    if (ok) on_curve = true;
                }
                if (!on_curve && rep.complete) {
                    rep.complete = false;
                    std::ostringstream os;
                    os << "undeclared solution over F_" << p << "^" << d << " (field element codes";
                    for (auto v : x) os << " " << v;
                    os << ")";
                    rep.problems.push_back(os.str());
                }
            }
        }
    }
    for (const auto& pt : fp_points) {
        rep.found_fp.push_back(pt);
        bool ok = false;
        for (const auto& comp : c.components)
            if (comp.contains(pt, p)) ok = true;
        if (!ok) {
            rep.complete = false;
            rep.problems.push_back("undeclared bad point " + point_str(pt));
        }
    }
    rep.excluded.assign(excluded_pts.begin(), excluded_pts.end());

    // (c) exact certification by split triangular elimination.
    bool exact = true;
    std::string log;
    for (const auto& [t, sys] : systems) {
        Certifier cert(sys, c.components, p, n);
        std::vector<std::optional<long long>> a0(static_cast<std::size_t>(n));
        if (t >= 0) a0[static_cast<std::size_t>(t)] = 0;
        if (!cert.run(a0, &log)) exact = false;
    }
    rep.exact = exact && rep.complete;
    rep.certificate = rep.exact ? "exact (split triangular elimination)"
                                : "heuristic (scanned to degree " + std::to_string(max_scan_degree) + ")";
    if (!log.empty()) rep.certificate += ": " + log;
    return rep;
}

}  // namespace qv
