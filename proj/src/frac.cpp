#include "quotver/frac.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace qv {

namespace {

Coef normalize_scalar(const Ring& r, const Coef& c) {
    if (r.mixed()) return c;
    return Coef(c.mod(r.p()));
}

Coef scalar_inverse(const Ring& r, const Coef& c) {
    if (c.is_zero()) throw std::domain_error("division by zero");
    if (r.mixed()) return Coef(1) / c;
    return Coef(mod_inverse(c.mod(r.p()), r.p()));
}

Coef scalar_pow(const Ring& r, const Coef& c, int k) {
    Coef base = k < 0 ? scalar_inverse(r, c) : c;
    unsigned e = static_cast<unsigned>(k < 0 ? -k : k);
    if (!r.mixed()) {
        long long p = r.p(), b = base.mod(p), acc = 1;
        while (e) {
            if (e & 1u) acc = acc * b % p;
            b = b * b % p;
            e >>= 1u;
        }
        return Coef(acc);
    }
    return base.pow(e);
}

long long powmod(long long b, long long e, long long p) {
    long long acc = 1;
    b %= p;
    if (b < 0) b += p;
    while (e > 0) {
        if (e & 1) acc = acc * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return acc;
}

bool is_single_var(const Poly& f, int* which) {
    if (f.size() != 1 || !f.lead().c.is_one() || f.lead().m.deg != 1) return false;
    for (int i = 0; i < Mono::kMaxVars; ++i)
        if (f.lead().m.exp(i) == 1) {
            if (which) *which = i;
            return true;
        }
    return false;
}

// Multiply a list of (poly, exponent >= 0) into one reduced polynomial,
// smallest factors first.
Poly expand_product(const Ring& r, Coef scalar, std::vector<std::pair<const Poly*, int>> parts) {
    std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.first->size() < b.first->size(); });
    Poly acc(scalar);
    for (const auto& [f, e] : parts)
        for (int i = 0; i < e; ++i) acc = r.reduce(acc * *f);
    return r.reduce(acc);
}

}  // namespace

Frac::Frac(RingPtr ring) : ring_(std::move(ring)), scalar_(0) {}

Frac Frac::constant(RingPtr ring, const Coef& c) {
    Frac f(ring);
    f.scalar_ = normalize_scalar(*ring, c);
    return f;
}

Frac Frac::from_poly(RingPtr ring, const Poly& p) {
    Frac f(ring);
    f.scalar_ = Coef(1);
    f.absorb(p, 1);
    f.canonicalize();
    return f;
}

Frac Frac::var(RingPtr ring, int i) {
    Frac f(ring);
    f.scalar_ = Coef(1);
    f.factors_.push_back({Poly::var(i), 1});
    return f;
}

void Frac::add_factor(Poly f, int e) {
    if (e != 0) factors_.push_back({std::move(f), e});
}

void Frac::absorb(const Poly& f_in, int e) {
    if (e == 0 || scalar_.is_zero()) return;
    const Ring& r = *ring_;
    Poly g = r.reduce(f_in);
    if (g.is_zero()) {
        if (e < 0) throw std::domain_error("division by zero");
        scalar_ = Coef(0);
        factors_.clear();
        return;
    }
    std::vector<int> coord(static_cast<std::size_t>(r.nvars()), 0);
    while (true) {
        bool changed = false;
        for (int v = 0; v < r.nvars(); ++v) {
            int k = g.min_exp(v);
            if (k > 0) {
                g = g.div_monomial(Mono::var(v, static_cast<unsigned>(k)));
                coord[static_cast<std::size_t>(v)] += k;
                changed = true;
            }
        }
        if (g.is_constant()) break;
        if (r.mixed()) {
            for (int v = 0; v < r.nvars(); ++v) {
                while (!g.is_constant()) {
                    auto q = r.divide_var(g, v);
                    if (!q) break;
                    g = std::move(*q);
                    ++coord[static_cast<std::size_t>(v)];
                    changed = true;
                }
            }
        }
        if (!changed || g.is_constant()) break;
    }
    for (int v = 0; v < r.nvars(); ++v)
        if (coord[static_cast<std::size_t>(v)]) add_factor(Poly::var(v), coord[static_cast<std::size_t>(v)] * e);
    if (g.is_constant()) {
        scalar_ = normalize_scalar(r, scalar_ * scalar_pow(r, g.constant_term(), e));
        return;
    }
    Coef content;
    if (!r.mixed()) {
        content = g.lead().c;
        g = r.reduce(g.scaled(Coef(mod_inverse(content.mod(r.p()), r.p()))));
    } else {
        mpz_class num_gcd = 0, den_lcm = 1;
        for (const auto& t : g.terms()) {
            mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), t.c.num().get_mpz_t());
            mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), t.c.den().get_mpz_t());
        }
        mpq_class c(num_gcd, den_lcm);
        if (g.lead().c.sign() < 0) c = -c;
        content = Coef(c);
        g = g.scaled(Coef(1) / content);
    }
    scalar_ = normalize_scalar(r, scalar_ * scalar_pow(r, content, e));
    add_factor(std::move(g), e);
}

void Frac::canonicalize() {
    if (scalar_.is_zero()) {
        factors_.clear();
        return;
    }
    std::sort(factors_.begin(), factors_.end(), [](const Factor& a, const Factor& b) { return compare(a.poly, b.poly) < 0; });
    std::vector<Factor> out;
    for (auto& f : factors_) {
        if (!out.empty() && out.back().poly == f.poly) {
            out.back().exp += f.exp;
        } else {
            out.push_back(std::move(f));
        }
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const Factor& f) { return f.exp == 0; }), out.end());
    factors_ = std::move(out);
}

Poly Frac::numerator() const {
    std::vector<std::pair<const Poly*, int>> parts;
    for (const auto& f : factors_)
        if (f.exp > 0) parts.push_back({&f.poly, f.exp});
    return expand_product(*ring_, scalar_, parts);
}

Poly Frac::denominator() const {
    std::vector<std::pair<const Poly*, int>> parts;
    for (const auto& f : factors_)
        if (f.exp < 0) parts.push_back({&f.poly, -f.exp});
    return expand_product(*ring_, Coef(1), parts);
}

Frac Frac::operator-() const {
    Frac r = *this;
    r.scalar_ = normalize_scalar(*ring_, -scalar_);
    return r;
}

Frac Frac::inverse() const {
    if (is_zero()) throw std::domain_error("division by zero");
    Frac r = *this;
    r.scalar_ = scalar_inverse(*ring_, scalar_);
    for (auto& f : r.factors_) f.exp = -f.exp;
    return r;
}

Frac Frac::pow(int k) const {
    if (k == 0) return constant(ring_, Coef(1));
    if (is_zero()) {
        if (k < 0) throw std::domain_error("division by zero");
        return *this;
    }
    Frac r = *this;
    r.scalar_ = scalar_pow(*ring_, scalar_, k);
    for (auto& f : r.factors_) f.exp *= k;
    return r;
}

Frac operator*(const Frac& a, const Frac& b) {
    if (a.is_zero()) return a;
    if (b.is_zero()) return b;
    Frac r(a.ring_);
    r.scalar_ = normalize_scalar(*a.ring_, a.scalar_ * b.scalar_);
    r.factors_ = a.factors_;
    r.factors_.insert(r.factors_.end(), b.factors_.begin(), b.factors_.end());
    r.canonicalize();
    return r;
}

Frac operator/(const Frac& a, const Frac& b) { return a * b.inverse(); }

Frac operator+(const Frac& a, const Frac& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    std::vector<Poly> pool;
    std::vector<FactoredTerm> terms(2);
    terms[0].coef = a.scalar_;
    terms[1].coef = b.scalar_;
    // Both factor lists are sorted; walk them together to share pool entries.
    std::size_t i = 0, j = 0;
    while (i < a.factors_.size() || j < b.factors_.size()) {
        int c;
        if (i == a.factors_.size()) {
            c = 1;
        } else if (j == b.factors_.size()) {
            c = -1;
        } else {
            c = compare(a.factors_[i].poly, b.factors_[j].poly);
        }
        int idx = static_cast<int>(pool.size());
        if (c < 0) {
            pool.push_back(a.factors_[i].poly);
            terms[0].exps.push_back({idx, a.factors_[i].exp});
            ++i;
        } else if (c > 0) {
            pool.push_back(b.factors_[j].poly);
            terms[1].exps.push_back({idx, b.factors_[j].exp});
            ++j;
        } else {
            pool.push_back(a.factors_[i].poly);
            terms[0].exps.push_back({idx, a.factors_[i].exp});
            terms[1].exps.push_back({idx, b.factors_[j].exp});
            ++i;
            ++j;
        }
    }
    return sum_of_products(a.ring_, pool, terms);
}

Frac operator-(const Frac& a, const Frac& b) { return a + (-b); }

Frac sum_of_products(const RingPtr& ring, const std::vector<Poly>& pool, const std::vector<FactoredTerm>& terms) {
    const Ring& r = *ring;
    std::vector<int> minexp(pool.size(), 0);
    std::vector<char> seen(pool.size(), 0);
    std::vector<const FactoredTerm*> live;
    for (const auto& t : terms)
        if (!t.coef.is_zero()) live.push_back(&t);
    if (live.empty()) return Frac(ring);
    // Minimum exponent of each pool element over live terms (absent = 0).
    for (std::size_t h = 0; h < pool.size(); ++h) {
        int mn = 0;
        bool first = true;
        for (const auto* t : live) {
            int e = 0;
            for (const auto& [idx, k] : t->exps)
                if (idx == static_cast<int>(h)) e += k;
            mn = first ? e : std::min(mn, e);
            first = false;
        }
        minexp[h] = mn;
    }
    Frac result = Frac::constant(ring, Coef(1));
    if (live.size() == 1) {
        result = Frac::constant(ring, live[0]->coef);
        std::map<int, int> ex;
        for (const auto& [idx, k] : live[0]->exps) ex[idx] += k;
        for (const auto& [idx, k] : ex) result = result * Frac::from_poly(ring, pool[static_cast<std::size_t>(idx)]).pow(k);
        return result;
    }
    std::vector<std::vector<Poly>> powers(pool.size());
    auto power = [&](int h, int k) -> const Poly& {
        auto& pv = powers[static_cast<std::size_t>(h)];
        if (pv.empty()) pv.push_back(Poly(Coef(1)));
        while (static_cast<int>(pv.size()) <= k) pv.push_back(r.reduce(pv.back() * pool[static_cast<std::size_t>(h)]));
        return pv[static_cast<std::size_t>(k)];
    };
    Poly sum;
    for (const auto* t : live) {
        std::map<int, int> ex;
        for (const auto& [idx, k] : t->exps) ex[idx] += k;
        for (std::size_t h = 0; h < pool.size(); ++h)
            if (minexp[h] != 0) ex[static_cast<int>(h)] += 0;
        std::vector<std::pair<const Poly*, int>> parts;
        for (const auto& [idx, k] : ex) {
            int d = k - minexp[static_cast<std::size_t>(idx)];
            if (d > 0) parts.push_back({&power(idx, d), 1});
        }
        sum += expand_product(r, t->coef, parts);
    }
    sum = r.reduce(sum);
    if (sum.is_zero()) return Frac(ring);
    result = Frac::from_poly(ring, sum);
    for (std::size_t h = 0; h < pool.size(); ++h)
        if (minexp[h] != 0) result = result * Frac::from_poly(ring, pool[h]).pow(minexp[h]);
    return result;
}

bool Frac::equals(const Frac& o) const {
    if (scalar_ == o.scalar_ && factors_.size() == o.factors_.size()) {
        bool same = true;
        for (std::size_t i = 0; i < factors_.size() && same; ++i)
            same = factors_[i].exp == o.factors_[i].exp && factors_[i].poly == o.factors_[i].poly;
        if (same) return true;
    }
    return (*this - o).is_zero();
}

bool Frac::is_zero_in_ring() const { return is_zero(); }

namespace {

// Images of the source coordinates with their factors interned in one pool,
// so substituted terms share factors and sums keep common parts factored.
struct ImagePool {
    std::vector<Poly> pool;
    std::vector<std::vector<std::pair<int, int>>> img_exps;
    const std::vector<Frac>& images;

    explicit ImagePool(const std::vector<Frac>& imgs) : img_exps(imgs.size()), images(imgs) {
        std::unordered_map<std::size_t, std::vector<int>> index;
        for (std::size_t j = 0; j < images.size(); ++j)
            for (const auto& f : images[j].factors()) {
                auto& bucket = index[f.poly.hash()];
                int found = -1;
                for (int i : bucket)
                    if (pool[static_cast<std::size_t>(i)] == f.poly) found = i;
                if (found < 0) {
                    pool.push_back(f.poly);
                    found = static_cast<int>(pool.size()) - 1;
                    bucket.push_back(found);
                }
                img_exps[j].push_back({found, f.exp});
            }
    }

    Frac apply(const Poly& f, const RingPtr& target) const {
        int which = -1;
        if (is_single_var(f, &which)) return images[static_cast<std::size_t>(which)];
        std::vector<FactoredTerm> terms;
        terms.reserve(f.size());
        for (const auto& t : f.terms()) {
            FactoredTerm ft;
            ft.coef = t.c;
            bool zero = false;
            for (std::size_t j = 0; j < images.size(); ++j) {
                int k = t.m.exp(static_cast<int>(j));
                if (!k) continue;
                if (images[j].is_zero()) {
                    zero = true;
                    break;
                }
                ft.coef *= images[j].scalar().pow(static_cast<unsigned>(k));
                for (const auto& [idx, e] : img_exps[j]) ft.exps.push_back({idx, e * k});
            }
            if (!zero) terms.push_back(std::move(ft));
        }
        return sum_of_products(target, pool, terms);
    }
};

}  // namespace

Frac Frac::subst_poly(const Poly& f, const std::vector<Frac>& images, const RingPtr& target) {
    for (const auto& t : f.terms())
        for (int v = static_cast<int>(images.size()); v < Mono::kMaxVars; ++v)
            if (t.m.exp(v)) throw std::invalid_argument("substitution arity mismatch");
    return ImagePool(images).apply(f, target);
}

Frac Frac::subst(const std::vector<Frac>& images, const RingPtr& target) const {
    if (static_cast<int>(images.size()) != ring_->nvars()) throw std::invalid_argument("substitution arity mismatch");
    ImagePool ip(images);
    Frac result = Frac::constant(target, scalar_);
    if (result.is_zero()) return result;
    for (const auto& fac : factors_) {
        Frac piece = ip.apply(fac.poly, target);
        if (piece.is_zero() && fac.exp < 0) throw std::domain_error("substitution makes a denominator vanish");
        result = result * piece.pow(fac.exp);
        if (result.is_zero()) return result;
    }
    return result;
}

Frac Frac::localized(const std::vector<long long>& point) const {
    const Ring& r = *ring_;
    auto needs_work = [&](const Frac& f) {
        if (r.mixed() && f.scalar_.valuation(r.p()) < 0) return true;
        for (const auto& fac : f.factors_)
            if (fac.exp < 0 && r.residue(fac.poly, point) == 0) return true;
        return false;
    };
    if (is_zero() || !needs_work(*this)) return *this;
    Frac f = *this;
    if (r.mixed()) {
        // Trade powers of p for powers of coordinates through the point.
        for (int v = 0; v < r.nvars(); ++v) {
            if (point[static_cast<std::size_t>(v)] % r.p() != 0 || r.p_valuation(v) == 0) continue;
            try {
                f = f.local_divide(v, 0);
            } catch (const DivisionError&) {
            }
        }
    }
    // Cancel denominators vanishing at the point against numerator factors.
    bool changed = true;
    while (changed && needs_work(f)) {
        changed = false;
        for (std::size_t d = 0; d < f.factors_.size() && !changed; ++d) {
            if (f.factors_[d].exp >= 0 || r.residue(f.factors_[d].poly, point) != 0) continue;
            for (std::size_t n = 0; n < f.factors_.size() && !changed; ++n) {
                if (f.factors_[n].exp <= 0) continue;
                Poly q;
                if (!divides_exactly(f.factors_[d].poly, f.factors_[n].poly, &q)) continue;
                Frac g = constant(ring_, f.scalar_);
                for (std::size_t k = 0; k < f.factors_.size(); ++k) {
                    Frac piece(ring_);
                    piece.scalar_ = Coef(1);
                    piece.factors_.push_back(f.factors_[k]);
                    if (k == n) {
                        piece.factors_.back().exp -= 1;
                        piece.canonicalize();
                        piece = piece * from_poly(ring_, q);
                    } else if (k == d) {
                        piece.factors_.back().exp += 1;
                        piece.canonicalize();
                    }
                    g = g * piece;
                }
                f = g;
                changed = true;
            }
        }
    }
    return f;
}

long long Frac::residue(const std::vector<long long>& point) const {
    const Ring& r = *ring_;
    const long long p = r.p();
    if (is_zero()) return 0;
    if (static_cast<int>(point.size()) != r.nvars()) throw std::invalid_argument("point dimension mismatch");
    (void)p;
    return localized(point).residue_raw(point);
}

long long Frac::residue_raw(const std::vector<long long>& point) const {
    const Ring& r = *ring_;
    const long long p = r.p();
    for (const auto& f : factors_)
        if (f.exp < 0 && r.residue(f.poly, point) == 0) throw NotLocal("not local at P: denominator " + r.str(f.poly) + " vanishes");
    long long acc;
    try {
        acc = scalar_.mod(p);
    } catch (const std::domain_error&) {
        throw NotLocal("not local at P: scalar denominator divisible by p");
    }
    for (const auto& f : factors_) {
        long long x = r.residue(f.poly, point);
        if (f.exp > 0) {
            acc = acc * powmod(x, f.exp, p) % p;
        } else {
            acc = acc * powmod(mod_inverse(x, p), -f.exp, p) % p;
        }
    }
    return acc;
}

std::optional<long long> Frac::eval_mod(const std::vector<long long>& point, long long l) const {
    try {
        long long acc = scalar_.mod(l);
        for (const auto& f : factors_) {
            long long x = f.poly.eval_mod(point, l);
            if (f.exp > 0) {
                acc = acc * powmod(x, f.exp, l) % l;
            } else {
                if (x == 0) return std::nullopt;
                acc = acc * powmod(mod_inverse(x, l), -f.exp, l) % l;
            }
        }
        return acc;
    } catch (const std::domain_error&) {
        return std::nullopt;
    }
}

int Frac::valuation(int v) const {
    const Ring& r = *ring_;
    if (is_zero()) return kInfiniteValuation;
    int total = 0;
    if (r.mixed()) total += scalar_.valuation(r.p()) * r.p_valuation(v);
    for (const auto& f : factors_) {
        int which = -1;
        int val;
        if (is_single_var(f.poly, &which)) {
            val = which == v ? 1 : 0;
        } else {
            val = r.valuation(f.poly, v);
        }
        total += f.exp * val;
    }
    return total;
}

Frac Frac::local_divide(int v, int k) const {
    const Ring& r = *ring_;
    if (is_zero()) return *this;
    Frac out = constant(ring_, Coef(1));
    int total = 0;
    Coef sc = scalar_;
    if (r.mixed()) {
        int j = scalar_.valuation(r.p());
        int pv = r.p_valuation(v);
        if (j != 0 && pv > 0) {
            Coef pj = Coef(r.p()).pow(static_cast<unsigned>(j < 0 ? -j : j));
            sc = j > 0 ? scalar_ / pj : scalar_ * pj;
            out = out * from_poly(ring_, r.p_cofactor(v)).pow(j);
            total += j * pv;
        }
    }
    out = out * constant(ring_, sc);
    for (const auto& f : factors_) {
        int which = -1;
        if (is_single_var(f.poly, &which)) {
            if (which == v) {
                total += f.exp;
            } else {
                out = out * var(ring_, which).pow(f.exp);
            }
            continue;
        }
        int val = r.valuation(f.poly, v);
        if (val > 0) {
            Poly q = r.local_divide(f.poly, v, val);
            out = out * from_poly(ring_, q).pow(f.exp);
            total += val * f.exp;
        } else {
            Frac piece(ring_);
            piece.scalar_ = Coef(1);
            piece.factors_.push_back(f);
            out = out * piece;
        }
    }
    if (total < k)
        throw DivisionError("not divisible: valuation along " + r.names()[static_cast<std::size_t>(v)] + " is " +
                            std::to_string(total) + " < " + std::to_string(k));
    if (total > k) out = out * var(ring_, v).pow(total - k);
    return out;
}

Frac Frac::local_divide_monomial(const std::vector<int>& exps) const {
    Frac q = *this;
    for (std::size_t v = 0; v < exps.size(); ++v)
        if (exps[v] > 0) q = q.local_divide(static_cast<int>(v), exps[v]);
    return q;
}

std::vector<long long> Frac::linear_part() const {
    std::vector<long long> origin(static_cast<std::size_t>(ring_->nvars()), 0);
    return localized(origin).linear_part_raw();
}

std::vector<long long> Frac::linear_part_raw() const {
    const Ring& r = *ring_;
    const long long p = r.p();
    std::vector<long long> zero(static_cast<std::size_t>(r.nvars()), 0);
    std::vector<long long> origin(static_cast<std::size_t>(r.nvars()), 0);
    if (is_zero()) return zero;
    for (const auto& f : factors_)
        if (f.exp < 0 && r.residue(f.poly, origin) == 0) throw NotLocal("not local at origin");
    if (r.mixed() && scalar_.valuation(p) < 0) throw NotLocal("not local at origin");
    long long unit = scalar_.mod(p);
    bool scalar_nonunit = unit == 0;
    int count = 0;
    const Poly* special = nullptr;
    for (const auto& f : factors_) {
        long long x = r.residue(f.poly, origin);
        if (x == 0) {
            count += f.exp;
            special = &f.poly;
        } else if (f.exp > 0) {
            unit = unit * powmod(x, f.exp, p) % p;
        } else {
            unit = unit * powmod(mod_inverse(x, p), -f.exp, p) % p;
        }
    }
    if (count == 0 && !scalar_nonunit) throw std::domain_error("not in maximal ideal");
    if (scalar_nonunit || count >= 2) return zero;  // p lies in m^2 in the mixed case
    std::vector<long long> lp = r.linear_part(*special);
    for (auto& x : lp) x = x * unit % p;
    return lp;
}

std::string Frac::str() const {
    const Ring& r = *ring_;
    if (is_zero()) return "0";
    auto render = [&](const Poly& f, int e) {
        int which = -1;
        std::string s = is_single_var(f, &which) ? r.names()[static_cast<std::size_t>(which)] : "(" + r.str(f) + ")";
        if (e > 1) s += "^" + std::to_string(e);
        return s;
    };
    std::string num, den;
    mpz_class sn = scalar_.num(), sd = scalar_.den();
    bool neg = sn < 0;
    if (neg) sn = -sn;
    if (sn != 1) num = sn.get_str();
    if (sd != 1) den = sd.get_str();
    int nden = sd != 1 ? 1 : 0;
    for (const auto& f : factors_) {
        if (f.exp > 0) {
            num += (num.empty() ? "" : "*") + render(f.poly, f.exp);
        } else {
            den += (den.empty() ? "" : "*") + render(f.poly, -f.exp);
            ++nden;
        }
    }
    if (num.empty()) num = "1";
    std::string s = (neg ? "-" : "") + num;
    if (!den.empty()) s += "/" + (nden > 1 ? "(" + den + ")" : den);
    return s;
}

std::size_t Frac::term_count() const {
    std::size_t n = 0;
    for (const auto& f : factors_) n += f.poly.size();
    return n;
}

}  // namespace qv
