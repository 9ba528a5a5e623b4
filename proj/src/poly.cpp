#include "quotver/poly.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace qv {

namespace {

std::uint32_t degree_of(std::uint64_t e) {
    return static_cast<std::uint32_t>((e & 0xffffu) + ((e >> 16) & 0xffffu) +
                                      ((e >> 32) & 0xffffu) + ((e >> 48) & 0xffffu));
}

// Merge two sorted term lists, dropping cancelled terms.
std::vector<Term> merge_terms(const std::vector<Term>& a, const std::vector<Term>& b, bool negate_b) {
    std::vector<Term> out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].m > b[j].m)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].m > a[i].m) {
            out.push_back({b[j].m, negate_b ? -b[j].c : b[j].c});
            ++j;
        } else {
            Coef c = negate_b ? a[i].c - b[j].c : a[i].c + b[j].c;
            if (!c.is_zero()) out.push_back({a[i].m, std::move(c)});
            ++i;
            ++j;
        }
    }
    return out;
}

}  // namespace

Mono Mono::var(int i, unsigned k) {
    if (i < 0 || i >= kMaxVars) throw std::out_of_range("variable index out of range");
    if (k > 0xffffu) throw std::overflow_error("exponent overflow");
    Mono m;
    m.e = static_cast<std::uint64_t>(k) << (48 - 16 * i);
    m.deg = k;
    return m;
}

Mono Mono::from_exps(const std::vector<int>& exps) {
    Mono m;
    for (std::size_t i = 0; i < exps.size(); ++i) {
        if (exps[i] < 0) throw std::invalid_argument("negative exponent");
        if (exps[i] > 0) m = m * var(static_cast<int>(i), static_cast<unsigned>(exps[i]));
    }
    return m;
}

bool Mono::divides(const Mono& o) const {
    if (deg > o.deg) return false;
    for (int i = 0; i < kMaxVars; ++i)
        if (exp(i) > o.exp(i)) return false;
    return true;
}

Mono Mono::operator*(const Mono& o) const {
    Mono r;
    for (int i = 0; i < kMaxVars; ++i)
        if (exp(i) + o.exp(i) > 0xffff) throw std::overflow_error("exponent overflow");
    r.e = e + o.e;
    r.deg = deg + o.deg;
    return r;
}

Mono Mono::operator/(const Mono& o) const {
    Mono r;
    r.e = e - o.e;
    r.deg = deg - o.deg;
    return r;
}

Mono Mono::pow(unsigned k) const {
    Mono r;
    for (int i = 0; i < kMaxVars; ++i)
        if (exp(i) > 0) r = r * var(i, static_cast<unsigned>(exp(i)) * k);
    return r;
}

Mono Mono::with_exp(int i, int k) const {
    Mono r = *this;
    std::uint64_t mask = 0xffffull << (48 - 16 * i);
    r.e = (r.e & ~mask) | (static_cast<std::uint64_t>(k) << (48 - 16 * i));
    r.deg = degree_of(r.e);
    return r;
}

Poly::Poly(const Coef& c) {
    if (!c.is_zero()) t_.push_back({Mono{}, c});
}

Poly Poly::var(int i) { return monomial(Mono::var(i)); }

Poly Poly::monomial(const Mono& m, const Coef& c) {
    Poly p;
    if (!c.is_zero()) p.t_.push_back({m, c});
    return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.m > b.m; });
    Poly p;
    for (auto& t : terms) {
        if (!p.t_.empty() && p.t_.back().m == t.m) {
            p.t_.back().c += t.c;
            if (p.t_.back().c.is_zero()) p.t_.pop_back();
        } else if (!t.c.is_zero()) {
            p.t_.push_back(std::move(t));
        }
    }
    return p;
}

Coef Poly::constant_term() const {
    if (!t_.empty() && t_.back().m.is_one()) return t_.back().c;
    return Coef(0);
}

Coef Poly::coeff(const Mono& m) const {
    auto it = std::lower_bound(t_.begin(), t_.end(), m, [](const Term& t, const Mono& x) { return t.m > x; });
    if (it != t_.end() && it->m == m) return it->c;
    return Coef(0);
}

int Poly::degree_in(int v) const {
    int d = 0;
    for (const auto& t : t_) d = std::max(d, t.m.exp(v));
    return d;
}

int Poly::min_exp(int v) const {
    if (t_.empty()) return 0;
    int d = 0xffff;
    for (const auto& t : t_) d = std::min(d, t.m.exp(v));
    return d;
}

Poly Poly::operator-() const {
    Poly r;
    r.t_.reserve(t_.size());
    for (const auto& t : t_) r.t_.push_back({t.m, -t.c});
    return r;
}

Poly& Poly::operator+=(const Poly& o) {
    t_ = merge_terms(t_, o.t_, false);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    t_ = merge_terms(t_, o.t_, true);
    return *this;
}

Poly operator+(const Poly& a, const Poly& b) {
    Poly r;
    r.t_ = merge_terms(a.t_, b.t_, false);
    return r;
}

Poly operator-(const Poly& a, const Poly& b) {
    Poly r;
    r.t_ = merge_terms(a.t_, b.t_, true);
    return r;
}

Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    const Poly& small = a.size() <= b.size() ? a : b;
    const Poly& large = a.size() <= b.size() ? b : a;
    // Each row (large times one term of small) is already sorted; merge rows
    // pairwise in a balanced tree.
    std::vector<std::vector<Term>> rows;
    rows.reserve(small.size());
    for (const auto& s : small.t_) {
        std::vector<Term> row;
        row.reserve(large.size());
        for (const auto& l : large.t_) row.push_back({s.m * l.m, s.c * l.c});
        rows.push_back(std::move(row));
    }
    while (rows.size() > 1) {
        std::vector<std::vector<Term>> next;
        next.reserve((rows.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < rows.size(); i += 2) next.push_back(merge_terms(rows[i], rows[i + 1], false));
        if (rows.size() % 2) next.push_back(std::move(rows.back()));
        rows = std::move(next);
    }
    Poly r;
    r.t_ = std::move(rows.front());
    return r;
}

Poly Poly::scaled(const Coef& c) const {
    if (c.is_zero()) return Poly();
    Poly r;
    r.t_.reserve(t_.size());
    for (const auto& t : t_) r.t_.push_back({t.m, t.c * c});
    return r;
}

Poly Poly::times_monomial(const Mono& m, const Coef& c) const {
    if (c.is_zero()) return Poly();
    Poly r;
    r.t_.reserve(t_.size());
    for (const auto& t : t_) r.t_.push_back({t.m * m, t.c * c});
    return r;
}

Poly Poly::div_monomial(const Mono& m) const {
    Poly r;
    r.t_.reserve(t_.size());
    for (const auto& t : t_) {
        if (!m.divides(t.m)) throw std::logic_error("monomial does not divide polynomial");
        r.t_.push_back({t.m / m, t.c});
    }
    return r;
}

Poly Poly::pow(unsigned k) const {
    Poly r(Coef(1)), b(*this);
    while (k) {
        if (k & 1u) r = r * b;
        k >>= 1u;
        if (k) b = b * b;
    }
    return r;
}

Poly Poly::subst(const std::vector<Poly>& images) const {
    // Cache powers of each image as they are needed.
    std::vector<std::vector<Poly>> powers(images.size());
    auto power = [&](std::size_t v, int k) -> const Poly& {
        auto& pv = powers[v];
        if (pv.empty()) pv.push_back(Poly(Coef(1)));
        while (static_cast<int>(pv.size()) <= k) pv.push_back(pv.back() * images[v]);
        return pv[k];
    };
    std::vector<Term> acc;
    Poly result;
    // Group terms by their exponent of variable 0 to share work (Horner in v0).
    for (const auto& t : t_) {
        Poly prod(t.c);
        for (std::size_t v = 0; v < images.size(); ++v) {
            int k = t.m.exp(static_cast<int>(v));
            if (k > 0) prod = prod * power(v, k);
        }
        for (int v = static_cast<int>(images.size()); v < Mono::kMaxVars; ++v)
            if (t.m.exp(v) > 0) throw std::invalid_argument("substitution misses a variable");
        result += prod;
    }
    return result;
}

Poly Poly::restrict(int v, const Coef& c) const {
    std::vector<Term> out;
    out.reserve(t_.size());
    for (const auto& t : t_) {
        int k = t.m.exp(v);
        if (k == 0) {
            out.push_back(t);
        } else if (!c.is_zero()) {
            out.push_back({t.m.with_exp(v, 0), t.c * c.pow(static_cast<unsigned>(k))});
        }
    }
    return from_terms(std::move(out));
}

Poly Poly::at_zero(int v) const {
    Poly r;
    for (const auto& t : t_)
        if (t.m.exp(v) == 0) r.t_.push_back(t);
    return r;
}

Coef Poly::eval(const std::vector<Coef>& point) const {
    Coef s(0);
    for (const auto& t : t_) {
        Coef x = t.c;
        for (std::size_t v = 0; v < point.size(); ++v) {
            int k = t.m.exp(static_cast<int>(v));
            if (k) x *= point[v].pow(static_cast<unsigned>(k));
        }
        s += x;
    }
    return s;
}

long long Poly::eval_mod(const std::vector<long long>& point, long long p) const {
    long long s = 0;
    for (const auto& t : t_) {
        long long x = t.c.mod(p);
        for (std::size_t v = 0; v < point.size() && x; ++v) {
            int k = t.m.exp(static_cast<int>(v));
            long long base = ((point[v] % p) + p) % p;
            for (int j = 0; j < k; ++j) x = x * base % p;
        }
        s = (s + x) % p;
    }
    return s;
}

bool operator==(const Poly& a, const Poly& b) {
    if (a.t_.size() != b.t_.size()) return false;
    for (std::size_t i = 0; i < a.t_.size(); ++i)
        if (a.t_[i].m != b.t_[i].m || a.t_[i].c != b.t_[i].c) return false;
    return true;
}

int compare(const Poly& a, const Poly& b) {
    std::size_t n = std::min(a.t_.size(), b.t_.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a.t_[i].m != b.t_[i].m) return a.t_[i].m > b.t_[i].m ? 1 : -1;
        int c = cmp(a.t_[i].c, b.t_[i].c);
        if (c) return c;
    }
    if (a.t_.size() != b.t_.size()) return a.t_.size() > b.t_.size() ? 1 : -1;
    return 0;
}

std::string mono_str(const Mono& m, const std::vector<std::string>& names) {
    std::string s;
    for (int v = 0; v < Mono::kMaxVars; ++v) {
        int k = m.exp(v);
        if (!k) continue;
        if (!s.empty()) s += "*";
        s += v < static_cast<int>(names.size()) ? names[v] : "v" + std::to_string(v);
        if (k > 1) s += "^" + std::to_string(k);
    }
    return s;
}

std::string Poly::str(const std::vector<std::string>& names) const {
    if (t_.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& t : t_) {
        Coef c = t.c;
        bool neg = c.sign() < 0;
        if (neg) c = -c;
        if (first) {
            if (neg) s += "-";
        } else {
            s += neg ? " - " : " + ";
        }
        first = false;
        std::string ms = mono_str(t.m, names);
        std::string cs = c.is_integer() ? c.str() : "(" + c.str() + ")";
        if (ms.empty()) {
            s += cs;
        } else if (c.is_one()) {
            s += ms;
        } else {
            s += cs + "*" + ms;
        }
    }
    return s;
}

std::size_t Poly::hash() const {
    std::size_t h = 1469598103934665603ull;
    for (const auto& t : t_) {
        h ^= std::hash<std::uint64_t>()(t.m.e) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h ^= t.c.hash() + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

std::pair<Poly, Poly> divrem(const Poly& f, const Poly& g) {
    if (g.is_zero()) throw std::domain_error("division by zero polynomial");
    const Mono lm = g.lead().m;
    const Coef lc = g.lead().c;
    std::vector<Term> quot;
    std::vector<Term> rem;
    Poly work = f;
    while (!work.is_zero()) {
        // Find the largest term of work divisible by lm.
        const auto& ts = work.terms();
        std::size_t i = 0;
        while (i < ts.size() && !lm.divides(ts[i].m)) ++i;
        if (i == ts.size()) {
            for (const auto& t : ts) rem.push_back(t);
            break;
        }
        // Terms above i are irreducible and stay in the remainder forever
        // (later subtractions only touch monomials below ts[i].m).
        for (std::size_t j = 0; j < i; ++j) rem.push_back(ts[j]);
        Mono qm = ts[i].m / lm;
        Coef qc = ts[i].c / lc;
        quot.push_back({qm, qc});
        Poly head;
        std::vector<Term> tail(ts.begin() + static_cast<long>(i), ts.end());
        work = Poly::from_terms(std::move(tail)) - g.times_monomial(qm, qc);
    }
    return {Poly::from_terms(std::move(quot)), Poly::from_terms(std::move(rem))};
}

bool divides_exactly(const Poly& g, const Poly& f, Poly* quotient) {
    if (g.is_zero()) return false;
    if (f.is_zero()) {
        if (quotient) *quotient = Poly();
        return true;
    }
    if (f.total_degree() < g.total_degree()) return false;
    // Exact division only ever cancels the leading term; stop at the first
    // leading term that is not divisible.
    const Mono lm = g.lead().m;
    const Coef lc = g.lead().c;
    std::vector<Term> quot;
    Poly work = f;
    while (!work.is_zero()) {
        const Term& t = work.lead();
        if (!lm.divides(t.m)) return false;
        Mono qm = t.m / lm;
        Coef qc = t.c / lc;
        quot.push_back({qm, qc});
        work -= g.times_monomial(qm, qc);
    }
    if (quotient) *quotient = Poly::from_terms(std::move(quot));
    return true;
}

}  // namespace qv
