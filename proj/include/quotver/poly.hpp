#pragma once

#include "quotver/coef.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qv {

// Exponent vector for up to kMaxVars variables, 16 bits per exponent.
// Variable 0 sits in the most significant field so that comparing the packed
// words compares exponent vectors lexicographically.
struct Mono {
    static constexpr int kMaxVars = 4;

    std::uint64_t e = 0;
    std::uint32_t deg = 0;

    static Mono var(int i, unsigned k = 1);
    static Mono from_exps(const std::vector<int>& exps);

    int exp(int i) const { return static_cast<int>((e >> (48 - 16 * i)) & 0xffffu); }
    bool is_one() const { return e == 0; }
    bool divides(const Mono& o) const;
    Mono operator*(const Mono& o) const;
    Mono operator/(const Mono& o) const;  // requires divides
    Mono pow(unsigned k) const;
    Mono with_exp(int i, int k) const;
};

inline bool operator==(const Mono& a, const Mono& b) { return a.e == b.e; }
inline bool operator!=(const Mono& a, const Mono& b) { return a.e != b.e; }
// Graded lexicographic order.
inline bool operator<(const Mono& a, const Mono& b) {
    return a.deg != b.deg ? a.deg < b.deg : a.e < b.e;
}
inline bool operator>(const Mono& a, const Mono& b) { return b < a; }

struct Term {
    Mono m;
    Coef c;
};

// Sparse polynomial over Q with terms in strictly decreasing grlex order.
class Poly {
public:
    Poly() = default;
    Poly(const Coef& c);
    Poly(long long c) : Poly(Coef(c)) {}
    static Poly var(int i);
    static Poly monomial(const Mono& m, const Coef& c = Coef(1));
    static Poly from_terms(std::vector<Term> terms);  // any order, duplicates merged

    const std::vector<Term>& terms() const { return t_; }
    std::size_t size() const { return t_.size(); }
    bool is_zero() const { return t_.empty(); }
    bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_[0].m.is_one()); }
    const Term& lead() const { return t_.front(); }
    Coef constant_term() const;
    Coef coeff(const Mono& m) const;
    int total_degree() const { return t_.empty() ? -1 : static_cast<int>(t_.front().m.deg); }
    int degree_in(int v) const;
    int min_exp(int v) const;
    bool uses_var(int v) const { return degree_in(v) > 0; }

    Poly operator-() const;
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly scaled(const Coef& c) const;
    Poly times_monomial(const Mono& m, const Coef& c = Coef(1)) const;
    Poly div_monomial(const Mono& m) const;  // exact; requires every term divisible
    Poly pow(unsigned k) const;

    // Replace each variable i by images[i] (images.size() variables).
    Poly subst(const std::vector<Poly>& images) const;
    // Set variable v to the constant c.
    Poly restrict(int v, const Coef& c) const;
    // Drop terms that contain variable v, i.e. restrict to v = 0.
    Poly at_zero(int v) const;
    Coef eval(const std::vector<Coef>& point) const;
    long long eval_mod(const std::vector<long long>& point, long long p) const;

    template <class F>
    Poly map_coeffs(F f) const {
        std::vector<Term> out;
        out.reserve(t_.size());
        for (const auto& t : t_) {
            Coef c = f(t.c);
            if (!c.is_zero()) out.push_back({t.m, std::move(c)});
        }
        Poly r;
        r.t_ = std::move(out);
        return r;
    }

    friend bool operator==(const Poly& a, const Poly& b);
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }
    // Deterministic total order used to sort factor lists.
    friend int compare(const Poly& a, const Poly& b);

    std::string str(const std::vector<std::string>& names) const;
    std::size_t hash() const;

private:
    std::vector<Term> t_;
};

// Division with remainder under grlex by a single divisor with nonzero
// leading coefficient. Returns (quotient, remainder).
std::pair<Poly, Poly> divrem(const Poly& f, const Poly& g);
// Exact quotient if g divides f over Q, otherwise false.
bool divides_exactly(const Poly& g, const Poly& f, Poly* quotient);

std::string mono_str(const Mono& m, const std::vector<std::string>& names);

}  // namespace qv
