#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <string>

namespace qv {

// Exact rational number. Integers that fit in an int64 are stored inline;
// everything else falls back to a GMP rational.
class Coef {
public:
    Coef() = default;
    Coef(long long v) : small_(v) {}
    Coef(int v) : small_(v) {}
    explicit Coef(const mpz_class& v);
    explicit Coef(const mpq_class& v);
    Coef(long long num, long long den);

    Coef(const Coef& o) : small_(o.small_) {
        if (o.big_) big_ = std::make_unique<mpq_class>(*o.big_);
    }
    Coef(Coef&&) noexcept = default;
    Coef& operator=(const Coef& o) {
        if (this != &o) {
            small_ = o.small_;
            big_ = o.big_ ? std::make_unique<mpq_class>(*o.big_) : nullptr;
        }
        return *this;
    }
    Coef& operator=(Coef&&) noexcept = default;

    static Coef parse(const std::string& s);

    bool is_small() const { return !big_; }
    long long small() const { return small_; }
    mpq_class to_mpq() const;

    bool is_zero() const { return !big_ && small_ == 0; }
    bool is_one() const { return !big_ && small_ == 1; }
    int sign() const;
    bool is_integer() const;
    mpz_class num() const;
    mpz_class den() const;

    Coef operator-() const;
    Coef& operator+=(const Coef& o);
    Coef& operator-=(const Coef& o);
    Coef& operator*=(const Coef& o);
    Coef& operator/=(const Coef& o);
    friend Coef operator+(Coef a, const Coef& b) { return a += b; }
    friend Coef operator-(Coef a, const Coef& b) { return a -= b; }
    friend Coef operator*(Coef a, const Coef& b) { return a *= b; }
    friend Coef operator/(Coef a, const Coef& b) { return a /= b; }

    friend bool operator==(const Coef& a, const Coef& b);
    friend bool operator!=(const Coef& a, const Coef& b) { return !(a == b); }
    // Total order (numeric).
    friend int cmp(const Coef& a, const Coef& b);

    // Residue in F_p; throws if p divides the denominator.
    long long mod(long long p) const;
    // p-adic valuation; the value must be nonzero.
    int valuation(long long p) const;
    Coef pow(unsigned e) const;

    std::string str() const;
    std::size_t hash() const;

private:
    void normalize();

    long long small_ = 0;
    std::unique_ptr<mpq_class> big_;
};

long long mod_inverse(long long a, long long p);

}  // namespace qv
