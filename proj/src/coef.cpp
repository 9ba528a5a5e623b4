#include "quotver/coef.hpp"

#include <climits>
#include <stdexcept>

namespace qv {

namespace {

mpz_class from_ll(long long v) {
    mpz_class z;
    mpz_set_si(z.get_mpz_t(), v);
    return z;
}

bool fits_ll(const mpz_class& z) { return mpz_fits_slong_p(z.get_mpz_t()) != 0; }

}  // namespace

Coef::Coef(const mpz_class& v) : big_(std::make_unique<mpq_class>(v)) { normalize(); }

Coef::Coef(const mpq_class& v) : big_(std::make_unique<mpq_class>(v)) {
    big_->canonicalize();
    normalize();
}

Coef::Coef(long long num, long long den) {
    if (den == 0) throw std::domain_error("zero denominator");
    big_ = std::make_unique<mpq_class>(from_ll(num), from_ll(den));
    big_->canonicalize();
    normalize();
}

Coef Coef::parse(const std::string& s) {
    mpz_class z;
    if (z.set_str(s, 10) != 0) throw std::invalid_argument("bad integer literal: " + s);
    return Coef(z);
}

void Coef::normalize() {
    if (!big_) return;
    if (big_->get_den() == 1 && fits_ll(big_->get_num())) {
        small_ = mpz_get_si(big_->get_num_mpz_t());
        big_.reset();
    }
}

mpq_class Coef::to_mpq() const {
    if (big_) return *big_;
    return mpq_class(from_ll(small_));
}

int Coef::sign() const {
    if (big_) return sgn(*big_);
    return (small_ > 0) - (small_ < 0);
}

bool Coef::is_integer() const { return !big_ || big_->get_den() == 1; }

mpz_class Coef::num() const { return big_ ? big_->get_num() : from_ll(small_); }

mpz_class Coef::den() const { return big_ ? big_->get_den() : mpz_class(1); }

Coef Coef::operator-() const {
    if (!big_ && small_ != LLONG_MIN) return Coef(-small_);
    return Coef(mpq_class(-to_mpq()));
}

Coef& Coef::operator+=(const Coef& o) {
    long long r;
    if (!big_ && !o.big_ && !__builtin_add_overflow(small_, o.small_, &r)) {
        small_ = r;
        return *this;
    }
    *this = Coef(mpq_class(to_mpq() + o.to_mpq()));
    return *this;
}

Coef& Coef::operator-=(const Coef& o) {
    long long r;
    if (!big_ && !o.big_ && !__builtin_sub_overflow(small_, o.small_, &r)) {
        small_ = r;
        return *this;
    }
    *this = Coef(mpq_class(to_mpq() - o.to_mpq()));
    return *this;
}

Coef& Coef::operator*=(const Coef& o) {
    long long r;
    if (!big_ && !o.big_ && !__builtin_mul_overflow(small_, o.small_, &r)) {
        small_ = r;
        return *this;
    }
    *this = Coef(mpq_class(to_mpq() * o.to_mpq()));
    return *this;
}

Coef& Coef::operator/=(const Coef& o) {
    if (o.is_zero()) throw std::domain_error("division by zero coefficient");
    if (!big_ && !o.big_ && o.small_ != 0 && small_ % o.small_ == 0 &&
        !(small_ == LLONG_MIN && o.small_ == -1)) {
        small_ /= o.small_;
        return *this;
    }
    *this = Coef(mpq_class(to_mpq() / o.to_mpq()));
    return *this;
}

bool operator==(const Coef& a, const Coef& b) {
    if (!a.big_ && !b.big_) return a.small_ == b.small_;
    if (a.big_ && b.big_) return *a.big_ == *b.big_;
    return false;  // normalized forms differ in storage class
}

int cmp(const Coef& a, const Coef& b) {
    if (!a.big_ && !b.big_) return (a.small_ > b.small_) - (a.small_ < b.small_);
    return cmp(a.to_mpq(), b.to_mpq());
}

long long mod_inverse(long long a, long long p) {
    a %= p;
    if (a < 0) a += p;
    if (a == 0) throw std::domain_error("no inverse of 0 mod p");
    long long t = 0, nt = 1, r = p, nr = a;
    while (nr != 0) {
        long long q = r / nr;
        long long tmp = t - q * nt;
        t = nt;
        nt = tmp;
        tmp = r - q * nr;
        r = nr;
        nr = tmp;
    }
    if (r != 1) throw std::domain_error("not invertible mod p");
    return t < 0 ? t + p : t;
}

long long Coef::mod(long long p) const {
    if (!big_) {
        long long r = small_ % p;
        return r < 0 ? r + p : r;
    }
    mpz_class n = big_->get_num() % static_cast<long>(p);
    mpz_class d = big_->get_den() % static_cast<long>(p);
    long long nn = mpz_get_si(n.get_mpz_t());
    long long dd = mpz_get_si(d.get_mpz_t());
    if (nn < 0) nn += p;
    if (dd < 0) dd += p;
    if (dd == 0) throw std::domain_error("denominator divisible by p");
    return (nn * mod_inverse(dd, p)) % p;
}

int Coef::valuation(long long p) const {
    if (is_zero()) throw std::domain_error("valuation of zero");
    int v = 0;
    mpz_class n = num(), d = den();
    mpz_class pp(static_cast<long>(p));
    while (mpz_divisible_p(n.get_mpz_t(), pp.get_mpz_t())) {
        n /= pp;
        ++v;
    }
    while (mpz_divisible_p(d.get_mpz_t(), pp.get_mpz_t())) {
        d /= pp;
        --v;
    }
    return v;
}

Coef Coef::pow(unsigned e) const {
    Coef r(1), b(*this);
    while (e) {
        if (e & 1u) r *= b;
        e >>= 1u;
        if (e) b *= b;
    }
    return r;
}

std::string Coef::str() const {
    if (!big_) return std::to_string(small_);
    return big_->get_str();
}

std::size_t Coef::hash() const {
    if (!big_) return std::hash<long long>()(small_);
    return std::hash<std::string>()(big_->get_str());
}

}  // namespace qv
