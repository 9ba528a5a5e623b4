#pragma once

#include "quotver/action.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qv {

// Finite field F_{p^k} with elements encoded as base-p digit vectors packed
// into integers 0..q-1, multiplication through log/exp tables.
class GaloisField {
public:
    GaloisField(long long p, int k);
    long long p() const { return p_; }
    int degree() const { return k_; }
    std::int64_t size() const { return q_; }
    std::int64_t add(std::int64_t a, std::int64_t b) const;
    std::int64_t mul(std::int64_t a, std::int64_t b) const;
    std::int64_t from_int(long long c) const;  // prime field embedding
    bool in_prime_field(std::int64_t a) const { return a < p_; }
    // Defining polynomial, coefficients from x^0 up to the leading 1.
    const std::vector<long long>& modulus() const { return modulus_; }
    bool from_table() const { return from_table_; }

private:
    long long p_;
    int k_;
    std::int64_t q_;
    std::vector<long long> modulus_;
    bool from_table_ = false;
    std::vector<std::int64_t> log_, exp_;
};

// Polynomial with coefficients in F_p, evaluated over extension fields.
struct ModPoly {
    long long p = 2;
    std::vector<std::pair<long long, std::vector<int>>> terms;  // (coef in [1,p), exponents)
    bool is_zero() const { return terms.empty(); }
    std::int64_t eval(const GaloisField& f, const std::vector<std::int64_t>& x) const;
};

// A declared bad component: coordinates listed in `fixed` take the given
// values; the other coordinates are free (a point fixes all of them).
struct BadComponent {
    std::string label;
    std::vector<std::optional<long long>> coords;
    bool is_point() const;
    bool contains(const std::vector<long long>& pt, long long p) const;
};

struct BadLocusClaim {
    std::string id;
    std::vector<int> cartier;  // exponent of each coordinate in the generic Cartier part
    std::vector<BadComponent> components;
    // Coordinates v whose hyperplanes {v = 0} are examined; empty means the
    // coordinates with a positive Cartier exponent.
    std::vector<int> support;
};

struct BadLocusReport {
    bool containment = false;
    bool complete = false;      // no undeclared solutions up to the scan degree
    bool exact = false;         // completeness certified by the split triangular argument
    int scan_degree = 0;
    std::vector<std::vector<long long>> found_fp;  // F_p points found by the scan
    std::vector<std::string> excluded;             // points dropped because a denominator vanishes
    std::vector<std::string> problems;
    std::string certificate;
    bool ok() const { return containment && complete; }
};

// Cofactor system I(v_i) / (Cartier monomial), reduced mod p on each
// support coordinate hyperplane.
BadLocusReport certify_bad_locus(const Action& a, const BadLocusClaim& c, int max_scan_degree);

// Scan degree cap from QUOTVER_MAX_SCAN_DEGREE, else the fallback.
int scan_degree_from_env(int fallback);

}  // namespace qv
