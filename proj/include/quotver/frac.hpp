#pragma once

#include "quotver/ring.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qv {

struct Factor {
    Poly poly;
    int exp = 0;
};

// Element of the fraction field of a chart ring, kept as
//   scalar * prod factor_i ^ exp_i        (exp_i may be negative)
// with each factor reduced, free of monomial content, and scalar-normalized
// (monic in PositiveChar, primitive with positive leading coefficient in
// MixedChar). Coordinates appear as single-variable factors. Products and
// quotients only merge factor lists; sums expand over a common denominator.
class Frac {
public:
    explicit Frac(RingPtr ring);  // zero
    static Frac constant(RingPtr ring, const Coef& c);
    static Frac from_poly(RingPtr ring, const Poly& f);
    static Frac var(RingPtr ring, int i);

    const RingPtr& ring() const { return ring_; }
    const Coef& scalar() const { return scalar_; }
    const std::vector<Factor>& factors() const { return factors_; }
    bool is_zero() const { return scalar_.is_zero(); }
    bool is_constant() const { return factors_.empty(); }

    // Expanded numerator (including the scalar) and denominator.
    Poly numerator() const;
    Poly denominator() const;

    Frac operator-() const;
    Frac inverse() const;
    Frac pow(int k) const;
    friend Frac operator*(const Frac& a, const Frac& b);
    friend Frac operator/(const Frac& a, const Frac& b);
    friend Frac operator+(const Frac& a, const Frac& b);
    friend Frac operator-(const Frac& a, const Frac& b);

    // Equality in the fraction field of the chart ring.
    bool equals(const Frac& o) const;
    bool is_zero_in_ring() const;

    // Substitute images[i] (Fracs over `target`) for coordinate i.
    Frac subst(const std::vector<Frac>& images, const RingPtr& target) const;
    // Substitute into a polynomial without reducing it first.
    static Frac subst_poly(const Poly& f, const std::vector<Frac>& images, const RingPtr& target);

    // Residue at a point in F_p; throws NotLocal if a denominator vanishes.
    long long residue(const std::vector<long long>& point) const;
    // Same element with denominators through the point cancelled where the
    // chart ring allows it (powers of p traded for coordinates, exact
    // polynomial cancellation).
    Frac localized(const std::vector<long long>& point) const;
    bool is_unit_at(const std::vector<long long>& point) const { return residue(point) != 0; }
    // Valuation along {v = 0}; kInfiniteValuation for zero.
    // Value at a point with coordinates in F_l (the relation is not
    // checked); nullopt at a pole or when l divides a coefficient denominator.
    std::optional<long long> eval_mod(const std::vector<long long>& point, long long l) const;
    int valuation(int v) const;
    // q with v^k * q = this; throws DivisionError.
    Frac local_divide(int v, int k) const;
    // Divide by a monomial given as exponents per coordinate.
    Frac local_divide_monomial(const std::vector<int>& exps) const;
    // Linear part at the origin (class in m/m^2), coefficients in [0, p).
    std::vector<long long> linear_part() const;

    // Parseable rendering.
    std::string str() const;
    std::size_t term_count() const;

private:
    void absorb(const Poly& f, int e);
    void add_factor(Poly f, int e);
    void canonicalize();
    long long residue_raw(const std::vector<long long>& point) const;
    std::vector<long long> linear_part_raw() const;

    RingPtr ring_;
    Coef scalar_;
    std::vector<Factor> factors_;
};

// Sum of products sum_t coef_t * prod_h pool[h]^{e_{t,h}} as a Frac; the
// common part (minimal exponent of each pool element) stays factored.
struct FactoredTerm {
    Coef coef;
    std::vector<std::pair<int, int>> exps;  // (pool index, exponent)
};
Frac sum_of_products(const RingPtr& ring, const std::vector<Poly>& pool, const std::vector<FactoredTerm>& terms);

}  // namespace qv
