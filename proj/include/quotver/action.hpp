#pragma once

#include "quotver/frac.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qv {

// Z/p action on a chart, stored through the coordinate images of
// tau = sigma^{-1}; sigma acts on functions by substituting these images.
class Action {
public:
    // `order` defaults to the characteristic p of the ring.
    Action(RingPtr ring, std::vector<Frac> tau, long long order = 0);

    const RingPtr& ring() const { return ring_; }
    const std::vector<Frac>& tau() const { return tau_; }
    long long p() const { return order_; }

    Frac sigma(const Frac& f) const;
    Frac sigma_poly(const Poly& f) const;
    Frac I(const Frac& f) const;
    Frac I_coord(int i) const;
    Frac trace(const Frac& f) const;
    Frac norm(const Frac& f) const;
    // f, sigma(f), ..., sigma^{p-1}(f).
    std::vector<Frac> iterates(const Frac& f) const;

    // sigma^p fixes every coordinate; `detail` receives the first failure.
    bool check_order(std::string* detail = nullptr) const;
    // sigma^p fixes sampled points over prime fields F_l (l != p) on which
    // the chart relation holds; each sample iterates the point map of tau.
    // Used in MixedChar, where exact composition grows too fast.
    struct SampledCheck {
        bool ok = false;
        int samples = 0;
        std::string detail;
    };
    SampledCheck check_order_sampled(int samples, std::uint64_t seed = 1) const;
    // sigma maps the chart relation to zero (MixedChar); trivially true otherwise.
    bool check_relation(std::string* detail = nullptr) const;
    // Every I(v_i) vanishes at the point.
    bool fixes_point(const std::vector<long long>& point) const;

    // Numerators of I(v_i).
    std::vector<Poly> fixed_scheme_generators() const;

    // Change of coordinates: old coordinates as polynomials in the new ones,
    // and new coordinates as polynomials in the old ones.
    Action change_coordinates(const RingPtr& target, const std::vector<Poly>& old_in_new,
                              const std::vector<Poly>& new_in_old) const;
    // New coordinates v' = v - point.
    Action shift_origin(const std::vector<long long>& point, const std::vector<std::string>& names) const;

private:
    RingPtr ring_;
    std::vector<Frac> tau_;
    long long order_;
};

struct CmWitnessResult {
    bool ok = false;
    bool fixed = false;
    bool trace_zero = false;
    bool unit = false;
    std::string trace;
};
// Trace-zero element that is a unit at a fixed point.
CmWitnessResult cm_witness(const Action& a, const Frac& f, const std::vector<long long>& point);

// I(target) = M * (g/h + error), error in the ideal of the monomial generators.
struct ExpansionClaim {
    std::string id;
    Frac target;
    std::vector<int> factor;            // exponent per coordinate
    Frac principal;                     // g
    std::optional<Frac> denominator;    // h
    std::vector<std::vector<int>> error;  // monomial generators; empty = exact
};

struct ClaimResult {
    bool ok = false;
    std::string detail;
};
ClaimResult check_expansion_claim(const Action& a, const ExpansionClaim& c);

// Each image of `b` equals the image of the same-named coordinate of `a`
// after setting the relation coordinate of `a` to 0 and reducing mod p.
// Throws std::invalid_argument when a coordinate of `b` has no partner.
bool actions_equal_mod_p(const Action& a, const Action& b, std::string* detail = nullptr);

// Membership of f in the ideal generated by the monomials at the origin
// (sufficient test: divisibility by one generator).
bool in_monomial_ideal(const Frac& f, const std::vector<std::vector<int>>& gens);

}  // namespace qv
