#pragma once

#include "quotver/poly.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qv {

enum class Mode { PositiveChar, MixedChar };

// Thrown when a local operation is asked for at a point where a denominator
// vanishes.
struct NotLocal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a requested division by a coordinate does not go through.
struct DivisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Characteristic data shared by every chart of a scenario.
struct RingContext {
    long long p = 2;
    Mode mode = Mode::PositiveChar;
    // Monic relation g(t) = t^d + c_{d-1} t^{d-1} + ... + c_0 satisfied by the
    // distinguished element (MixedChar only), coefficients from c_0 upwards
    // with the leading 1 included.
    std::vector<Coef> relation;
    std::string symbol = "e2";

    static RingContext positive(long long p);
    // Eisenstein polynomial e^p + a_{p-1} e^{p-1} + ... + a_1 e + p from (a_1..a_{p-1}).
    static RingContext eisenstein(long long p, const std::vector<Coef>& a);

    bool is_eisenstein() const;
    std::string relation_str() const;
};

class Ring;
using RingPtr = std::shared_ptr<const Ring>;

constexpr int kInfiniteValuation = -1;

// Chart ring: polynomials in the chart coordinates, modulo G = g(m(v)) in
// MixedChar mode where m is the uniformizer expression.
class Ring : public std::enable_shared_from_this<Ring> {
public:
    Ring(RingContext ctx, std::vector<std::string> names, Poly uniformizer = Poly());
    static RingPtr make(RingContext ctx, std::vector<std::string> names, Poly uniformizer = Poly());

    const RingContext& ctx() const { return ctx_; }
    long long p() const { return ctx_.p; }
    bool mixed() const { return ctx_.mode == Mode::MixedChar; }
    int nvars() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    int index_of(const std::string& name) const;  // -1 if absent
    const Poly& uniformizer() const { return m_; }
    const Poly& relation_poly() const { return G_; }
    // Index of the coordinate equal to the uniformizer, or -1.
    int relation_var() const { return relation_var_; }

    Poly reduce(const Poly& f) const;
    bool is_zero(const Poly& f) const { return reduce(f).is_zero(); }
    bool equal(const Poly& a, const Poly& b) const { return is_zero(a - b); }

    // One division step by coordinate v; nullopt when f is not in (v).
    std::optional<Poly> divide_var(const Poly& f, int v) const;
    // v^k * q = f; throws DivisionError with the obstruction otherwise.
    Poly local_divide(const Poly& f, int v, int k) const;
    int valuation(const Poly& f, int v) const;  // kInfiniteValuation for zero
    // Valuation of the integer p along {v = 0}.
    int p_valuation(int v) const;
    // p / v^{p_valuation(v)} as a chart polynomial.
    const Poly& p_cofactor(int v) const;

    long long residue(const Poly& f, const std::vector<long long>& point) const;
    // Linear part at the origin, coefficients in [0, p).
    std::vector<long long> linear_part(const Poly& f) const;
    // New ring with coordinates v_i' = v_i - point_i.
    RingPtr shifted(const std::vector<long long>& point, const std::vector<std::string>& new_names) const;
    // Ring for new coordinates w, given the old coordinates as polynomials
    // in w (an invertible polynomial change of coordinates).
    RingPtr transformed(const std::vector<Poly>& old_in_new, const std::vector<std::string>& new_names) const;
    // Same ring with renamed coordinates.
    RingPtr renamed(const std::vector<std::string>& new_names) const;

    Poly var(int i) const { return Poly::var(i); }
    std::string str(const Poly& f) const { return f.str(names_); }
    // Reduced copy of the relation restricted to v = 0.
    Poly relation_at_zero(int v) const;

private:
    std::optional<Poly> divide_var_raw(const Poly& f, int v) const;

    RingContext ctx_;
    std::vector<std::string> names_;
    Poly m_;
    Poly G_;
    int relation_var_ = -1;
    mutable std::recursive_mutex cache_mu_;
    mutable std::map<int, Poly> rewrite_cache_;  // v -> (G - G(0)) / v
    mutable std::map<int, std::pair<int, Poly>> pcof_cache_;
};

}  // namespace qv
