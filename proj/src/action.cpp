#include "quotver/action.hpp"

#include <gmpxx.h>

#include <random>

namespace qv {

Action::Action(RingPtr ring, std::vector<Frac> tau, long long order)
    : ring_(std::move(ring)), tau_(std::move(tau)), order_(order ? order : ring_->p()) {
    if (static_cast<int>(tau_.size()) != ring_->nvars()) throw std::invalid_argument("action needs one image per coordinate");
}

Frac Action::sigma(const Frac& f) const { return f.subst(tau_, ring_); }

Frac Action::sigma_poly(const Poly& f) const { return Frac::subst_poly(f, tau_, ring_); }

Frac Action::I(const Frac& f) const { return sigma(f) - f; }

Frac Action::I_coord(int i) const { return tau_[static_cast<std::size_t>(i)] - Frac::var(ring_, i); }

// sigma^k(f) = f(tau^k) with the coordinate images tau^k composed once; this
// keeps substitutions into f small instead of iterating sigma on f.
std::vector<Frac> Action::iterates(const Frac& f) const {
    std::vector<Frac> out{f};
    std::vector<Frac> img = tau_;
    for (long long k = 1; k < p(); ++k) {
        out.push_back(f.subst(img, ring_));
        if (k + 1 < p())
            for (auto& c : img) c = sigma(c);
    }
    return out;
}

Frac Action::trace(const Frac& f) const {
    auto it = iterates(f);
    Frac acc = it[0];
    for (std::size_t k = 1; k < it.size(); ++k) acc = acc + it[k];
    return acc;
}

Frac Action::norm(const Frac& f) const {
    auto it = iterates(f);
    Frac acc = it[0];
    for (std::size_t k = 1; k < it.size(); ++k) acc = acc * it[k];
    return acc;
}

bool Action::check_order(std::string* detail) const {
    std::vector<Frac> cur = tau_;
    for (long long k = 1; k < p(); ++k) {
        std::vector<Frac> next;
        next.reserve(cur.size());
        for (const auto& c : cur) next.push_back(sigma(c));
        cur = std::move(next);
    }
    for (int i = 0; i < ring_->nvars(); ++i)
        if (!cur[static_cast<std::size_t>(i)].equals(Frac::var(ring_, i))) {
            if (detail) *detail = "sigma^" + std::to_string(p()) + " moves " + ring_->names()[static_cast<std::size_t>(i)];
            return false;
        }
    return true;
}

bool Action::check_relation(std::string* detail) const {
    if (!ring_->mixed()) return true;
    Frac g = sigma_poly(ring_->relation_poly());
    if (!g.is_zero()) {
        if (detail) *detail = "relation not preserved: sigma(G) = " + g.str();
        return false;
    }
    return true;
}

bool Action::fixes_point(const std::vector<long long>& point) const {
    for (int i = 0; i < ring_->nvars(); ++i)
        if (I_coord(i).residue(point) != 0) return false;
    return true;
}

std::vector<Poly> Action::fixed_scheme_generators() const {
    std::vector<Poly> out;
    for (int i = 0; i < ring_->nvars(); ++i) out.push_back(I_coord(i).numerator());
    return out;
}

Action Action::change_coordinates(const RingPtr& target, const std::vector<Poly>& old_in_new,
                                  const std::vector<Poly>& new_in_old) const {
    std::vector<Frac> old_images;
    for (const auto& f : old_in_new) old_images.push_back(Frac::from_poly(target, f));
    // The two maps must be mutually inverse.
    for (std::size_t i = 0; i < new_in_old.size(); ++i) {
        Frac back = Frac::subst_poly(new_in_old[i], old_images, target);
        if (!back.equals(Frac::var(target, static_cast<int>(i))))
            throw std::invalid_argument("coordinate change is not invertible as declared");
    }
    std::vector<Frac> tau;
    for (const auto& w : new_in_old) {
        Frac s = sigma_poly(w);  // sigma(w) over the old chart
        tau.push_back(s.subst(old_images, target));
    }
    return Action(target, std::move(tau), order_);
}

Action Action::shift_origin(const std::vector<long long>& point, const std::vector<std::string>& names) const {
    RingPtr target = ring_->shifted(point, names);
    std::vector<Poly> old_in_new, new_in_old;
    for (int i = 0; i < ring_->nvars(); ++i) {
        old_in_new.push_back(Poly::var(i) + Poly(Coef(point[static_cast<std::size_t>(i)])));
        new_in_old.push_back(Poly::var(i) - Poly(Coef(point[static_cast<std::size_t>(i)])));
    }
    return change_coordinates(target, old_in_new, new_in_old);
}

namespace {

const std::vector<long long>& small_primes() {
    static const std::vector<long long> primes = [] {
        const int n = 50000;
        std::vector<bool> comp(n + 1, false);
        std::vector<long long> out;
        for (int i = 2; i <= n; ++i) {
            if (comp[static_cast<std::size_t>(i)]) continue;
            out.push_back(i);
            for (long long j = 1LL * i * i; j <= n; j += i) comp[static_cast<std::size_t>(j)] = true;
        }
        return out;
    }();
    return primes;
}

// Largest prime factor of n in [1000, 2^31), other than p; 0 if none is found.
long long sample_prime(mpz_class n, long long p) {
    if (n < 0) n = -n;
    if (n == 0) return 0;
    long long best = 0;
    for (long long q : small_primes()) {
        if (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(q)) == 0) continue;
        do {
            mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), static_cast<unsigned long>(q));
        } while (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(q)) != 0);
        if (q >= 1000 && q != p) best = q;
    }
    if (n > 1 && n < mpz_class(2147483647L) && mpz_probab_prime_p(n.get_mpz_t(), 30) > 0) {
        long long c = static_cast<long long>(n.get_si());
        if (c != p && c > best) best = c;
    }
    return best;
}

}  // namespace

Action::SampledCheck Action::check_order_sampled(int samples, std::uint64_t seed) const {
    SampledCheck res;
    if (!ring_->mixed()) {
        res.ok = check_order(&res.detail);
        if (res.ok) res.detail = "exact";
        return res;
    }
    const Ring& r = *ring_;
    const auto& rel = r.ctx().relation;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long long> dist(-1000, 1000);
    const int n = r.nvars();
    long long attempts = 0;
    while (res.samples < samples && attempts < 400LL * samples) {
        ++attempts;
        std::vector<Coef> pt;
        std::vector<long long> raw;
        for (int i = 0; i < n; ++i) {
            raw.push_back(dist(rng));
            pt.emplace_back(raw.back());
        }
        Coef m = r.uniformizer().eval(pt);
        Coef g(0);
        for (std::size_t k = rel.size(); k-- > 0;) g = g * m + rel[k];
        if (!g.is_integer()) continue;
        long long l = sample_prime(g.num(), r.p());
        if (l == 0) continue;
        std::vector<long long> start;
        for (long long x : raw) start.push_back(((x % l) + l) % l);
        std::vector<long long> cur = start;
        bool defined = true;
        for (long long k = 0; k < p() && defined; ++k) {
            std::vector<long long> next;
            for (const auto& t : tau_) {
                auto v = t.eval_mod(cur, l);
                if (!v) {
                    defined = false;
                    break;
                }
                next.push_back(*v);
            }
            cur = std::move(next);
        }
        if (!defined) continue;
        ++res.samples;
        if (cur != start) {
            res.detail = "tau^" + std::to_string(p()) + " moves a point over F_" + std::to_string(l);
            return res;
        }
    }
    if (res.samples < samples) {
        res.detail = "only " + std::to_string(res.samples) + " sample points found";
        return res;
    }
    res.ok = true;
    res.detail = std::to_string(res.samples) + " sampled points over prime fields";
    return res;
}

bool actions_equal_mod_p(const Action& a, const Action& b, std::string* detail) {
    const Ring& ra = *a.ring();
    const Ring& rb = *b.ring();
    const long long p = ra.p();
    if (rb.p() != p) throw std::invalid_argument("actions live over different primes");
    const int rel = ra.mixed() ? ra.relation_var() : -1;
    if (ra.mixed() && rel < 0) throw std::invalid_argument("relation of the first action is not a coordinate");
    // Coordinates of a as polynomials in b's coordinates (0 for the relation coordinate).
    std::vector<Poly> rename;
    for (int i = 0; i < ra.nvars(); ++i) {
        if (i == rel) {
            rename.push_back(Poly());
            continue;
        }
        int j = rb.index_of(ra.names()[static_cast<std::size_t>(i)]);
        rename.push_back(j >= 0 ? Poly::var(j) : Poly());
    }
    auto modp = [p](const Poly& f) {
        return f.map_coeffs([p](const Coef& c) { return Coef(c.mod(p)); });
    };
    for (int j = 0; j < rb.nvars(); ++j) {
        const std::string& name = rb.names()[static_cast<std::size_t>(j)];
        int i = ra.index_of(name);
        if (i < 0 || i == rel) throw std::invalid_argument("coordinate " + name + " has no partner");
        const Frac& fa = a.tau()[static_cast<std::size_t>(i)];
        const Frac& fb = b.tau()[static_cast<std::size_t>(j)];
        Poly na, da;
        try {
            na = modp(fa.numerator().subst(rename));
            da = modp(fa.denominator().subst(rename));
        } catch (const std::domain_error&) {
            if (detail) *detail = "image of " + name + " is not p-integral";
            return false;
        }
        for (int v = 0; v < ra.nvars(); ++v)
            if (rename[static_cast<std::size_t>(v)].is_zero() && v != rel &&
                (fa.numerator().degree_in(v) > 0 || fa.denominator().degree_in(v) > 0)) {
                if (detail) *detail = "image of " + name + " involves " + ra.names()[static_cast<std::size_t>(v)];
                return false;
            }
        Poly nb = modp(fb.numerator()), db = modp(fb.denominator());
        if (da.is_zero() || db.is_zero()) {
            if (detail) *detail = "denominator of " + name + " vanishes mod p";
            return false;
        }
        if (!modp(na * db - nb * da).is_zero()) {
            if (detail) *detail = "images of " + name + " differ mod p";
            return false;
        }
    }
    if (detail) *detail = "images agree mod p";
    return true;
}

CmWitnessResult cm_witness(const Action& a, const Frac& f, const std::vector<long long>& point) {
    CmWitnessResult r;
    r.fixed = a.fixes_point(point);
    if (!r.fixed) throw std::invalid_argument("cm witness point is not fixed by the action");
    Frac t = a.trace(f);
    r.trace = t.str();
    r.trace_zero = t.is_zero();
    r.unit = f.is_unit_at(point);
    r.ok = r.trace_zero && r.unit;
    return r;
}

bool in_monomial_ideal(const Frac& f, const std::vector<std::vector<int>>& gens) {
    if (f.is_zero()) return true;
    for (const auto& g : gens) {
        try {
            f.local_divide_monomial(g);
            return true;
        } catch (const DivisionError&) {
        }
    }
    return false;
}

ClaimResult check_expansion_claim(const Action& a, const ExpansionClaim& c) {
    ClaimResult res;
    const RingPtr& ring = a.ring();
    Frac i = a.I(c.target);
    Frac q(ring);
    try {
        q = i.local_divide_monomial(c.factor);
    } catch (const DivisionError& e) {
        res.detail = std::string("factor does not divide I: ") + e.what();
        return res;
    } catch (const NotLocal& e) {
        res.detail = e.what();
        return res;
    }
    std::vector<long long> origin(static_cast<std::size_t>(ring->nvars()), 0);
    Frac lhs = c.denominator ? q * *c.denominator : q;
    Frac diff = lhs - c.principal;
    if (c.error.empty()) {
        res.ok = diff.is_zero();
        if (!res.ok) res.detail = "exact claim differs by " + diff.str();
        return res;
    }
    // Denominators must be units along the error divisor, else the
    // difference is not an element of the local ring there.
    for (const auto& f : diff.factors())
        if (f.exp < 0)
            for (const auto& g : c.error)
                for (std::size_t v = 0; v < g.size(); ++v)
                    if (g[v] > 0 && ring->valuation(f.poly, static_cast<int>(v)) > 0) {
                        res.detail = "difference has a pole along the error divisor: " + diff.str();
                        return res;
                    }
    res.ok = in_monomial_ideal(diff, c.error);
    if (!res.ok) res.detail = "difference outside the error ideal: " + diff.str();
    return res;
}

}  // namespace qv
