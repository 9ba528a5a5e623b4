#include "quotver/ring.hpp"

#include <sstream>

namespace qv {

RingContext RingContext::positive(long long p) {
    RingContext c;
    c.p = p;
    c.mode = Mode::PositiveChar;
    return c;
}

RingContext RingContext::eisenstein(long long p, const std::vector<Coef>& a) {
    if (static_cast<long long>(a.size()) != p - 1)
        throw std::invalid_argument("Eisenstein data needs p-1 coefficients a_1..a_{p-1}");
    RingContext c;
    c.p = p;
    c.mode = Mode::MixedChar;
    c.relation.push_back(Coef(p));
    for (const auto& x : a) c.relation.push_back(x);
    c.relation.push_back(Coef(1));
    if (!c.is_eisenstein()) throw std::invalid_argument("relation is not Eisenstein at p");
    return c;
}

bool RingContext::is_eisenstein() const {
    if (mode != Mode::MixedChar || relation.size() < 2) return false;
    if (!relation.back().is_one()) return false;
    if (relation[0] != Coef(p)) return false;
    for (std::size_t i = 1; i + 1 < relation.size(); ++i)
        if (relation[i].mod(p) != 0) return false;
    return true;
}

std::string RingContext::relation_str() const {
    if (mode != Mode::MixedChar) return "char " + std::to_string(p);
    Poly g;
    for (std::size_t k = 0; k < relation.size(); ++k)
        g += Poly::monomial(Mono::var(0, static_cast<unsigned>(k)), relation[k]);
    return g.str({symbol});
}

Ring::Ring(RingContext ctx, std::vector<std::string> names, Poly uniformizer)
    : ctx_(std::move(ctx)), names_(std::move(names)), m_(std::move(uniformizer)) {
    if (names_.empty() || static_cast<int>(names_.size()) > Mono::kMaxVars)
        throw std::invalid_argument("chart must have between 1 and 4 coordinates");
    for (std::size_t i = 0; i < names_.size(); ++i)
        for (std::size_t j = i + 1; j < names_.size(); ++j)
            if (names_[i] == names_[j]) throw std::invalid_argument("duplicate coordinate name " + names_[i]);
    if (ctx_.p < 2) throw std::invalid_argument("p must be a prime");
    if (ctx_.mode == Mode::MixedChar) {
        if (m_.is_zero()) throw std::invalid_argument("mixed characteristic chart needs a uniformizer");
        if (ctx_.relation.empty() || !ctx_.relation.back().is_one())
            throw std::invalid_argument("relation must be monic");
        Poly mk(Coef(1));
        for (std::size_t k = 0; k < ctx_.relation.size(); ++k) {
            G_ += mk.scaled(ctx_.relation[k]);
            if (k + 1 < ctx_.relation.size()) mk = mk * m_;
        }
        if (m_.size() == 1 && m_.lead().c.is_one() && m_.lead().m.deg == 1)
            for (int i = 0; i < nvars(); ++i)
                if (m_.lead().m == Mono::var(i)) relation_var_ = i;
        if (G_.lead().c.mod(ctx_.p) == 0)
            throw std::invalid_argument("relation leading coefficient is not a unit");
    }
}

RingPtr Ring::make(RingContext ctx, std::vector<std::string> names, Poly uniformizer) {
    return std::make_shared<const Ring>(std::move(ctx), std::move(names), std::move(uniformizer));
}

int Ring::index_of(const std::string& name) const {
    for (int i = 0; i < nvars(); ++i)
        if (names_[i] == name) return i;
    return -1;
}

Poly Ring::reduce(const Poly& f) const {
    if (!mixed()) {
        const long long p = ctx_.p;
        return f.map_coeffs([p](const Coef& c) { return Coef(c.mod(p)); });
    }
    const Mono lm = G_.lead().m;
    bool any = false;
    for (const auto& t : f.terms())
        if (lm.divides(t.m)) {
            any = true;
            break;
        }
    if (!any) return f;
    return divrem(f, G_).second;
}

Poly Ring::relation_at_zero(int v) const { return G_.at_zero(v); }

std::optional<Poly> Ring::divide_var_raw(const Poly& f, int v) const {
    Poly f0 = f.at_zero(v);
    Poly f1 = (f - f0).div_monomial(Mono::var(v));
    if (!mixed()) {
        if (!f0.is_zero()) return std::nullopt;
        return reduce(f1);
    }
    const int a = m_.min_exp(v);
    if (a > 0) {
        // Modulo v the relation becomes its constant term c0. A p-adic unit
        // c0 makes v invertible (no divisor); otherwise f0 = c0 * h with h
        // p-integral, and G - c0 is divisible by m, hence by v.
        const Coef& c0 = ctx_.relation[0];
        if (c0.is_zero() || c0.valuation(ctx_.p) == 0) return std::nullopt;
        if (f0.is_zero()) return reduce(f1);
        Poly h = f0.scaled(Coef(1) / c0);
        for (const auto& t : h.terms())
            if (t.c.valuation(ctx_.p) < 0) return std::nullopt;
        Poly rv;
        {
            std::lock_guard<std::recursive_mutex> lock(cache_mu_);
            auto it = rewrite_cache_.find(v);
            if (it == rewrite_cache_.end())
                it = rewrite_cache_.emplace(v, (G_ - Poly(c0)).div_monomial(Mono::var(v))).first;
            rv = it->second;
        }
        return reduce(f1 - rv * h);
    }
    if (f0.is_zero()) return reduce(f1);
    Poly g0 = G_.at_zero(v);
    Poly h;
    if (!divides_exactly(g0, f0, &h)) return std::nullopt;
    Poly g1 = (G_ - g0).div_monomial(Mono::var(v));
    return reduce(f1 - g1 * h);
}

std::optional<Poly> Ring::divide_var(const Poly& f, int v) const {
    if (v < 0 || v >= nvars()) throw std::out_of_range("coordinate index out of range");
    return divide_var_raw(reduce(f), v);
}

Poly Ring::local_divide(const Poly& f, int v, int k) const {
    if (k < 0) throw std::invalid_argument("negative division exponent");
    Poly q = reduce(f);
    for (int i = 0; i < k; ++i) {
        auto next = divide_var_raw(q, v);
        if (!next) {
            Poly f0 = q.at_zero(v);
            std::string obstruction = reduce(f0).is_zero() ? str(q) : str(f0);
            if (obstruction.size() > 160) obstruction = obstruction.substr(0, 160) + "...";
            bool absent = mixed() && m_.min_exp(v) == 0;
            throw DivisionError(std::string(absent ? "division by coordinate absent from uniformizer monomial and "
                                                     "nonzero residue"
                                                   : "not divisible") +
                                ": " + names_[v] + "^" + std::to_string(i + 1) + " does not divide; obstruction " +
                                obstruction);
        }
        q = std::move(*next);
    }
    Poly check = q.times_monomial(Mono::var(v, static_cast<unsigned>(k))) - f;
    if (!is_zero(check)) throw std::logic_error("local_divide roundtrip failed");
    return q;
}

int Ring::valuation(const Poly& f, int v) const {
    Poly q = reduce(f);
    if (q.is_zero()) return kInfiniteValuation;
    int k = 0;
    while (true) {
        auto next = divide_var_raw(q, v);
        if (!next) return k;
        if (next->is_zero()) throw std::logic_error("nonzero element became zero under division");
        q = std::move(*next);
        if (++k > 100000) throw std::logic_error("valuation did not terminate");
    }
}

int Ring::p_valuation(int v) const {
    if (!mixed()) return 0;
    p_cofactor(v);
    std::lock_guard<std::recursive_mutex> lock(cache_mu_);
    return pcof_cache_.at(v).first;
}

const Poly& Ring::p_cofactor(int v) const {
    std::lock_guard<std::recursive_mutex> lock(cache_mu_);
    auto it = pcof_cache_.find(v);
    if (it != pcof_cache_.end()) return it->second.second;
    Poly q(Coef(ctx_.p));
    int k = 0;
    if (mixed()) {
        while (true) {
            auto next = divide_var_raw(q, v);
            if (!next) break;
            q = std::move(*next);
            ++k;
        }
    }
    return pcof_cache_.emplace(v, std::make_pair(k, q)).first->second.second;
}

long long Ring::residue(const Poly& f, const std::vector<long long>& point) const {
    if (static_cast<int>(point.size()) != nvars()) throw std::invalid_argument("point dimension mismatch");
    return f.eval_mod(point, ctx_.p);
}

std::vector<long long> Ring::linear_part(const Poly& f) const {
    Poly r = reduce(f);
    if (r.constant_term().mod(ctx_.p) != 0) throw std::domain_error("not in maximal ideal");
    std::vector<long long> out(static_cast<std::size_t>(nvars()), 0);
    for (int i = 0; i < nvars(); ++i) out[static_cast<std::size_t>(i)] = r.coeff(Mono::var(i)).mod(ctx_.p);
    return out;
}

RingPtr Ring::shifted(const std::vector<long long>& point, const std::vector<std::string>& new_names) const {
    if (static_cast<int>(point.size()) != nvars()) throw std::invalid_argument("point dimension mismatch");
    std::vector<Poly> images;
    for (int i = 0; i < nvars(); ++i) images.push_back(Poly::var(i) + Poly(Coef(point[static_cast<std::size_t>(i)])));
    return transformed(images, new_names.empty() ? names_ : new_names);
}

RingPtr Ring::transformed(const std::vector<Poly>& old_in_new, const std::vector<std::string>& new_names) const {
    if (static_cast<int>(old_in_new.size()) != nvars()) throw std::invalid_argument("coordinate change arity mismatch");
    if (!mixed()) return make(ctx_, new_names);
    Poly m = m_.subst(old_in_new);
    RingContext ctx = ctx_;
    // A translated distinguished coordinate t + c is absorbed into the
    // relation: g(t + c) becomes the new relation and the uniformizer is t.
    if (m.size() == 2 && m.lead().m.deg == 1 && m.lead().c.is_one() && m.terms()[1].m.is_one()) {
        Coef c = m.terms()[1].c;
        int v = 0;
        while (m.lead().m.exp(v) == 0) ++v;
        Poly t = Poly::var(0) + Poly(c);
        Poly g;
        Poly tk(Coef(1));
        for (const auto& a : ctx_.relation) {
            g += tk.scaled(a);
            tk = tk * t;
        }
        ctx.relation.assign(ctx_.relation.size(), Coef(0));
        for (const auto& term : g.terms()) ctx.relation[static_cast<std::size_t>(term.m.exp(0))] = term.c;
        m = Poly::var(v);
    }
    return make(ctx, new_names, m);
}

RingPtr Ring::renamed(const std::vector<std::string>& new_names) const {
    if (static_cast<int>(new_names.size()) != nvars()) throw std::invalid_argument("rename dimension mismatch");
    return make(ctx_, new_names, m_);
}

}  // namespace qv
