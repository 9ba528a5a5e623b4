#include "quotver/blowup.hpp"

#include "quotver/parse.hpp"

#include <algorithm>
#include <set>

namespace qv {

namespace {

std::vector<Frac> transport(const std::vector<Frac>& fs, const std::vector<Frac>& images, const RingPtr& target) {
    std::vector<Frac> out;
    out.reserve(fs.size());
    for (const auto& f : fs) out.push_back(f.subst(images, target));
    return out;
}

std::vector<Frac> identity_images(const RingPtr& r) {
    std::vector<Frac> out;
    for (int i = 0; i < r->nvars(); ++i) out.push_back(Frac::var(r, i));
    return out;
}

// Divisor table of a child chart related to the parent by `images`.
std::map<std::string, Frac> transport_divisors(const std::map<std::string, Frac>& divisors,
                                               const std::vector<Frac>& images, const RingPtr& target) {
    std::map<std::string, Frac> out;
    for (const auto& [sym, f] : divisors) {
        Frac g = f.subst(images, target);
        if (!g.is_constant()) out.emplace(sym, g);
    }
    return out;
}

}  // namespace

Chart make_root_chart(const std::string& name, const Action& action, std::map<std::string, Frac> divisors) {
    Chart c{name, 0, action, std::move(divisors), "", "root", {}, {}};
    return c;
}

Chart blowup_chart(const Chart& parent, const std::vector<int>& center, int kept, const std::vector<std::string>& names,
                   const std::string& child_name, const std::string& exceptional, PullbackTable* pullbacks) {
    const Ring& pr = *parent.ring();
    const int n = pr.nvars();
    if (center.size() < 2 || static_cast<int>(center.size()) > n) throw std::invalid_argument("blow-up center needs 2 or more coordinates");
    if (std::find(center.begin(), center.end(), kept) == center.end())
        throw std::invalid_argument("kept coordinate is not part of the center");
    if (static_cast<int>(names.size()) != n) throw std::invalid_argument("blow-up chart needs one name per coordinate");
    std::set<int> cs(center.begin(), center.end());
    if (cs.size() != center.size()) throw std::invalid_argument("repeated center coordinate");

    std::vector<Poly> old_in_new;
    for (int i = 0; i < n; ++i) {
        if (cs.count(i) && i != kept) {
            old_in_new.push_back(Poly::var(i) * Poly::var(kept));
        } else {
            old_in_new.push_back(Poly::var(i));
        }
    }
    RingPtr child = pr.mixed() ? Ring::make(pr.ctx(), names, pr.uniformizer().subst(old_in_new)) : Ring::make(pr.ctx(), names);
    std::vector<Frac> images;
    for (const auto& f : old_in_new) images.push_back(Frac::from_poly(child, f));

    const auto& ptau = parent.action.tau();
    std::vector<Frac> tau;
    Frac tk = ptau[static_cast<std::size_t>(kept)].subst(images, child);
    for (int i = 0; i < n; ++i) {
        if (cs.count(i) && i != kept) {
            tau.push_back(ptau[static_cast<std::size_t>(i)].subst(images, child) / tk);
        } else if (i == kept) {
            tau.push_back(tk);
        } else {
            tau.push_back(ptau[static_cast<std::size_t>(i)].subst(images, child));
        }
    }

    Chart c{child_name, parent.stage + 1, Action(child, std::move(tau), parent.action.p()), {}, parent.name, "", {}, {}};
    std::string cen;
    for (int i : center) cen += (cen.empty() ? "" : ",") + pr.names()[static_cast<std::size_t>(i)];
    c.provenance = "blow-up of " + parent.name + " along (" + cen + "), chart " + names[static_cast<std::size_t>(kept)] + " kept";
    c.parent_in_self = images;
    auto pid = identity_images(parent.ring());
    for (int i = 0; i < n; ++i) {
        if (cs.count(i) && i != kept) {
            c.self_in_parent.push_back(pid[static_cast<std::size_t>(i)] / pid[static_cast<std::size_t>(kept)]);
        } else {
            c.self_in_parent.push_back(pid[static_cast<std::size_t>(i)]);
        }
    }
    for (const auto& [sym, f] : parent.divisors) {
        Frac g = f.subst(images, child);
        int k = g.valuation(kept);
        if (pullbacks) (*pullbacks)[sym] = k;
        Frac strict = k > 0 ? g.local_divide(kept, k) : g;
        if (!strict.is_constant()) c.divisors.emplace(sym, strict);
    }
    if (c.divisors.count(exceptional)) throw std::invalid_argument("exceptional symbol " + exceptional + " already in use");
    c.divisors.emplace(exceptional, Frac::var(child, kept));
    return c;
}

Chart shifted_chart(const Chart& parent, const std::vector<long long>& point, const std::vector<std::string>& names,
                    const std::string& child_name) {
    std::vector<std::string> old_in_new, new_in_old;
    const auto& pn = parent.ring()->names();
    for (std::size_t i = 0; i < point.size(); ++i) {
        old_in_new.push_back(names[i] + " + (" + std::to_string(point[i]) + ")");
        new_in_old.push_back(pn[i] + " - (" + std::to_string(point[i]) + ")");
    }
    Chart c = changed_chart(parent, old_in_new, new_in_old, names, child_name);
    std::string pt;
    for (auto x : point) pt += (pt.empty() ? "" : ",") + std::to_string(x);
    c.provenance = "shift of " + parent.name + " to (" + pt + ")";
    return c;
}

Chart changed_chart(const Chart& parent, const std::vector<std::string>& old_in_new,
                    const std::vector<std::string>& new_in_old, const std::vector<std::string>& names,
                    const std::string& child_name) {
    const Ring& pr = *parent.ring();
    if (static_cast<int>(old_in_new.size()) != pr.nvars() || new_in_old.size() != old_in_new.size() ||
        names.size() != old_in_new.size())
        throw std::invalid_argument("coordinate change arity mismatch");
    std::vector<Poly> oin, nio;
    for (const auto& s : old_in_new) oin.push_back(parse_poly(s, names));
    for (const auto& s : new_in_old) nio.push_back(parse_poly(s, pr.names()));
    RingPtr child = pr.transformed(oin, names);
    Chart c{child_name, parent.stage, parent.action.change_coordinates(child, oin, nio), {}, parent.name,
            "coordinate change of " + parent.name, {}, {}};
    for (const auto& f : oin) c.parent_in_self.push_back(Frac::from_poly(child, f));
    for (const auto& f : nio) c.self_in_parent.push_back(Frac::from_poly(parent.ring(), f));
    c.divisors = transport_divisors(parent.divisors, c.parent_in_self, child);
    return c;
}

std::vector<Frac> transition_map(const ChartLookup& charts, const Chart& a, const Chart& b) {
    auto chain = [&](const Chart& c) {
        std::vector<const Chart*> out{&c};
        while (!out.back()->parent.empty()) {
            auto it = charts.find(out.back()->parent);
            if (it == charts.end()) throw std::invalid_argument("unknown parent chart " + out.back()->parent);
            out.push_back(it->second);
        }
        return out;
    };
    auto ca = chain(a), cb = chain(b);
    const Chart* common = nullptr;
    std::size_t ia = 0, ib = 0;
    for (ia = 0; ia < ca.size() && !common; ++ia)
        for (ib = 0; ib < cb.size(); ++ib)
            if (ca[ia]->name == cb[ib]->name) {
                common = ca[ia];
                break;
            }
    if (!common) throw std::invalid_argument("charts " + a.name + " and " + b.name + " have no common ancestor");
    --ia;
    // b's coordinates as functions on the ancestor.
    std::vector<Frac> f = identity_images(b.ring());
    for (std::size_t k = 0; k < ib; ++k) f = transport(f, cb[k]->self_in_parent, cb[k + 1]->ring());
    // Ancestor coordinates as functions on a, composed downward.
    for (std::size_t k = ia; k-- > 0;) f = transport(f, ca[k]->parent_in_self, ca[k]->ring());
    return f;
}

TransitionResult verify_transition(const ChartLookup& charts, const Chart& a, const std::vector<long long>& pa,
                                   const Chart& b, const std::vector<long long>& pb) {
    if (a.stage != b.stage) throw std::invalid_argument("charts " + a.name + " and " + b.name + " are from different stages");
    TransitionResult r;
    const long long p = a.ring()->p();
    std::vector<Frac> f;
    try {
        f = transition_map(charts, a, b);
    } catch (const std::domain_error& e) {
        r.detail = e.what();
        return r;
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
        long long v;
        try {
            v = f[i].residue(pa);
        } catch (const NotLocal&) {
            r.detail = "coordinate " + b.ring()->names()[i] + " of " + b.name + " has a pole at the point";
            return r;
        }
        long long want = ((pb[i] % p) + p) % p;
        if (v != want) {
            r.detail = "coordinate " + b.ring()->names()[i] + " maps to " + std::to_string(v) + ", expected " + std::to_string(want);
            return r;
        }
    }
    // Divisors through the point must match up to units.
    auto through = [](const Chart& c, const std::vector<long long>& pt) {
        std::set<std::string> s;
        for (const auto& [sym, g] : c.divisors)
            if (g.residue(pt) == 0) s.insert(sym);
        return s;
    };
    auto sa = through(a, pa), sb = through(b, pb);
    if (sa != sb) {
        r.detail = "divisors through the points differ";
        return r;
    }
    for (const auto& sym : sb) {
        Frac g = b.divisors.at(sym).subst(f, a.ring());
        Frac ratio = g / a.divisors.at(sym);
        try {
            if (ratio.residue(pa) == 0) {
                r.detail = "divisor " + sym + " has different defining functions";
                return r;
            }
        } catch (const NotLocal&) {
            r.detail = "divisor " + sym + " has different defining functions";
            return r;
        }
    }
    r.ok = true;
    r.detail = "identified";
    return r;
}

}  // namespace qv
