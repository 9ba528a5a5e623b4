#include "quotver/singularity.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace qv {

namespace {

long long md(long long a, long long r) { return ((a % r) + r) % r; }

}  // namespace

SingularityType::SingularityType(long long r_, std::vector<long long> weights) : r(r_), b(std::move(weights)) {
    if (r < 1) throw std::invalid_argument("order must be positive");
    for (auto& x : b) x = md(x, r);
}

SingularityType SingularityType::canonical() const {
    std::vector<long long> best;
    for (long long c = 1; c < std::max<long long>(r, 2); ++c) {
        if (std::gcd(c, r) != 1) continue;
        std::vector<long long> w;
        for (auto x : b) w.push_back(md(c * x, r));
        std::sort(w.begin(), w.end());
        if (best.empty() || w < best) best = w;
    }
    return SingularityType(r, best);
}

bool SingularityType::equivalent(const SingularityType& o) const {
    return r == o.r && b.size() == o.b.size() && canonical().b == o.canonical().b;
}

bool SingularityType::well_formed(std::string* why) const {
    for (std::size_t j = 0; j < b.size(); ++j) {
        long long g = r;
        for (std::size_t k = 0; k < b.size(); ++k)
            if (k != j) g = std::gcd(g, b[k]);
        if (g != 1) {
            if (why) {
                std::ostringstream os;
                os << "gcd(" << r;
                for (std::size_t k = 0; k < b.size(); ++k)
                    if (k != j) os << "," << b[k];
                os << ")=" << g;
                *why = os.str();
            }
            return false;
        }
    }
    return true;
}

std::string SingularityType::str() const {
    std::ostringstream os;
    os << "1/" << r << "(";
    for (std::size_t i = 0; i < b.size(); ++i) os << (i ? "," : "") << b[i];
    os << ")";
    return os.str();
}

std::string to_string(ReidTai v) {
    switch (v) {
        case ReidTai::Terminal:
            return "terminal";
        case ReidTai::Canonical:
            return "canonical";
        case ReidTai::NotCanonical:
            return "not canonical";
    }
    return "?";
}

ReidTaiResult reid_tai(const SingularityType& t) {
    std::string why;
    if (!t.well_formed(&why)) throw std::invalid_argument("type " + t.str() + " is not well formed: " + why);
    ReidTaiResult res;
    bool terminal = true, canonical = true;
    for (long long i = 1; i < t.r; ++i) {
        long long s = 0;
        for (auto x : t.b) s += md(i * x, t.r);
        res.sums.push_back(s);
        if (s <= t.r) terminal = false;
        if (s < t.r) canonical = false;
    }
    res.verdict = terminal ? ReidTai::Terminal : canonical ? ReidTai::Canonical : ReidTai::NotCanonical;
    return res;
}

PairResult reid_tai_pair(const SingularityType& t, const std::vector<mpq_class>& c) {
    PairResult res;
    if (c.size() != t.b.size()) throw std::invalid_argument("one coefficient per weight required");
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (c[j] >= 1) {
            res.reason = "c_" + std::to_string(j + 1) + " >= 1";
            return res;
        }
        for (std::size_t k = j + 1; k < c.size(); ++k)
            if (c[j] + c[k] >= 1) {
                res.reason = "c_" + std::to_string(j + 1) + " + c_" + std::to_string(k + 1) + " >= 1";
                return res;
            }
    }
    res.ok = true;
    for (long long i = 1; i < t.r; ++i) {
        mpq_class s = 0;
        for (std::size_t j = 0; j < c.size(); ++j) s += (1 - c[j]) * mpq_class(static_cast<long>(md(i * t.b[j], t.r)));
        res.sums.push_back(s);
        if (s <= static_cast<long>(t.r) && res.ok) {
            res.ok = false;
            res.reason = "weighted sum " + s.get_str() + " <= " + std::to_string(t.r) + " at i=" + std::to_string(i);
        }
    }
    return res;
}

std::string to_string(MupOutcome o) {
    switch (o) {
        case MupOutcome::Regular:
            return "regular";
        case MupOutcome::Toric:
            return "toric";
        case MupOutcome::Inapplicable:
            return "inapplicable";
    }
    return "?";
}

std::string to_string(RamKind k) {
    switch (k) {
        case RamKind::Unramified:
            return "unramified";
        case RamKind::Wild:
            return "wild";
        case RamKind::Fierce:
            return "fierce";
    }
    return "?";
}

int rank_mod_p(std::vector<std::vector<long long>> m, long long p) {
    int rank = 0;
    const int rows = static_cast<int>(m.size());
    const int cols = rows ? static_cast<int>(m[0].size()) : 0;
    for (int c = 0; c < cols && rank < rows; ++c) {
        int piv = -1;
        for (int r = rank; r < rows; ++r)
            if (md(m[r][c], p)) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(m[rank], m[piv]);
        long long inv = mod_inverse(md(m[rank][c], p), p);
        for (auto& x : m[rank]) x = md(x * inv, p);
        for (int r = 0; r < rows; ++r)
            if (r != rank && md(m[r][c], p)) {
                long long f = md(m[r][c], p);
                for (int k = 0; k < cols; ++k) m[r][k] = md(m[r][k] - f * m[rank][k], p);
            }
        ++rank;
    }
    return rank;
}

bool eigenvalues_mod_p(const std::vector<std::vector<long long>>& m, long long p, std::vector<long long>* eig) {
    const std::size_t n = m.size();
    std::vector<long long> out;
    for (long long lam = 0; lam < p; ++lam) {
        auto a = m;
        for (std::size_t i = 0; i < n; ++i) a[i][i] = md(a[i][i] - lam, p);
        int nullity = static_cast<int>(n) - rank_mod_p(a, p);
        for (int k = 0; k < nullity; ++k) out.push_back(lam);
    }
    if (out.size() != n) return false;
    // Diagonal order for triangular matrices, sorted otherwise.
    bool upper = true, lower = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i > j && md(m[i][j], p)) upper = false;
            if (i < j && md(m[i][j], p)) lower = false;
        }
    if (upper || lower) {
        out.clear();
        for (std::size_t i = 0; i < n; ++i) out.push_back(md(m[i][i], p));
    }
    *eig = out;
    return true;
}

MupReport check_mup(const Action& a, const Frac& e, const Frac& s) {
    const RingPtr& ring = a.ring();
    const long long p = ring->p();
    const int n = ring->nvars();
    std::vector<long long> origin(static_cast<std::size_t>(n), 0);
    MupReport rep;
    rep.e = e;
    rep.s = s;
    if (!a.fixes_point(origin)) {
        rep.reason = "point is not fixed by G";
        return rep;
    }
    try {
        if (e.residue(origin) != 0 || s.residue(origin) != 0) {
            rep.reason = "e and s must lie in the maximal ideal";
            return rep;
        }
    } catch (const NotLocal&) {
        rep.reason = "e or s is not regular at the point";
        return rep;
    }
    // (a) I(s) = e s u with u a unit.
    Frac u = a.I(s) / (e * s);
    try {
        rep.unit_residue = u.residue(origin);
    } catch (const NotLocal&) {
        rep.reason = "I(s) is not divisible by e*s";
        return rep;
    }
    if (rep.unit_residue == 0) {
        rep.reason = "I(s)/(e s) is not a unit";
        return rep;
    }
    rep.unit_condition = true;
    // (b) I(v_i) in (e).
    std::vector<Frac> q;
    for (int i = 0; i < n; ++i) {
        Frac qi = a.I_coord(i) / e;
        try {
            qi.residue(origin);
        } catch (const NotLocal&) {
            rep.reason = "I(" + ring->names()[static_cast<std::size_t>(i)] + ") is not in (e)";
            return rep;
        }
        q.push_back(qi);
    }
    rep.ideal_condition = true;
    // (c) p in e^{p-1} m.
    if (ring->mixed()) {
        Frac r = Frac::constant(ring, Coef(p)) / e.pow(static_cast<int>(p - 1));
        long long v;
        try {
            v = r.residue(origin);
        } catch (const NotLocal&) {
            rep.reason = "p is not in (e^{p-1})";
            return rep;
        }
        if (v != 0) {
            rep.reason = "p is in (e^{p-1}) but not in e^{p-1} m";
            return rep;
        }
    }
    rep.p_condition = true;
    // (d) regular branch.
    for (int i = 0; i < n; ++i)
        if (q[static_cast<std::size_t>(i)].residue(origin) != 0) {
            rep.outcome = MupOutcome::Regular;
            rep.reason = "I(" + ring->names()[static_cast<std::size_t>(i)] + ")/e is a unit";
            return rep;
        }
    // (e) linear parts.
    for (const auto& qi : q) rep.phi.push_back(qi.linear_part());
    if (!eigenvalues_mod_p(rep.phi, p, &rep.eigen_raw)) {
        rep.reason = "eigenvalues not realized over F_p (phi not diagonalizable); theorem contract violated, check inputs";
        return rep;
    }
    long long uinv = mod_inverse(rep.unit_residue, p);
    for (auto x : rep.eigen_raw) rep.eigen_normalized.push_back(md(x * uinv, p));
    rep.type = SingularityType(p, rep.eigen_normalized);
    rep.outcome = MupOutcome::Toric;
    return rep;
}

DivisorWeight divisor_weight(const Action& a, const MupReport& m, int y) {
    if (m.outcome != MupOutcome::Toric) throw std::invalid_argument("divisor weight needs a toric report");
    const RingPtr& ring = a.ring();
    const long long p = ring->p();
    std::vector<long long> origin(static_cast<std::size_t>(ring->nvars()), 0);
    Frac q = a.I_coord(y) / *m.e;
    Frac h(ring);
    const std::string& name = ring->names()[static_cast<std::size_t>(y)];
    try {
        h = q.local_divide(y, 1);
        h.residue(origin);
    } catch (const std::exception&) {
        throw std::invalid_argument("I(" + name + ") is not in (e " + name + ")");
    }
    DivisorWeight w;
    w.raw = h.residue(origin);
    w.normalized = md(w.raw * mod_inverse(m.unit_residue, p), p);
    return w;
}

RamificationReport ramification(const Action& a, int t, const std::string& symbol) {
    const RingPtr& ring = a.ring();
    RamificationReport rep;
    rep.divisor = symbol;
    Frac it = a.I_coord(t);
    rep.valuation_I_t = it.valuation(t);
    int artin = -1;
    for (int i = 0; i < ring->nvars(); ++i) {
        Frac f = a.I_coord(i);
        if (f.is_zero()) continue;
        int v = f.valuation(t);
        if (artin < 0 || v < artin) artin = v;
    }
    rep.artin = artin < 0 ? 0 : artin;
    if (rep.artin == 0) {
        rep.kind = RamKind::Unramified;
    } else if (rep.valuation_I_t == rep.artin) {
        rep.kind = RamKind::Wild;
    } else {
        rep.kind = RamKind::Fierce;
    }
    rep.different = (a.p() - 1) * rep.artin;
    rep.index = rep.kind == RamKind::Wild ? a.p() : 1;
    return rep;
}

}  // namespace qv
