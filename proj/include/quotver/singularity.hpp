#pragma once

#include "quotver/action.hpp"

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

namespace qv {

struct SingularityType {
    long long r = 1;
    std::vector<long long> b;  // residues mod r

    SingularityType() = default;
    SingularityType(long long r, std::vector<long long> weights);
    // Representative minimizing the sorted weight vector over generator changes.
    SingularityType canonical() const;
    bool equivalent(const SingularityType& o) const;
    // gcd(r, b_1..^b_j..b_n) = 1 for every j; `why` names the failing gcd.
    bool well_formed(std::string* why = nullptr) const;
    std::string str() const;
};

enum class ReidTai { Terminal, Canonical, NotCanonical };
std::string to_string(ReidTai v);

struct ReidTaiResult {
    ReidTai verdict = ReidTai::NotCanonical;
    std::vector<long long> sums;  // sum_j (i b_j mod r) for i = 1..r-1
};
// Throws std::invalid_argument when the type is not well formed.
ReidTaiResult reid_tai(const SingularityType& t);

struct PairResult {
    bool ok = false;
    std::string reason;
    std::vector<mpq_class> sums;  // sum_j (1 - c_j)(i b_j mod r)
};
PairResult reid_tai_pair(const SingularityType& t, const std::vector<mpq_class>& c);

enum class MupOutcome { Regular, Toric, Inapplicable };
std::string to_string(MupOutcome o);

struct MupReport {
    MupOutcome outcome = MupOutcome::Inapplicable;
    std::string reason;
    bool unit_condition = false;     // I(s) = e s (unit)
    bool ideal_condition = false;    // I(v_i) in (e) for all i
    bool p_condition = false;        // p in e^{p-1} m
    long long unit_residue = 0;      // u(P)
    std::vector<std::vector<long long>> phi;  // phi[i][j]: coefficient of v_j in phi(v_i), e as given
    std::vector<long long> eigen_raw;         // eigenvalues with e as given
    std::vector<long long> eigen_normalized;  // eigenvalues for e' = e u
    SingularityType type;                     // from the normalized eigenvalues
    std::optional<Frac> e, s;
};

// Checks the hypotheses of the mu_p criterion at the origin of the chart.
MupReport check_mup(const Action& a, const Frac& e, const Frac& s);

struct DivisorWeight {
    long long raw = 0;
    long long normalized = 0;
};
// Eigenvalue of phi on the class of the coordinate y, from I(y) = e y h.
DivisorWeight divisor_weight(const Action& a, const MupReport& m, int y);

enum class RamKind { Unramified, Wild, Fierce };
std::string to_string(RamKind k);

struct RamificationReport {
    std::string divisor;
    int artin = 0;            // i(E)
    int valuation_I_t = 0;    // v_E(I(t)), -1 if I(t) = 0
    RamKind kind = RamKind::Unramified;
    long long different = 0;  // (p-1) i(E)
    long long index = 1;      // ramification index e
};
RamificationReport ramification(const Action& a, int t, const std::string& symbol);

// Eigenvalues of a matrix over F_p with geometric multiplicities; returns
// false when the matrix is not diagonalizable over F_p.
bool eigenvalues_mod_p(const std::vector<std::vector<long long>>& m, long long p, std::vector<long long>* eig);
int rank_mod_p(std::vector<std::vector<long long>> m, long long p);

}  // namespace qv
