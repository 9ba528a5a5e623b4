#pragma once

#include "quotver/singularity.hpp"

#include <gmpxx.h>

#include <map>
#include <string>
#include <vector>

namespace qv {

// Q-linear combination of named divisor symbols.
class DivClass {
public:
    DivClass() = default;
    static DivClass symbol(const std::string& s, const mpq_class& c = 1);

    const mpq_class& coeff(const std::string& s) const;
    const std::vector<std::pair<std::string, mpq_class>>& terms() const { return terms_; }
    DivClass& add(const std::string& s, const mpq_class& c);
    DivClass& operator+=(const DivClass& o);
    friend DivClass operator+(DivClass a, const DivClass& b) { return a += b; }
    friend DivClass operator*(const mpq_class& c, const DivClass& d);
    std::string str() const;

private:
    std::vector<std::pair<std::string, mpq_class>> terms_;  // insertion order, no zeros
};

struct LedgerEquation {
    std::string text;
    std::string citation;
};

// Canonical-class bookkeeping along a blow-up chain:
//   K_{Y_n} = pi^* K_{Y_0} + sum_j c_j E_j,
//   K_{Y_n} = f^* K_{Y_n/G} + sum_j (p-1) i(E_j) E_j,   f^* F_j = e_j E_j,
// with K_{Y_0} = f^* K_{Y_0/G}, so K_{Y_n/G} = pi^* K_{Y_0/G} + sum_j a_j F_j.
class Ledger {
public:
    explicit Ledger(long long p) : p_(p) {}

    // A blow-up with exceptional divisor `symbol` along a center cut out by
    // `center_size` coordinates; `pullbacks` gives the multiplicity of each
    // earlier exceptional divisor along the new one.
    void record_blowup(const std::string& symbol, int center_size, const std::map<std::string, int>& pullbacks,
                       const std::string& citation = "");
    void record_ramification(const std::vector<RamificationReport>& reports, const std::string& citation = "");

    const DivClass& canonical() const { return k_; }
    DivClass ramification_divisor() const;
    const std::vector<std::string>& exceptional() const { return order_; }
    // a_j for each exceptional symbol, in blow-up order. Throws when a
    // ramification report is missing.
    std::vector<std::pair<std::string, mpq_class>> solve() const;
    // Replays f^*(K_top/G - pi^*K_0/G) = sum a_j f^*F_j term by term.
    bool consistent(std::string* detail = nullptr) const;
    const std::vector<LedgerEquation>& trace() const { return eqs_; }

private:
    long long p_;
    DivClass k_;
    std::vector<std::string> order_;
    std::map<std::string, RamificationReport> ram_;
    std::vector<LedgerEquation> eqs_;
};

}  // namespace qv
