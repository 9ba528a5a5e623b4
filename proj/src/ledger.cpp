#include "quotver/ledger.hpp"

#include <algorithm>
#include <sstream>

namespace qv {

namespace {

const mpq_class kZero = 0;

std::string coef_str(const mpq_class& c) { return c.get_str(); }

}  // namespace

DivClass DivClass::symbol(const std::string& s, const mpq_class& c) {
    DivClass d;
    d.add(s, c);
    return d;
}

const mpq_class& DivClass::coeff(const std::string& s) const {
    for (const auto& [k, v] : terms_)
        if (k == s) return v;
    return kZero;
}

DivClass& DivClass::add(const std::string& s, const mpq_class& c) {
    for (auto it = terms_.begin(); it != terms_.end(); ++it)
        if (it->first == s) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
            return *this;
        }
    if (c != 0) terms_.push_back({s, c});
    return *this;
}

DivClass& DivClass::operator+=(const DivClass& o) {
    for (const auto& [k, v] : o.terms_) add(k, v);
    return *this;
}

DivClass operator*(const mpq_class& c, const DivClass& d) {
    DivClass r;
    for (const auto& [k, v] : d.terms_) r.add(k, c * v);
    return r;
}

std::string DivClass::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, v] : terms_) {
        mpq_class a = abs(v);
        os << (v < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
        if (a != 1) os << coef_str(a);
        os << k;
        first = false;
    }
    return os.str();
}

void Ledger::record_blowup(const std::string& symbol, int center_size, const std::map<std::string, int>& pullbacks,
                           const std::string& citation) {
    if (std::find(order_.begin(), order_.end(), symbol) != order_.end())
        throw std::invalid_argument("exceptional symbol " + symbol + " recorded twice");
    if (center_size < 2) throw std::invalid_argument("blow-up center must have codimension at least 2");
    // pi^* of each earlier E_i picks up k_i E_new; K gains (codim - 1) E_new.
    mpq_class c = center_size - 1;
    for (const auto& [s, k] : pullbacks) c += k_.coeff(s) * k;
    DivClass before = k_;
    k_.add(symbol, c);
    order_.push_back(symbol);
    std::ostringstream os;
    os << "K = pi^*K_0 + " << k_.str() << "  (new " << symbol << ": " << (center_size - 1);
    for (const auto& [s, k] : pullbacks)
        if (k && before.coeff(s) != 0) os << " + " << coef_str(before.coeff(s)) << "*" << k << " from " << s;
    os << ")";
    eqs_.push_back({os.str(), citation});
}

void Ledger::record_ramification(const std::vector<RamificationReport>& reports, const std::string& citation) {
    for (const auto& r : reports) {
        if (ram_.count(r.divisor)) throw std::invalid_argument("two ramification reports for " + r.divisor);
        ram_.emplace(r.divisor, r);
    }
    std::ostringstream os;
    os << "K = f^*K_G + " << ramification_divisor().str();
    for (const auto& r : reports)
        if (r.kind == RamKind::Wild) os << "  [wild along " << r.divisor << ": f^*F = " << r.index << r.divisor << "]";
    eqs_.push_back({os.str(), citation});
}

DivClass Ledger::ramification_divisor() const {
    DivClass d;
    for (const auto& s : order_) {
        auto it = ram_.find(s);
        if (it != ram_.end()) d.add(s, mpq_class(static_cast<long>(it->second.different)));
    }
    for (const auto& [s, r] : ram_)
        if (std::find(order_.begin(), order_.end(), s) == order_.end()) d.add(s, mpq_class(static_cast<long>(r.different)));
    return d;
}

std::vector<std::pair<std::string, mpq_class>> Ledger::solve() const {
    std::vector<std::string> missing;
    for (const auto& s : order_)
        if (!ram_.count(s)) missing.push_back(s);
    if (!missing.empty()) {
        std::string m;
        for (const auto& s : missing) m += (m.empty() ? "" : ", ") + s;
        throw std::invalid_argument("underdetermined: no ramification report for " + m);
    }
    std::vector<std::pair<std::string, mpq_class>> out;
    for (const auto& s : order_) {
        const auto& r = ram_.at(s);
        mpq_class a = (k_.coeff(s) - mpq_class(static_cast<long>(r.different))) / mpq_class(static_cast<long>(r.index));
        a.canonicalize();
        out.push_back({s, a});
    }
    return out;
}

bool Ledger::consistent(std::string* detail) const {
    auto a = solve();
    // f^*(sum a_j F_j) = sum a_j e_j E_j must equal K_top - R - pi^*K_0.
    DivClass lhs = k_;
    lhs += mpq_class(-1) * ramification_divisor();
    DivClass rhs;
    for (const auto& [s, v] : a) rhs.add(s, v * mpq_class(static_cast<long>(ram_.at(s).index)));
    DivClass diff = lhs;
    diff += mpq_class(-1) * rhs;
    if (!diff.terms().empty()) {
        if (detail) *detail = "residual " + diff.str();
        return false;
    }
    return true;
}

}  // namespace qv
