#include "quotver/scenario.hpp"

#include "quotver/badlocus.hpp"
#include "quotver/blowup.hpp"
#include "quotver/ledger.hpp"
#include "quotver/parse.hpp"
#include "quotver/singularity.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

namespace qv {

using json = nlohmann::ordered_json;

std::string to_string(StepStatus s) {
    switch (s) {
        case StepStatus::Pass:
            return "pass";
        case StepStatus::Fail:
            return "fail";
        case StepStatus::Heuristic:
            return "heuristic";
        case StepStatus::Cited:
            return "cited";
        case StepStatus::Skipped:
            return "skipped";
    }
    return "?";
}

bool Report::failed() const {
    return std::any_of(steps.begin(), steps.end(), [](const StepResult& s) { return s.status == StepStatus::Fail; });
}

bool Report::passed() const {
    if (failed()) return false;
    return filtered || verdict == expected_verdict;
}

std::string Report::json(bool with_timing) const {
    qv::json j;
    j["schema"] = "quotver.report/1";
    j["scenario"] = scenario;
    j["title"] = title;
    j["steps"] = qv::json::array();
    for (const auto& s : steps)
        j["steps"].push_back({{"id", s.id}, {"kind", s.kind}, {"status", to_string(s.status)},
                              {"citation", s.citation}, {"detail", s.detail}});
    j["verdict"] = verdict;
    j["expected_verdict"] = expected_verdict;
    j["passed"] = passed();
    qv::json rt;
    rt["limit_seconds"] = limit_seconds;
    if (with_timing) {
        rt["seconds"] = seconds;
        rt["within_limit"] = limit_seconds <= 0 || seconds <= limit_seconds;
    }
    j["runtime"] = rt;
    return j.dump(2) + "\n";
}

std::string Report::table() const {
    std::size_t wid = 4;
    for (const auto& s : steps) wid = std::max(wid, s.id.size());
    std::ostringstream os;
    os << "scenario " << scenario;
    if (!title.empty()) os << ": " << title;
    os << "\n";
    os << std::left << std::setw(10) << "STATUS" << std::setw(static_cast<int>(wid) + 2) << "STEP" << "DETAIL\n";
    for (const auto& s : steps)
        os << std::left << std::setw(10) << to_string(s.status) << std::setw(static_cast<int>(wid) + 2) << s.id << s.detail
           << "\n";
    os << "verdict: " << verdict << " (expected " << expected_verdict << ")\n";
    os << std::fixed << std::setprecision(2) << "runtime: " << seconds << " s (limit " << limit_seconds << " s)\n";
    os << "result: " << (passed() ? "PASS" : "FAIL") << "\n";
    return os.str();
}

namespace {

[[noreturn]] void input_error(const std::string& where, const std::string& msg) {
    throw ScenarioInputError(where + ": " + msg);
}

const json& req(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) input_error(where, std::string("missing field '") + key + "'");
    return obj.at(key);
}

std::string str_field(const json& obj, const char* key, const std::string& where) {
    const json& v = req(obj, key, where);
    if (!v.is_string()) input_error(where, std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

std::string opt_str(const json& obj, const char* key, const std::string& dflt = "") {
    if (obj.is_object() && obj.contains(key) && obj.at(key).is_string()) return obj.at(key).get<std::string>();
    return dflt;
}

long long int_field(const json& obj, const char* key, const std::string& where) {
    const json& v = req(obj, key, where);
    if (!v.is_number_integer()) input_error(where, std::string("field '") + key + "' must be an integer");
    return v.get<long long>();
}

std::vector<std::string> str_list(const json& v, const std::string& where) {
    if (!v.is_array()) input_error(where, "expected an array of strings");
    std::vector<std::string> out;
    for (const auto& x : v) {
        if (!x.is_string()) input_error(where, "expected an array of strings");
        out.push_back(x.get<std::string>());
    }
    return out;
}

const json& list_field(const json& obj, const char* key) {
    static const json empty = json::array();
    if (!obj.contains(key)) return empty;
    const json& v = obj.at(key);
    if (!v.is_array()) input_error(key, "must be an array");
    return v;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioInputError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioInputError(path + ": " + e.what());
    }
}

// Resolves a mutated twin: {"base": file, "patch": [RFC 6902 operations]}.
json resolve_document(json doc, const std::string& base_dir, int depth = 0) {
    if (!doc.is_object()) throw ScenarioInputError("scenario document must be a JSON object");
    if (!doc.contains("base")) return doc;
    if (depth > 4) throw ScenarioInputError("twin chain too deep");
    namespace fs = std::filesystem;
    std::string base = str_field(doc, "base", "twin");
    fs::path bp = fs::path(base_dir) / base;
    json b = resolve_document(load_json_file(bp.string()), bp.parent_path().string(), depth + 1);
    if (doc.contains("patch")) {
        try {
            b = b.patch(doc.at("patch"));
        } catch (const json::exception& e) {
            throw ScenarioInputError(std::string("patch does not apply: ") + e.what());
        }
    }
    for (const char* k : {"id", "title"})
        if (doc.contains(k)) b[k] = doc[k];
    return b;
}

// ---------------------------------------------------------------------------

struct MupRecord {
    const json* decl = nullptr;
    std::string chart;
    bool ok = false;  // hypotheses hold and expectations match
    MupReport report;
    std::optional<ReidTai> verdict;
    std::optional<bool> pair;  // result of a pair check attached to this point
};

class Runner {
public:
    Runner(const json& doc, const RunOptions& opts) : doc_(doc), opts_(opts) {}

    Report run();
    // Builds the ring and the chart tree only, in declaration order.
    std::vector<Chart> charts_only();

private:
    // Step bookkeeping -------------------------------------------------------
    bool active(const std::string& chart) const { return opts_.chart.empty() || chart == opts_.chart; }
    bool global_active() const { return opts_.chart.empty(); }

    void add(const std::string& id, const std::string& kind, StepStatus st, const json& decl, std::string detail) {
        rep_.steps.push_back({id, kind, st, opt_str(decl, "citation"), std::move(detail)});
    }
    void skip(const std::string& id, const std::string& kind, const json& decl) {
        add(id, kind, StepStatus::Skipped, decl, "filtered out by --chart");
    }

    // Runs `body` as one step; library exceptions become failures, input
    // errors propagate.
    void step(const std::string& id, const std::string& kind, const json& decl, const std::string& chart,
              const std::function<std::pair<StepStatus, std::string>()>& body) {
        if (!(chart.empty() ? global_active() : active(chart))) {
            skip(id, kind, decl);
            return;
        }
        try {
            auto [st, detail] = body();
            add(id, kind, st, decl, std::move(detail));
        } catch (const ScenarioInputError&) {
            throw;
        } catch (const ParseError& e) {
            input_error(id, e.what());
        } catch (const std::exception& e) {
            add(id, kind, StepStatus::Fail, decl, e.what());
        }
    }

    // Lookups and parsing ----------------------------------------------------
    const Chart& chart(const std::string& name, const std::string& where) const {
        auto it = charts_.find(name);
        if (it == charts_.end()) input_error(where, "unknown chart '" + name + "'");
        return *it->second;
    }
    const Chart& chart_of(const json& decl, const std::string& where) const {
        return chart(str_field(decl, "chart", where), where);
    }
    static Frac expr(const Chart& c, const std::string& text, const std::string& where) {
        try {
            return parse_frac(c.ring(), text);
        } catch (const ParseError& e) {
            input_error(where, "'" + text + "': " + e.what());
        }
    }
    static int coord(const Chart& c, const std::string& name, const std::string& where) {
        int i = c.ring()->index_of(name);
        if (i < 0) input_error(where, "chart " + c.name + " has no coordinate '" + name + "'");
        return i;
    }
    static std::vector<int> monomial(const Chart& c, const std::string& text, const std::string& where) {
        Poly m;
        try {
            m = parse_poly(text, c.ring()->names());
        } catch (const ParseError& e) {
            input_error(where, "'" + text + "': " + e.what());
        }
        if (m.size() != 1 || !m.lead().c.is_one()) input_error(where, "'" + text + "' is not a monomial");
        std::vector<int> exps;
        for (int i = 0; i < c.ring()->nvars(); ++i) exps.push_back(m.lead().m.exp(i));
        return exps;
    }
    static std::vector<long long> point(const Chart& c, const json& v, const std::string& where) {
        std::vector<long long> pt(static_cast<std::size_t>(c.ring()->nvars()), 0);
        if (v.is_null()) return pt;
        if (v.is_array()) {
            if (v.size() != pt.size()) input_error(where, "point has the wrong number of coordinates");
            for (std::size_t i = 0; i < pt.size(); ++i) {
                if (!v[i].is_number_integer()) input_error(where, "point coordinates must be integers");
                pt[i] = v[i].get<long long>();
            }
            return pt;
        }
        if (v.is_object()) {
            for (const auto& [k, x] : v.items()) {
                if (!x.is_number_integer()) input_error(where, "point coordinates must be integers");
                pt[static_cast<std::size_t>(coord(c, k, where))] = x.get<long long>();
            }
            return pt;
        }
        input_error(where, "point must be an array or an object");
    }
    static std::string point_str(const std::vector<long long>& pt, long long p) {
        std::string s = "(";
        for (std::size_t i = 0; i < pt.size(); ++i) s += (i ? "," : "") + std::to_string(((pt[i] % p) + p) % p);
        return s + ")";
    }
    static BadComponent component(const Chart& c, const json& v, const std::string& where) {
        BadComponent bc;
        bc.label = opt_str(v, "label");
        bc.coords.assign(static_cast<std::size_t>(c.ring()->nvars()), std::nullopt);
        const json& at = req(v, "at", where);
        if (!at.is_object()) input_error(where, "component 'at' must be an object");
        for (const auto& [k, x] : at.items()) {
            if (!x.is_number_integer()) input_error(where, "component values must be integers");
            bc.coords[static_cast<std::size_t>(coord(c, k, where))] = x.get<long long>();
        }
        return bc;
    }

    // Pipeline stages ---------------------------------------------------------
    void build_ring();
    void build_charts();
    void check_chart_expectations(const Chart& c, const json& d, const std::string& id);
    void order_checks();
    void reference_actions();
    void projective_conjugations();
    void cm_witnesses();
    void invariant_forms();
    void fixed_loci();
    void blowups();
    void expansions();
    void memberships();
    void bad_loci();
    void identifications();
    void mups();
    void ramifications();
    void ledger();
    void pairs();
    void expectations();
    void verdict();

    const json& doc_;
    RunOptions opts_;
    Report rep_;
    RingContext rc_;
    int scan_degree_ = 4;
    std::map<std::string, std::unique_ptr<Chart>> charts_;
    std::vector<std::string> chart_order_;
    std::map<std::string, const json*> chart_decl_;
    std::map<std::string, StepStatus> order_status_;
    std::map<std::string, bool> relation_ok_;
    std::map<std::string, PullbackTable> chart_pullbacks_;  // chart -> table of its blow-up
    std::map<std::string, int> chart_center_size_;
    std::map<std::string, std::string> chart_exceptional_;
    ChartLookup lookup_;
    // Bad points per stage, as "chart(point)" keys, and verified identifications.
    std::map<int, std::vector<std::string>> bad_points_;
    std::vector<std::pair<std::string, std::string>> identified_;
    std::map<std::string, MupRecord> mups_;
    std::vector<std::string> mup_order_;
    std::vector<RamificationReport> ram_;
    std::optional<Ledger> ledger_;
    std::vector<std::pair<std::string, mpq_class>> disc_;
    bool ledger_ok_ = false;
    bool pullbacks_ok_ = true;
};

// ---------------------------------------------------------------------------

void Runner::build_ring() {
    const json& r = req(doc_, "ring", "ring");
    long long p = int_field(r, "p", "ring");
    if (p < 2) input_error("ring", "p must be a prime");
    for (long long d = 2; d * d <= p; ++d)
        if (p % d == 0) input_error("ring", "p must be a prime");
    std::string kind = str_field(r, "kind", "ring");
    if (kind == "positive") {
        rc_ = RingContext::positive(p);
    } else if (kind == "eisenstein") {
        std::vector<Coef> a;
        const json& co = req(r, "coefficients", "ring");
        if (!co.is_array() || static_cast<long long>(co.size()) != p - 1)
            input_error("ring", "eisenstein ring needs p-1 coefficients a_1..a_{p-1}");
        for (const auto& x : co) {
            if (!x.is_number_integer()) input_error("ring", "coefficients must be integers");
            a.emplace_back(x.get<long long>());
        }
        rc_ = RingContext::eisenstein(p, a);
        if (!rc_.is_eisenstein()) input_error("ring", "relation " + rc_.relation_str() + " is not Eisenstein");
    } else {
        input_error("ring", "kind must be 'positive' or 'eisenstein'");
    }
    rc_.symbol = opt_str(r, "symbol", "e2");
}

void Runner::build_charts() {
    for (const auto& d : list_field(doc_, "charts")) {
        std::string name = str_field(d, "id", "charts");
        std::string where = "chart " + name;
        if (charts_.count(name)) input_error(where, "duplicate chart id");
        std::unique_ptr<Chart> c;
        try {
            if (d.contains("root")) {
                const json& r = d.at("root");
                auto names = str_list(req(r, "coords", where), where);
                Poly m;
                if (rc_.mode == Mode::MixedChar) m = parse_poly(str_field(r, "uniformizer", where), names);
                RingPtr ring = rc_.mode == Mode::MixedChar ? Ring::make(rc_, names, m) : Ring::make(rc_, names);
                auto taus = str_list(req(r, "tau", where), where);
                if (taus.size() != names.size()) input_error(where, "tau needs one image per coordinate");
                std::vector<Frac> tau;
                for (const auto& t : taus) tau.push_back(parse_frac(ring, t));
                std::map<std::string, Frac> divs;
                if (r.contains("divisors"))
                    for (const auto& [sym, f] : r.at("divisors").items()) divs.emplace(sym, parse_frac(ring, f.get<std::string>()));
                c = std::make_unique<Chart>(make_root_chart(name, Action(ring, std::move(tau)), std::move(divs)));
                if (r.contains("stage")) c->stage = static_cast<int>(int_field(r, "stage", where));
            } else if (d.contains("change")) {
                const json& ch = d.at("change");
                const Chart& parent = chart(str_field(ch, "from", where), where);
                c = std::make_unique<Chart>(changed_chart(parent, str_list(req(ch, "old_in_new", where), where),
                                                          str_list(req(ch, "new_in_old", where), where),
                                                          str_list(req(ch, "coords", where), where), name));
            } else if (d.contains("shift")) {
                const json& sh = d.at("shift");
                const Chart& parent = chart(str_field(sh, "from", where), where);
                auto names = str_list(req(sh, "coords", where), where);
                c = std::make_unique<Chart>(shifted_chart(parent, point(parent, req(sh, "point", where), where), names, name));
            } else if (d.contains("blowup")) {
                const json& b = d.at("blowup");
                const Chart& parent = chart(str_field(b, "from", where), where);
                std::vector<int> center;
                for (const auto& n : str_list(req(b, "center", where), where)) center.push_back(coord(parent, n, where));
                int kept = coord(parent, str_field(b, "kept", where), where);
                auto names = str_list(req(b, "coords", where), where);
                std::string ex = str_field(b, "exceptional", where);
                PullbackTable pb;
                c = std::make_unique<Chart>(blowup_chart(parent, center, kept, names, name, ex, &pb));
                // A chart of an earlier stage that persists unchanged through
                // later blow-ups may carry the stage number it is used at.
                if (b.contains("stage")) c->stage = static_cast<int>(int_field(b, "stage", where));
                chart_pullbacks_[name] = pb;
                chart_center_size_[name] = static_cast<int>(center.size());
                chart_exceptional_[name] = ex;
            } else {
                input_error(where, "chart needs one of root, change, shift, blowup");
            }
        } catch (const ScenarioInputError&) {
            throw;
        } catch (const ParseError& e) {
            input_error(where, e.what());
        } catch (const std::invalid_argument& e) {
            input_error(where, e.what());
        }
        if (d.contains("stage")) c->stage = static_cast<int>(int_field(d, "stage", where));
        lookup_[name] = c.get();
        chart_decl_[name] = &d;
        chart_order_.push_back(name);
        Chart* cp = c.get();
        charts_.emplace(name, std::move(c));
        check_chart_expectations(*cp, d, "chart:" + name);
    }
    if (charts_.empty()) input_error("charts", "scenario declares no charts");
}

void Runner::check_chart_expectations(const Chart& c, const json& d, const std::string& id) {
    std::string where = id;
    std::vector<std::pair<int, Frac>> tau_exp;
    if (d.contains("tau_expect")) {
        const json& te = d.at("tau_expect");
        if (!te.is_object()) input_error(where, "tau_expect must map coordinates to expressions");
        for (const auto& [k, v] : te.items()) tau_exp.emplace_back(coord(c, k, where), expr(c, v.get<std::string>(), where));
    }
    std::vector<std::pair<std::string, std::optional<Frac>>> div_exp;
    if (d.contains("divisors_expect")) {
        const json& de = d.at("divisors_expect");
        if (!de.is_object()) input_error(where, "divisors_expect must be an object");
        for (const auto& [k, v] : de.items())
            div_exp.emplace_back(k, v.is_null() ? std::nullopt : std::optional<Frac>(expr(c, v.get<std::string>(), where)));
    }
    step(id, "chart", d, c.name, [&]() -> std::pair<StepStatus, std::string> {
        std::string detail = c.provenance + "; stage " + std::to_string(c.stage);
        for (const auto& [i, f] : tau_exp) {
            if (!c.action.tau()[static_cast<std::size_t>(i)].equals(f))
                return {StepStatus::Fail, "tau(" + c.ring()->names()[static_cast<std::size_t>(i)] + ") = " +
                                              c.action.tau()[static_cast<std::size_t>(i)].str() + ", declared " + f.str()};
        }
        std::vector<long long> origin(static_cast<std::size_t>(c.ring()->nvars()), 0);
        for (const auto& [sym, f] : div_exp) {
            auto it = c.divisors.find(sym);
            if (!f) {
                if (it != c.divisors.end()) return {StepStatus::Fail, sym + " is visible in the chart, declared absent"};
                continue;
            }
            if (it == c.divisors.end()) return {StepStatus::Fail, sym + " is not visible in the chart"};
            Frac ratio = it->second / *f;
            bool unit = false;
            try {
                unit = ratio.residue(origin) != 0;
            } catch (const NotLocal&) {
            }
            if (!unit) return {StepStatus::Fail, sym + " = {" + it->second.str() + " = 0}, declared {" + f->str() + " = 0}"};
        }
        if (!tau_exp.empty()) detail += "; " + std::to_string(tau_exp.size()) + " tau images match";
        if (!div_exp.empty()) detail += "; divisor table matches";
        return {StepStatus::Pass, detail};
    });
}

void Runner::order_checks() {
    for (const auto& name : chart_order_) {
        const Chart& c = *charts_.at(name);
        const json& d = *chart_decl_.at(name);
        std::string mode = opt_str(d, "order_check", opt_str(doc_, "order_check"));
        if (!mode.empty() && mode != "exact" && mode != "sampled") input_error("chart " + name, "order_check must be exact or sampled");
        bool exact = !c.ring()->mixed() || d.contains("root") || mode == "exact";
        // A shift or coordinate change conjugates the parent's action by a
        // map whose inverse was checked exactly, so sigma^p = id carries over.
        bool inherited = (d.contains("shift") || d.contains("change")) && mode.empty();
        step("order:" + name, "order", d, name, [&]() -> std::pair<StepStatus, std::string> {
            if (inherited) {
                auto it = order_status_.find(c.parent);
                if (it == order_status_.end() && !opts_.chart.empty())
                    return {StepStatus::Heuristic, "parent chart " + c.parent + " was filtered out of this run"};
                if (it == order_status_.end() || it->second == StepStatus::Fail)
                    return {StepStatus::Fail, "order of the parent chart " + c.parent + " is not established"};
                order_status_[name] = it->second;
                return {it->second, "conjugate of the action on " + c.parent + " by an invertible coordinate change"};
            }
            if (exact) {
                std::string why;
                if (!c.action.check_order(&why)) return {StepStatus::Fail, why};
                order_status_[name] = StepStatus::Pass;
                return {StepStatus::Pass, "sigma^" + std::to_string(c.action.p()) + " = id exactly"};
            }
            auto r = c.action.check_order_sampled(opts_.order_samples);
            if (!r.ok) return {StepStatus::Fail, r.detail};
            order_status_[name] = StepStatus::Heuristic;
            return {StepStatus::Heuristic, "sigma^" + std::to_string(c.action.p()) + " = id on " + r.detail};
        });
        if (c.ring()->mixed())
            step("relation:" + name, "relation", d, name, [&]() -> std::pair<StepStatus, std::string> {
                if (inherited) {
                    auto it = relation_ok_.find(c.parent);
                    if (it == relation_ok_.end() && !opts_.chart.empty())
                        return {StepStatus::Heuristic, "parent chart " + c.parent + " was filtered out of this run"};
                    if (it == relation_ok_.end() || !it->second)
                        return {StepStatus::Fail, "relation on the parent chart " + c.parent + " is not preserved"};
                    relation_ok_[name] = true;
                    return {StepStatus::Pass, "relation and action both transported from " + c.parent};
                }
                std::string why;
                bool ok = c.action.check_relation(&why);
                relation_ok_[name] = ok;
                if (!ok) return {StepStatus::Fail, why};
                return {StepStatus::Pass, "sigma preserves the relation"};
            });
    }
}

void Runner::reference_actions() {
    for (const auto& d : list_field(doc_, "actions_mod_p")) {
        std::string id = "mod-p:" + str_field(d, "id", "actions_mod_p");
        const Chart& c = chart_of(d, id);
        const json& ref = req(d, "reference", id);
        const json& rr = req(ref, "ring", id);
        if (str_field(rr, "kind", id) != "positive") input_error(id, "reference action must be over F_p");
        RingPtr ring = Ring::make(RingContext::positive(int_field(rr, "p", id)), str_list(req(ref, "coords", id), id));
        std::vector<Frac> tau;
        for (const auto& t : str_list(req(ref, "tau", id), id)) {
            try {
                tau.push_back(parse_frac(ring, t));
            } catch (const ParseError& e) {
                input_error(id, e.what());
            }
        }
        if (static_cast<int>(tau.size()) != ring->nvars()) input_error(id, "reference tau needs one image per coordinate");
        Action b(ring, std::move(tau));
        step(id, "mod-p", d, c.name, [&]() -> std::pair<StepStatus, std::string> {
            std::string why;
            bool ok;
            try {
                ok = actions_equal_mod_p(c.action, b, &why);
            } catch (const std::invalid_argument& e) {
                input_error(id, e.what());
            }
            if (!ok) return {StepStatus::Fail, why};
            return {StepStatus::Pass, "reduction mod " + std::to_string(c.ring()->p()) + " equals the reference action"};
        });
    }
}

void Runner::projective_conjugations() {
    for (const auto& d : list_field(doc_, "projective_conjugation")) {
        std::string id = "projective:" + str_field(d, "id", "projective_conjugation");
        auto old_names = str_list(req(d, "coords", id), id);
        auto new_names = str_list(req(d, "new_coords", id), id);
        auto parse_all = [&](const char* key, const std::vector<std::string>& names) {
            std::vector<Poly> out;
            for (const auto& s : str_list(req(d, key, id), id)) {
                try {
                    out.push_back(parse_poly(s, names));
                } catch (const ParseError& e) {
                    input_error(id, "'" + s + "': " + e.what());
                }
            }
            if (out.size() != names.size()) input_error(id, std::string(key) + " needs one entry per coordinate");
            return out;
        };
        if (old_names.size() != new_names.size()) input_error(id, "coordinate lists differ in length");
        auto tau = parse_all("tau", old_names);
        auto new_in_old = parse_all("new_in_old", old_names);
        auto old_in_new = parse_all("old_in_new", new_names);
        auto printed = parse_all("tau_new", new_names);
        const json* aff = d.contains("affine") ? &d.at("affine") : nullptr;
        const Chart* ac = aff ? &chart_of(*aff, id) : nullptr;
        std::string chart_name = ac ? ac->name : "";
        step(id, "projective", d, chart_name, [&]() -> std::pair<StepStatus, std::string> {
            const std::size_t n = old_names.size();
            std::vector<Poly> vars;
            for (std::size_t i = 0; i < n; ++i) vars.push_back(Poly::var(static_cast<int>(i)));
            // The two coordinate changes are mutually inverse.
            for (std::size_t i = 0; i < n; ++i) {
                if (new_in_old[i].subst(old_in_new) != vars[i] || old_in_new[i].subst(new_in_old) != vars[i])
                    return {StepStatus::Fail, "coordinate changes are not inverse to each other"};
            }
            // Conjugated action in the new coordinates.
            std::vector<Poly> tau_in_new;
            for (const auto& t : tau) tau_in_new.push_back(t.subst(old_in_new));
            std::vector<Poly> conj;
            for (const auto& f : new_in_old) conj.push_back(f.subst(tau_in_new));
            // Agreement with the printed quadratics up to a common scalar.
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (conj[i] * printed[j] != conj[j] * printed[i])
                        return {StepStatus::Fail, "conjugated action differs from the declared one in components " +
                                                      std::to_string(i) + " and " + std::to_string(j)};
            std::string detail = "conjugate of [" + tau[0].str(old_names);
            for (std::size_t i = 1; i < n; ++i) detail += ", " + tau[i].str(old_names);
            detail += "] matches the declared action";
            if (!aff) return {StepStatus::Pass, detail};
            // Dehomogenize and compare with the chart's action.
            std::string dh = str_field(*aff, "dehomogenize", id);
            auto acoords = str_list(req(*aff, "coords", id), id);
            auto dit = std::find(new_names.begin(), new_names.end(), dh);
            if (dit == new_names.end()) input_error(id, "unknown dehomogenizing coordinate " + dh);
            std::size_t hi = static_cast<std::size_t>(dit - new_names.begin());
            std::vector<Poly> to_chart(n);
            std::size_t k = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (i == hi) {
                    to_chart[i] = Poly(1);
                } else {
                    if (k >= acoords.size()) input_error(id, "affine coordinate list too short");
                    to_chart[i] = Poly::var(coord(*ac, acoords[k++], id));
                }
            }
            Frac den = Frac::from_poly(ac->ring(), printed[hi].subst(to_chart));
            k = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (i == hi) continue;
                const std::string& an = acoords[k++];
                Frac mine = Frac::from_poly(ac->ring(), printed[i].subst(to_chart)) / den;
                const Frac& theirs = ac->action.tau()[static_cast<std::size_t>(coord(*ac, an, id))];
                if (!mine.equals(theirs))
                    return {StepStatus::Fail, "affine image of " + an + " is " + mine.str() + ", chart has " + theirs.str()};
            }
            return {StepStatus::Pass, detail + "; affine form agrees with chart " + ac->name};
        });
    }
}

void Runner::cm_witnesses() {
    for (const auto& d : list_field(doc_, "cm_witness")) {
        std::string id = "cm:" + str_field(d, "id", "cm_witness");
        const Chart& c = chart_of(d, id);
        Frac f = expr(c, str_field(d, "function", id), id);
        auto pt = point(c, d.contains("point") ? d.at("point") : json(), id);
        step(id, "cm-witness", d, c.name, [&]() -> std::pair<StepStatus, std::string> {
            auto r = cm_witness(c.action, f, pt);
            std::string detail = "tr(" + f.str() + ") = " + r.trace + "; point " +
                                 (r.fixed ? "fixed" : "not fixed") + "; " + (r.unit ? "unit" : "not a unit") + " there";
            return {r.ok ? StepStatus::Pass : StepStatus::Fail, detail};
        });
    }
}

void Runner::invariant_forms() {
    // A logarithmic form d(g_1)/g_1 ^ ... ^ d(g_n)/g_n transforms by the
    // product of the k_i with sigma(g_i) = (constant) g_i^{k_i}, k_i = +-1;
    // declared factors cover pieces outside the chart calculus.
    for (const auto& d : list_field(doc_, "invariant_forms")) {
        std::string id = "form:" + str_field(d, "id", "invariant_forms");
        const Chart& c = chart_of(d, id);
        std::vector<Frac> gs;
        for (const auto& s : str_list(req(d, "dlog", id), id)) gs.push_back(expr(c, s, id));
        long long declared = 1;
        std::string declared_note;
        if (d.contains("declared_factors"))
            for (const auto& f : d.at("declared_factors")) {
                declared *= int_field(f, "factor", id);
                declared_note += "; " + str_field(f, "name", id) + " -> " + std::to_string(int_field(f, "factor", id)) +
                                 " (declared)";
            }
        step(id, "invariant-form", d, c.name, [&]() -> std::pair<StepStatus, std::string> {
            long long total = declared;
            std::string detail;
            for (const auto& g : gs) {
                Frac sg = c.action.sigma(g);
                int k = 0;
                if ((sg / g).is_constant()) k = 1;
                else if ((sg * g).is_constant()) k = -1;
                if (!k) return {StepStatus::Fail, "sigma(" + g.str() + ") is not a constant times a power +-1"};
                total *= k;
                detail += (detail.empty() ? "" : "; ") + std::string("dlog(") + g.str() + ") -> " + std::to_string(k);
            }
            detail += declared_note + "; factor " + std::to_string(total);
            return {total == 1 ? StepStatus::Pass : StepStatus::Fail, detail};
        });
    }
}

void Runner::fixed_loci() {
    for (const auto& d : list_field(doc_, "fixed_loci")) {
        std::string id = "fixed-locus:" + str_field(d, "id", "fixed_loci");
        const Chart& c = chart_of(d, id);
        BadLocusClaim claim;
        claim.id = id;
        claim.cartier.assign(static_cast<std::size_t>(c.ring()->nvars()), 0);
        for (const auto& n : str_list(req(d, "support", id), id)) claim.support.push_back(coord(c, n, id));
        if (claim.support.empty()) claim.support.push_back(-1);
        for (const auto& comp : list_field(d, "components")) claim.components.push_back(component(c, comp, id));
        step(id, "fixed-locus", d, c.name, [&]() -> std::pair<StepStatus, std::string> {
            auto r = certify_bad_locus(c.action, claim, scan_degree_);
            std::string detail = std::to_string(claim.components.size()) + " component(s); " + r.certificate;
            if (!r.problems.empty()) detail += "; " + r.problems.front();
            if (!r.ok()) return {StepStatus::Fail, detail};
            return {r.exact ? StepStatus::Pass : StepStatus::Heuristic, detail};
        });
    }
}

void Runner::blowups() {
    std::set<std::string> declared;
    for (const auto& d : list_field(doc_, "blowups")) {
        std::string sym = str_field(d, "symbol", "blowups");
        if (!declared.insert(sym).second) input_error("blowup:" + sym, "symbol declared twice");
    }
    for (const auto& [name, ex] : chart_exceptional_)
        if (!declared.count(ex))
            input_error("chart " + name, "exceptional symbol " + ex + " is missing from the blow-up list");
    for (const auto& d : list_field(doc_, "blowups")) {
        std::string sym = str_field(d, "symbol", "blowups");
        std::string id = "blowup:" + sym;
        std::vector<std::string> cs;
        if (d.contains("charts")) {
            cs = str_list(d.at("charts"), id);
            for (const auto& n : cs) {
                chart(n, id);
                if (!chart_exceptional_.count(n) || chart_exceptional_.at(n) != sym)
                    input_error(id, "chart " + n + " is not a blow-up chart of " + sym);
            }
        } else {
            for (const auto& n : chart_order_)
                if (chart_exceptional_.count(n) && chart_exceptional_.at(n) == sym) cs.push_back(n);
        }
        if (cs.empty()) input_error(id, "no chart realizes this blow-up");
        step(id, "blowup", d, "", [&]() -> std::pair<StepStatus, std::string> {
            PullbackTable merged;
            int csize = chart_center_size_.at(cs.front());
            for (const auto& n : cs) {
                if (chart_center_size_.at(n) != csize) {
                    pullbacks_ok_ = false;
                    return {StepStatus::Fail, "charts disagree on the codimension of the center"};
                }
                for (const auto& [s, k] : chart_pullbacks_.at(n)) {
                    auto it = merged.find(s);
                    if (it != merged.end() && it->second != k) {
                        pullbacks_ok_ = false;
                        return {StepStatus::Fail, "charts disagree on the multiplicity of " + s};
                    }
                    merged[s] = k;
                }
            }
            if (d.contains("center_size") && int_field(d, "center_size", id) != csize) {
                pullbacks_ok_ = false;
                return {StepStatus::Fail, "center has codimension " + std::to_string(csize)};
            }
            std::string detail = "codim " + std::to_string(csize) + " center; pullbacks:";
            bool any = false;
            for (const auto& [s, k] : merged)
                if (k) {
                    detail += " " + s + "->" + std::to_string(k);
                    any = true;
                }
            if (!any) detail += " none";
            if (d.contains("expect_pullbacks")) {
                for (const auto& [s, k] : d.at("expect_pullbacks").items()) {
                    int have = merged.count(s) ? merged.at(s) : 0;
                    if (have != k.get<int>()) {
                        pullbacks_ok_ = false;
                        return {StepStatus::Fail, detail + "; expected " + s + "->" + std::to_string(k.get<int>())};
                    }
                }
                for (const auto& [s, k] : merged)
                    if (k && !d.at("expect_pullbacks").contains(s)) {
                        pullbacks_ok_ = false;
                        return {StepStatus::Fail, detail + "; " + s + " was not expected"};
                    }
            }
            chart_pullbacks_["@" + sym] = merged;
            chart_center_size_["@" + sym] = csize;
            return {StepStatus::Pass, detail};
        });
    }
}

void Runner::expansions() {
    for (const auto& d : list_field(doc_, "expansions")) {
        std::string id = "expansion:" + str_field(d, "id", "expansions");
        const Chart& c = chart_of(d, id);
        ExpansionClaim claim{id, expr(c, str_field(d, "target", id), id),
                             monomial(c, opt_str(d, "factor", "1"), id),
                             expr(c, str_field(d, "principal", id), id),
                             std::nullopt,
                             {}};
        if (d.contains("denominator")) claim.denominator = expr(c, str_field(d, "denominator", id), id);
        bool exact = d.contains("exact") && d.at("exact").get<bool>();
        if (!exact) {
            for (const auto& m : str_list(req(d, "error", id), id)) claim.error.push_back(monomial(c, m, id));
            if (claim.error.empty()) input_error(id, "error ideal is empty; set \"exact\": true for an exact identity");
        }
        step(id, "expansion", d, c.name, [&]() -> std::pair<StepStatus, std::string> {
            auto r = check_expansion_claim(c.action, claim);
            if (!r.ok) return {StepStatus::Fail, r.detail};
            std::string detail = "I(" + claim.target.str() + ") = " + mono_str(Mono::from_exps(claim.factor), c.ring()->names()) +
                                 " * " + claim.principal.str();
            if (claim.denominator) detail += " / " + claim.denominator->str();
            if (claim.error.empty()) return {StepStatus::Pass, detail + " exactly"};
            detail += " modulo (";
            for (std::size_t i = 0; i < claim.error.size(); ++i)
                detail += (i ? ", " : "") + mono_str(Mono::from_exps(claim.error[i]), c.ring()->names());
            return {StepStatus::Pass, detail + ")"};
        });
    }
}

void Runner::memberships() {
    // f = M * u with M a monomial; u must be a unit at the origin when
    // "unit" is set (the default), otherwise only divisibility is claimed.
    for (const auto& d : list_field(doc_, "memberships")) {
        std::string id = "membership:" + str_field(d, "id", "memberships");
        const Chart& c = chart_of(d, id);
        Frac f = expr(c, str_field(d, "function", id), id);
        std::string mtext = str_field(d, "factor", id);
        auto m = monomial(c, mtext, id);
        bool unit = !d.contains("unit") || d.at("unit").get<bool>();
        step(id, "membership", d, c.name, [&]() -> std::pair<StepStatus, std::string> {
            Frac q = f.local_divide_monomial(m);
            std::string detail = f.str() + " = " + mtext + " * (" + q.str() + ")";
            if (!unit) return {StepStatus::Pass, detail};
            std::vector<long long> origin(static_cast<std::size_t>(c.ring()->nvars()), 0);
            long long r = q.localized(origin).residue(origin);
            if (r == 0) return {StepStatus::Fail, detail + "; cofactor vanishes at the origin"};
            return {StepStatus::Pass, detail + ", a unit at the origin"};
        });
    }
}

void Runner::bad_loci() {
    for (const auto& d : list_field(doc_, "bad_loci")) {
        std::string id = "bad-locus:" + str_field(d, "id", "bad_loci");
        const Chart& c = chart_of(d, id);
        BadLocusClaim claim;
        claim.id = id;
        claim.cartier = monomial(c, str_field(d, "cartier", id), id);
        if (d.contains("support"))
            for (const auto& n : str_list(d.at("support"), id)) claim.support.push_back(coord(c, n, id));
        for (const auto& comp : list_field(d, "components")) claim.components.push_back(component(c, comp, id));
        bool done = false;
        step(id, "bad-locus", d, c.name, [&]() -> std::pair<StepStatus, std::string> {
            auto r = certify_bad_locus(c.action, claim, scan_degree_);
            std::string detail = std::to_string(claim.components.size()) + " component(s); " + r.certificate;
            if (!r.problems.empty()) detail += "; " + r.problems.front();
            if (!r.ok()) return {StepStatus::Fail, detail};
            done = true;
            return {r.exact ? StepStatus::Pass : StepStatus::Heuristic, detail};
        });
        if (!done) continue;
        for (const auto& comp : claim.components) {
            if (!comp.is_point()) continue;
            std::vector<long long> pt;
            for (const auto& x : comp.coords) pt.push_back(*x);
            bad_points_[c.stage].push_back(c.name + point_str(pt, c.ring()->p()));
        }
    }
}

void Runner::identifications() {
    for (const auto& d : list_field(doc_, "identifications")) {
        std::string id = "identification:" + str_field(d, "id", "identifications");
        const json& a = req(d, "a", id);
        const json& b = req(d, "b", id);
        const Chart& ca = chart_of(a, id);
        const Chart& cb = chart_of(b, id);
        auto pa = point(ca, req(a, "point", id), id);
        auto pb = point(cb, req(b, "point", id), id);
        if (ca.stage != cb.stage) input_error(id, "charts " + ca.name + " and " + cb.name + " are from different stages");
        bool chart_ok = active(ca.name) || active(cb.name);
        if (!chart_ok) {
            skip(id, "identification", d);
            continue;
        }
        try {
            auto r = verify_transition(lookup_, ca, pa, cb, pb);
            std::string ka = ca.name + point_str(pa, ca.ring()->p());
            std::string kb = cb.name + point_str(pb, cb.ring()->p());
            add(id, "identification", r.ok ? StepStatus::Pass : StepStatus::Fail, d, ka + " ~ " + kb + ": " + r.detail);
            if (r.ok) identified_.emplace_back(ka, kb);
        } catch (const std::exception& e) {
            add(id, "identification", StepStatus::Fail, d, e.what());
        }
    }
}

SingularityType type_from(const json& t, const std::string& where) {
    long long r = int_field(t, "r", where);
    std::vector<long long> b;
    for (const auto& x : req(t, "b", where)) b.push_back(x.get<long long>());
    return SingularityType(r, b);
}

bool same_residues(std::vector<long long> a, std::vector<long long> b, long long p) {
    for (auto& x : a) x = ((x % p) + p) % p;
    for (auto& x : b) x = ((x % p) + p) % p;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

void Runner::mups() {
    for (const auto& d : list_field(doc_, "mup")) {
        std::string name = str_field(d, "id", "mup");
        std::string id = "mup:" + name;
        const Chart& c = chart_of(d, id);
        Frac e = expr(c, str_field(d, "e", id), id);
        Frac s = expr(c, str_field(d, "s", id), id);
        const json& ex = req(d, "expect", id);
        std::string want_outcome = str_field(ex, "outcome", id);
        std::optional<SingularityType> want_type;
        if (ex.contains("type")) want_type = type_from(ex.at("type"), id);
        std::optional<std::vector<long long>> want_eig;
        if (ex.contains("eigenvalues")) want_eig = ex.at("eigenvalues").get<std::vector<long long>>();
        std::string want_rt = opt_str(ex, "reid_tai");
        MupRecord& rec = mups_[name];
        if (rec.decl) input_error(id, "duplicate mup id");
        rec.decl = &d;
        rec.chart = c.name;
        mup_order_.push_back(name);
        step(id, "mup", d, c.name, [&]() -> std::pair<StepStatus, std::string> {
            rec.report = check_mup(c.action, e, s);
            const MupReport& m = rec.report;
            std::string got = to_string(m.outcome);
            std::string detail = got;
            if (m.outcome == MupOutcome::Toric) detail += " " + m.type.str();
            if (m.outcome == MupOutcome::Inapplicable) detail += ": " + m.reason;
            if (got != want_outcome) return {StepStatus::Fail, detail + "; expected " + want_outcome};
            if (want_type && m.outcome == MupOutcome::Toric && !m.type.equivalent(*want_type))
                return {StepStatus::Fail, detail + "; expected type " + want_type->str()};
            if (want_eig && !same_residues(m.eigen_raw, *want_eig, c.ring()->p())) {
                std::string e2;
                for (auto x : m.eigen_raw) e2 += (e2.empty() ? "" : ",") + std::to_string(x);
                return {StepStatus::Fail, detail + "; eigenvalues " + e2 + " differ from the declared ones"};
            }
            rec.ok = true;
            return {StepStatus::Pass, detail};
        });
        if (!rec.ok || rec.report.outcome == MupOutcome::Inapplicable) continue;
        step("reid-tai:" + name, "reid-tai", d, c.name, [&]() -> std::pair<StepStatus, std::string> {
            if (rec.report.outcome == MupOutcome::Regular) {
                rec.verdict = ReidTai::Terminal;
                return {want_rt.empty() || want_rt == "terminal" ? StepStatus::Pass : StepStatus::Fail, "regular point"};
            }
            auto r = reid_tai(rec.report.type);
            rec.verdict = r.verdict;
            std::string detail = rec.report.type.str() + " " + to_string(r.verdict) + "; sums";
            for (auto x : r.sums) detail += " " + std::to_string(x);
            if (!want_rt.empty() && want_rt != to_string(r.verdict))
                return {StepStatus::Fail, detail + "; expected " + want_rt};
            return {StepStatus::Pass, detail};
        });
    }
}

void Runner::ramifications() {
    for (const auto& d : list_field(doc_, "ramification")) {
        std::string sym = str_field(d, "divisor", "ramification");
        std::string id = "ramification:" + sym;
        const Chart& c = chart_of(d, id);
        int t = coord(c, str_field(d, "coordinate", id), id);
        const json& ex = req(d, "expect", id);
        std::string want_kind = str_field(ex, "kind", id);
        long long want_artin = int_field(ex, "artin", id);
        if (!global_active()) {
            skip(id, "ramification", d);
            continue;
        }
        try {
            std::vector<long long> origin(static_cast<std::size_t>(c.ring()->nvars()), 0);
            auto it = c.divisors.find(sym);
            if (it == c.divisors.end()) {
                add(id, "ramification", StepStatus::Fail, d, sym + " is not visible in chart " + c.name);
                continue;
            }
            Frac ratio = it->second / Frac::var(c.ring(), t);
            if (!(ratio.valuation(t) == 0 && ratio.residue(origin) != 0)) {
                add(id, "ramification", StepStatus::Fail, d, sym + " is not {" + c.ring()->names()[static_cast<std::size_t>(t)] + " = 0}");
                continue;
            }
            auto r = ramification(c.action, t, sym);
            std::string detail = to_string(r.kind) + ", i(" + sym + ") = " + std::to_string(r.artin) + ", v(I(t)) = " +
                                 std::to_string(r.valuation_I_t);
            bool ok = to_string(r.kind) == want_kind && r.artin == want_artin;
            if (!ok) detail += "; expected " + want_kind + " with i = " + std::to_string(want_artin);
            add(id, "ramification", ok ? StepStatus::Pass : StepStatus::Fail, d, detail);
            ram_.push_back(r);
        } catch (const std::exception& e) {
            add(id, "ramification", StepStatus::Fail, d, e.what());
        }
    }
}

void Runner::ledger() {
    json none = json::object();
    if (!global_active()) {
        skip("ledger:solve", "ledger", none);
        return;
    }
    if (!pullbacks_ok_) {
        add("ledger:solve", "ledger", StepStatus::Fail, none, "blow-up bookkeeping failed");
        return;
    }
    try {
        Ledger L(rc_.p);
        for (const auto& d : list_field(doc_, "blowups")) {
            std::string sym = str_field(d, "symbol", "blowups");
            L.record_blowup(sym, chart_center_size_.at("@" + sym), chart_pullbacks_.at("@" + sym), opt_str(d, "citation"));
        }
        L.record_ramification(ram_);
        disc_ = L.solve();
        std::string why;
        bool cons = L.consistent(&why);
        std::string detail;
        for (const auto& [s, a] : disc_) detail += (detail.empty() ? "" : ", ") + std::string("a(") + s + ") = " + a.get_str();
        add("ledger:solve", "ledger", StepStatus::Pass, none, "K = pi^*K_0 + " + L.canonical().str() + "; " + detail);
        add("ledger:consistency", "ledger", cons ? StepStatus::Pass : StepStatus::Fail, none,
            cons ? "f^*(K_top/G - pi^*K_0/G) replayed term by term" : why);
        int n = 0;
        for (const auto& eq : L.trace())
            rep_.steps.push_back({"ledger:eq" + std::to_string(++n), "ledger-equation", StepStatus::Pass, eq.citation, eq.text});
        ledger_ok_ = cons;
        ledger_.emplace(std::move(L));
    } catch (const std::exception& e) {
        add("ledger:solve", "ledger", StepStatus::Fail, none, e.what());
    }
}

void Runner::pairs() {
    for (const auto& d : list_field(doc_, "pairs")) {
        std::string name = str_field(d, "id", "pairs");
        std::string id = "pair:" + name;
        std::string mid = str_field(d, "mup", id);
        auto mit = mups_.find(mid);
        if (mit == mups_.end()) input_error(id, "unknown mup id '" + mid + "'");
        MupRecord& rec = mit->second;
        const Chart& c = chart(rec.chart, id);
        std::vector<std::pair<mpq_class, long long>> want;
        for (const auto& t : req(d, "expect_terms", id)) {
            if (!t.is_array() || t.size() != 2) input_error(id, "expect_terms entries are [coefficient, weight]");
            want.emplace_back(mpq_class(t[0].get<long>()), ((t[1].get<long long>() % c.ring()->p()) + c.ring()->p()) % c.ring()->p());
        }
        if (!global_active()) {
            skip(id, "pair", d);
            continue;
        }
        step(id, "pair", d, "", [&]() -> std::pair<StepStatus, std::string> {
            if (!rec.ok || rec.report.outcome != MupOutcome::Toric) return {StepStatus::Fail, "mup step " + mid + " did not yield a toric type"};
            if (!ledger_) return {StepStatus::Fail, "discrepancies unavailable"};
            const long long p = c.ring()->p();
            const int n = c.ring()->nvars();
            std::vector<long long> origin(static_cast<std::size_t>(n), 0);
            // Divisors through the point, each matched to a coordinate hyperplane.
            std::vector<std::string> div_of(static_cast<std::size_t>(n));
            for (const auto& [sym, f] : c.divisors) {
                if (f.residue(origin) != 0) continue;
                int hit = -1;
                for (int j = 0; j < n && hit < 0; ++j) {
                    if (f.valuation(j) != 1) continue;
                    Frac q = f.local_divide(j, 1);
                    try {
                        if (q.residue(origin) != 0) hit = j;
                    } catch (const NotLocal&) {
                    }
                }
                if (hit < 0) return {StepStatus::Fail, sym + " passes through the point but is not a coordinate hyperplane"};
                div_of[static_cast<std::size_t>(hit)] = sym;
            }
            std::vector<long long> rest = rec.report.type.b;
            std::vector<long long> weights(static_cast<std::size_t>(n), -1);
            std::vector<mpq_class> cs(static_cast<std::size_t>(n), 0);
            for (int j = 0; j < n; ++j) {
                const std::string& sym = div_of[static_cast<std::size_t>(j)];
                if (sym.empty()) continue;
                long long w = ((divisor_weight(c.action, rec.report, j).normalized % p) + p) % p;
                auto it = std::find(rest.begin(), rest.end(), w);
                if (it == rest.end()) return {StepStatus::Fail, "weight of " + sym + " is not an eigenvalue of the type"};
                rest.erase(it);
                weights[static_cast<std::size_t>(j)] = w;
                auto dit = std::find_if(disc_.begin(), disc_.end(), [&](const auto& x) { return x.first == sym; });
                if (dit == disc_.end()) return {StepStatus::Fail, "no discrepancy for " + sym};
                cs[static_cast<std::size_t>(j)] = -dit->second;
            }
            std::size_t k = 0;
            for (auto& w : weights)
                if (w < 0) w = rest[k++];
            SingularityType t(p, weights);
            auto r = reid_tai_pair(t, cs);
            std::vector<std::pair<mpq_class, long long>> got;
            std::string terms;
            for (int j = 0; j < n; ++j) {
                long long b = weights[static_cast<std::size_t>(j)];
                if (b == 0) continue;
                mpq_class coef = 1 - cs[static_cast<std::size_t>(j)];
                got.emplace_back(coef, b);
                terms += (terms.empty() ? "" : " + ") + coef.get_str() + "(" + (b == 1 ? std::string("") : std::to_string(b)) +
                         "i mod " + std::to_string(p) + ")";
            }
            auto by = [](const auto& a, const auto& b) { return a.first != b.first ? a.first < b.first : a.second < b.second; };
            std::sort(want.begin(), want.end(), by);
            std::string detail = terms + " > " + std::to_string(p) + ":";
            for (const auto& x : r.sums) detail += " " + x.get_str();
            rec.pair = r.ok;
            // The declared inequality may use another generator of mu_p: the
            // family of inequalities is unchanged under b -> k b, k a unit.
            long long scale = 0;
            for (long long k = 1; k < p && !scale; ++k) {
                auto g = got;
                for (auto& [coef, b] : g) b = (b * k) % p;
                std::sort(g.begin(), g.end(), by);
                if (g == want) scale = k;
            }
            if (!scale) return {StepStatus::Fail, detail + "; terms differ from the declared inequality"};
            if (scale != 1) detail += "; declared form uses i -> " + std::to_string(scale) + "i";
            if (!r.ok) return {StepStatus::Fail, detail + "; " + r.reason};
            return {StepStatus::Pass, detail};
        });
    }
}

void Runner::expectations() {
    const json& ex = req(doc_, "expect", "expect");
    if (!ex.is_object()) input_error("expect", "must be an object");
    static const std::set<std::string> known = {"canonical", "ramification_divisor", "fixed_divisor", "discrepancies", "bad_points",
                                                "types", "verdict", "mup_count"};
    for (const auto& [key, e] : ex.items()) {
        std::string id = "expect:" + key;
        if (!known.count(key)) input_error(id, "unknown expectation");
        if (!e.is_object() || !e.contains("value")) input_error(id, "expectation needs a value");
        if (!global_active() && key != "verdict") {
            skip(id, "expect", e);
            continue;
        }
        std::string cit = opt_str(e, "citation");
        std::string src = opt_str(e, "source");
        if (cit.empty() || (src != "stated" && src != "derived" && src != "external")) {
            add(id, "expect", StepStatus::Fail, e, "expectation lacks a citation or a source (stated, derived, external)");
            continue;
        }
        if (key == "verdict") continue;  // compared by the verdict step
        const json& v = e.at("value");
        auto cmp_div = [&](const DivClass& have) -> std::pair<StepStatus, std::string> {
            DivClass want;
            for (const auto& [s, k] : v.items()) want.add(s, mpq_class(k.get<long>()));
            bool ok = want.terms().size() == have.terms().size();
            for (const auto& [s, k] : want.terms()) ok = ok && have.coeff(s) == k;
            return {ok ? StepStatus::Pass : StepStatus::Fail, "computed " + have.str() + ", expected " + want.str()};
        };
        step(id, "expect", e, "", [&]() -> std::pair<StepStatus, std::string> {
            if (key == "fixed_divisor") {
                // Generic Cartier part of the fixed point scheme: sum of i(E) E.
                DivClass have;
                for (const auto& r : ram_)
                    if (r.artin) have.add(r.divisor, r.artin);
                return cmp_div(have);
            }
            if (key == "canonical" || key == "ramification_divisor" || key == "discrepancies") {
                if (!ledger_) return {StepStatus::Fail, "ledger unavailable"};
                if (key == "canonical") return cmp_div(ledger_->canonical());
                if (key == "ramification_divisor") return cmp_div(ledger_->ramification_divisor());
                DivClass have;
                for (const auto& [s, a] : disc_) have.add(s, a);
                auto r = cmp_div(have);
                // A zero discrepancy drops out of the class; compare symbols too.
                if (r.first == StepStatus::Pass && v.size() != disc_.size())
                    return {StepStatus::Fail, "expected discrepancies for " + std::to_string(v.size()) + " divisors"};
                return r;
            }
            if (key == "bad_points") {
                int stage = static_cast<int>(int_field(e, "stage", id));
                const auto& pts = bad_points_[stage];
                std::map<std::string, std::string> parent;
                for (const auto& p : pts) parent[p] = p;
                std::function<std::string(const std::string&)> find = [&](const std::string& x) {
                    return parent[x] == x ? x : parent[x] = find(parent[x]);
                };
                for (const auto& [a, b] : identified_)
                    if (parent.count(a) && parent.count(b)) parent[find(a)] = find(b);
                std::set<std::string> classes;
                for (const auto& p : pts) classes.insert(find(p));
                long long want = v.get<long long>();
                std::string detail = std::to_string(pts.size()) + " declared point(s) in " + std::to_string(classes.size()) +
                                     " class(es), expected " + std::to_string(want);
                return {static_cast<long long>(classes.size()) == want ? StepStatus::Pass : StepStatus::Fail, detail};
            }
            if (key == "mup_count") {
                long long want = v.get<long long>();
                long long have = static_cast<long long>(mup_order_.size());
                return {have == want ? StepStatus::Pass : StepStatus::Fail,
                        std::to_string(have) + " mup invocation(s), expected " + std::to_string(want)};
            }
            // types: multiset of declared singularity types over all mup points
            std::vector<std::string> have, want;
            for (const auto& n : mup_order_) {
                const auto& r = mups_.at(n);
                if (!r.ok) return {StepStatus::Fail, "mup step " + n + " failed"};
                have.push_back(r.report.outcome == MupOutcome::Regular ? "regular" : r.report.type.canonical().str());
            }
            for (const auto& t : v) want.push_back(t.is_string() ? t.get<std::string>() : type_from(t, id).canonical().str());
            std::sort(have.begin(), have.end());
            std::sort(want.begin(), want.end());
            std::string detail = std::to_string(have.size()) + " type(s):";
            for (std::size_t i = 0; i < have.size(); ++i)
                if (i == 0 || have[i] != have[i - 1])
                    detail += " " + std::to_string(std::count(have.begin(), have.end(), have[i])) + "x" + have[i];
            return {have == want ? StepStatus::Pass : StepStatus::Fail, detail};
        });
    }
}

void Runner::verdict() {
    const json& ex = req(doc_, "expect", "expect");
    const json& vd = req(ex, "verdict", "expect");
    rep_.expected_verdict = str_field(vd, "value", "expect:verdict");
    if (!global_active()) {
        rep_.filtered = true;
        rep_.verdict = "partial";
        skip("verdict", "verdict", vd);
        return;
    }
    std::string why;
    std::string v;
    if (rep_.failed() || !ledger_ok_) {
        v = "unverified";
        why = "a hard check failed";
    } else {
        bool all_pos = true, all_nonneg = true;
        for (const auto& [s, a] : disc_) {
            all_pos = all_pos && a > 0;
            all_nonneg = all_nonneg && a >= 0;
        }
        bool pts_term = true, pts_can = true;
        std::string bad;
        for (const auto& n : mup_order_) {
            const auto& r = mups_.at(n);
            bool term = r.verdict == ReidTai::Terminal || (r.pair && *r.pair);
            bool can = term || r.verdict == ReidTai::Canonical;
            if (!term && bad.empty()) bad = n;
            pts_term = pts_term && term;
            pts_can = pts_can && can;
        }
        if (all_pos && pts_term) {
            v = "terminal";
            why = "every discrepancy is positive and every point is terminal";
        } else if (all_nonneg && pts_can) {
            v = "canonical";
            why = all_pos ? "point " + bad + " is canonical only" : "a discrepancy vanishes";
        } else {
            v = "not terminal";
            why = !all_nonneg ? "a discrepancy is negative" : "point " + bad + " is not canonical";
        }
    }
    rep_.verdict = v;
    bool ok = v == rep_.expected_verdict;
    add("verdict", "verdict", ok ? StepStatus::Pass : StepStatus::Fail, vd,
        v + " (" + why + "); expected " + rep_.expected_verdict);
}

Report Runner::run() {
    std::string schema = str_field(doc_, "schema", "scenario");
    if (schema != "quotver.scenario/1") input_error("scenario", "unsupported schema '" + schema + "'");
    rep_.scenario = str_field(doc_, "id", "scenario");
    rep_.title = opt_str(doc_, "title");
    if (doc_.contains("runtime_limit_seconds")) rep_.limit_seconds = doc_.at("runtime_limit_seconds").get<double>();
    scan_degree_ = opts_.max_scan_degree ? *opts_.max_scan_degree : scan_degree_from_env(4);
    if (scan_degree_ < 1) input_error("scenario", "scan degree must be positive");
    build_ring();
    if (!opts_.chart.empty()) {
        bool found = false;
        for (const auto& d : list_field(doc_, "charts")) found = found || opt_str(d, "id") == opts_.chart;
        if (!found) input_error("--chart", "unknown chart '" + opts_.chart + "'");
    }
    for (const auto& a : list_field(doc_, "assumptions"))
        add("assumption:" + str_field(a, "id", "assumptions"), "assumption", StepStatus::Cited, a, str_field(a, "text", "assumptions"));
    build_charts();
    order_checks();
    reference_actions();
    projective_conjugations();
    cm_witnesses();
    invariant_forms();
    fixed_loci();
    blowups();
    expansions();
    memberships();
    bad_loci();
    identifications();
    mups();
    ramifications();
    ledger();
    pairs();
    expectations();
    verdict();
    return rep_;
}

// Step ids declared by a document, with the declaration they come from.
std::vector<std::tuple<std::string, std::string, const json*>> declared_steps(const json& doc) {
    std::vector<std::tuple<std::string, std::string, const json*>> out;
    auto each = [&](const char* key, const char* field, const std::string& prefix, const std::string& kind) {
        if (!doc.contains(key) || !doc.at(key).is_array()) return;
        for (const auto& d : doc.at(key)) out.emplace_back(prefix + opt_str(d, field), kind, &d);
    };
    each("assumptions", "id", "assumption:", "assumption");
    each("charts", "id", "chart:", "chart");
    each("charts", "id", "order:", "order");
    each("charts", "id", "relation:", "relation");
    each("actions_mod_p", "id", "mod-p:", "mod-p");
    each("projective_conjugation", "id", "projective:", "projective");
    each("cm_witness", "id", "cm:", "cm-witness");
    each("invariant_forms", "id", "form:", "invariant-form");
    each("fixed_loci", "id", "fixed-locus:", "fixed-locus");
    each("blowups", "symbol", "blowup:", "blowup");
    each("expansions", "id", "expansion:", "expansion");
    each("memberships", "id", "membership:", "membership");
    each("bad_loci", "id", "bad-locus:", "bad-locus");
    each("identifications", "id", "identification:", "identification");
    each("mup", "id", "mup:", "mup");
    each("mup", "id", "reid-tai:", "reid-tai");
    each("ramification", "divisor", "ramification:", "ramification");
    each("pairs", "id", "pair:", "pair");
    if (doc.contains("expect") && doc.at("expect").is_object())
        for (const auto& [k, v] : doc.at("expect").items()) out.emplace_back("expect:" + k, "expect", &v);
    static const json none = json::object();
    out.emplace_back("ledger:solve", "ledger", &none);
    out.emplace_back("ledger:consistency", "ledger", &none);
    out.emplace_back("verdict", "verdict", &none);
    return out;
}

json load_resolved(const std::string& path) {
    namespace fs = std::filesystem;
    return resolve_document(load_json_file(path), fs::path(path).parent_path().string());
}

}  // namespace

std::vector<Chart> Runner::charts_only() {
    build_ring();
    build_charts();
    std::vector<Chart> out;
    for (const auto& name : chart_order_) out.push_back(*charts_.at(name));
    return out;
}

std::vector<Chart> scenario_charts(const std::string& path) {
    json doc = load_resolved(path);
    Runner runner(doc, RunOptions{});
    try {
        return runner.charts_only();
    } catch (const json::exception& e) {
        throw ScenarioInputError(std::string("malformed scenario: ") + e.what());
    }
}

Report run_scenario_text(const std::string& text, const std::string& base_dir, const RunOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioInputError(e.what());
    }
    doc = resolve_document(std::move(doc), base_dir);
    Report r;
    try {
        Runner runner(doc, opts);
        r = runner.run();
    } catch (const json::exception& e) {
        throw ScenarioInputError(std::string("malformed scenario: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

Report run_scenario_file(const std::string& path, const RunOptions& opts) {
    std::ifstream in(path);
    if (!in) throw ScenarioInputError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return run_scenario_text(ss.str(), std::filesystem::path(path).parent_path().string(), opts);
}

ScenarioSummary scenario_summary(const std::string& path) {
    json raw = load_json_file(path);
    json doc = load_resolved(path);
    return {opt_str(doc, "id"), opt_str(doc, "title"), path, opt_str(raw, "base")};
}

std::string describe_kind(const std::string& kind) {
    static const std::map<std::string, std::string> d = {
        {"assumption", "Hypothesis taken from the literature; recorded, not checked."},
        {"chart", "Builds the chart (root, coordinate change, shift or blow-up chart), transporting the action and the "
                  "divisor table, and compares any declared tau images and divisor equations."},
        {"order", "Checks that sigma^p is the identity on the chart: exactly in positive characteristic, by iterating "
                  "the point map over sampled prime fields on derived mixed-characteristic charts."},
        {"relation", "Checks that sigma maps the defining relation of the chart ring to zero."},
        {"mod-p", "Reduces the chart action modulo p (setting the ramified generator to zero) and compares it with a "
                  "reference action over F_p."},
        {"projective", "Conjugates a birational action on projective space by a linear change of variables, compares "
                       "the result with the declared forms up to scale, and dehomogenizes against a chart."},
        {"cm-witness", "Checks that a function has trace zero and is a unit at a fixed point, which rules out the "
                       "Cohen-Macaulay property of the quotient."},
        {"invariant-form", "Checks that a logarithmic volume form is sigma-invariant from the transformation of its "
                           "factors."},
        {"fixed-locus", "Certifies the fixed locus on the listed coordinate hyperplanes: declared components satisfy "
                        "the equations and a scan over F_{p^k} finds nothing else."},
        {"blowup", "Collects the multiplicities of earlier exceptional divisors along the new one and the "
                   "codimension of the center, for the canonical class ledger."},
        {"expansion", "Checks a claim I(v) = M (g/h + error) with the error in a monomial ideal, exactly in the chart "
                      "ring."},
        {"membership", "Checks f = M * (cofactor) for a monomial M, with the cofactor a unit at the origin unless "
                       "only divisibility is claimed."},
        {"bad-locus", "Divides the fixed-point equations by the generic Cartier part and certifies the declared bad "
                      "components (containment plus completeness)."},
        {"identification", "Checks that the transition map between two charts sends one point to the other with "
                           "matching divisors."},
        {"mup", "Applies the mu_p criterion at the chart origin with the declared e and s and reads off the cyclic "
                "quotient type."},
        {"reid-tai", "Classifies the cyclic quotient type with the Reid-Tai sums."},
        {"ramification", "Computes the Artin index i(E) along an exceptional divisor and its kind (unramified, wild, "
                         "fierce)."},
        {"ledger", "Solves the canonical class bookkeeping for the discrepancies a_j and replays the relations."},
        {"ledger-equation", "One relation of the canonical class bookkeeping."},
        {"pair", "Reid-Tai criterion for the pair (quotient, -sum a_j F_j) at a point, with divisor weights from the "
                 "mu_p data."},
        {"expect", "Compares a computed quantity with the expectation block of the scenario."},
        {"verdict", "Terminal iff all discrepancies are positive and every point is terminal or passes its pair check."},
    };
    auto it = d.find(kind);
    return it == d.end() ? "unknown step kind" : it->second;
}

std::optional<std::string> explain_step(const std::string& path, const std::string& step_id) {
    json doc = load_resolved(path);
    for (const auto& [id, kind, decl] : declared_steps(doc)) {
        if (id != step_id) continue;
        std::ostringstream os;
        os << opt_str(doc, "id") << "/" << id << " [" << kind << "]\n";
        os << describe_kind(kind) << "\n";
        std::string cit = opt_str(*decl, "citation");
        if (!cit.empty()) os << "citation: " << cit << "\n";
        if (!decl->empty()) os << "declaration:\n" << decl->dump(2) << "\n";
        return os.str();
    }
    if (step_id.rfind("ledger:eq", 0) == 0) return opt_str(doc, "id") + "/" + step_id + " [ledger-equation]\n" + describe_kind("ledger-equation") + "\n";
    return std::nullopt;
}

}  // namespace qv
