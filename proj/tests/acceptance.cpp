// Acceptance run: one line per criterion, each with its runtime limit.
// Numbers below are restated here rather than read from the scenario files,
// so an edited expectation block cannot make a criterion pass.

#include "quotver/scenario.hpp"
#include "quotver/singularity.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

using namespace qv;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kDir = QUOTVER_SCENARIO_DIR;

struct Check {
    std::vector<std::string> failures;
    void require(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

std::string path_of(const std::string& id) { return kDir + "/" + id + ".json"; }

const StepResult* find_step(const Report& r, const std::string& id) {
    for (const auto& s : r.steps)
        if (s.id == id) return &s;
    return nullptr;
}

std::vector<const StepResult*> steps_of(const Report& r, const std::string& kind) {
    std::vector<const StepResult*> out;
    for (const auto& s : r.steps)
        if (s.kind == kind) out.push_back(&s);
    return out;
}

bool passed(const Report& r, const std::string& id) {
    const StepResult* s = find_step(r, id);
    return s && s->status == StepStatus::Pass;
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

// "computed X, expected Y" -> X
std::string computed(const Report& r, const std::string& id) {
    const StepResult* s = find_step(r, id);
    if (!s || !starts_with(s->detail, "computed ")) return "";
    std::string d = s->detail.substr(9);
    return d.substr(0, d.find(", expected"));
}

// "toric 1/r(b1,...,bn)" -> type
std::optional<SingularityType> toric_type(const std::string& detail) {
    if (!starts_with(detail, "toric 1/")) return std::nullopt;
    std::string t = detail.substr(8);
    auto open = t.find('('), close = t.find(')');
    if (open == std::string::npos || close == std::string::npos) return std::nullopt;
    long long r = std::stoll(t.substr(0, open));
    std::vector<long long> b;
    std::stringstream ss(t.substr(open + 1, close - open - 1));
    std::string x;
    while (std::getline(ss, x, ',')) b.push_back(std::stoll(x));
    return SingularityType(r, b);
}

std::vector<SingularityType> mup_types(const Report& r) {
    std::vector<SingularityType> out;
    for (const auto* s : steps_of(r, "mup"))
        if (s->status == StepStatus::Pass)
            if (auto t = toric_type(s->detail)) out.push_back(*t);
    return out;
}

int count_equivalent(const std::vector<SingularityType>& v, const SingularityType& t) {
    int n = 0;
    for (const auto& x : v) n += x.equivalent(t) ? 1 : 0;
    return n;
}

// Shape of the chart tree with names dropped: kind, parent position,
// center and kept coordinates by position, exceptional symbol, shift point.
std::vector<std::string> tree_shape(const std::string& id) {
    json doc = json::parse(std::ifstream(path_of(id)));
    std::map<std::string, std::size_t> pos;
    std::map<std::string, std::vector<std::string>> coords;
    std::vector<std::string> out;
    for (const auto& c : doc.at("charts")) {
        std::string name = c.at("id");
        std::ostringstream sig;
        for (const char* kind : {"root", "change", "shift", "blowup"}) {
            if (!c.contains(kind)) continue;
            const json& d = c.at(kind);
            sig << kind;
            if (d.contains("from")) sig << " from " << pos.at(d.at("from"));
            auto index = [&](const std::string& v) {
                const auto& cs = coords.at(d.at("from"));
                return std::find(cs.begin(), cs.end(), v) - cs.begin();
            };
            if (d.contains("center"))
                for (const auto& v : d.at("center")) sig << " c" << index(v);
            if (d.contains("kept")) sig << " k" << index(d.at("kept"));
            if (d.contains("exceptional")) sig << " " << d.at("exceptional").get<std::string>();
            if (d.contains("point")) sig << " " << d.at("point").dump();
            coords[name] = d.at("coords").get<std::vector<std::string>>();
        }
        pos[name] = out.size();
        out.push_back(sig.str());
    }
    return out;
}

void common(Check& c, const Report& r, const std::string& verdict) {
    c.require(r.passed(), "scenario " + r.scenario + " does not pass");
    c.require(r.verdict == verdict, "verdict " + r.verdict);
    auto cm = steps_of(r, "cm-witness");
    c.require(!cm.empty() && std::all_of(cm.begin(), cm.end(), [](const StepResult* s) { return s->status == StepStatus::Pass; }),
              "cm witness");
}

// --- criteria --------------------------------------------------------------

double c1(Check& c) {
    Report r = run_scenario_file(path_of("z2"));
    common(c, r, "terminal");
    c.require(passed(r, "expect:bad_points") && find_step(r, "expect:bad_points")->detail.find("in 7 class(es)") != std::string::npos,
              "7 bad points on E0");
    auto types = mup_types(r);
    c.require(types.size() == 7 && count_equivalent(types, SingularityType(2, {1, 1, 1})) == 7, "seven mup results 1/2(1,1,1)");
    const StepResult* ram = find_step(r, "ramification:E0");
    c.require(ram && ram->status == StepStatus::Pass && starts_with(ram->detail, "fierce, i(E0) = 1"), "E0 fierce with i = 1");
    c.require(computed(r, "expect:discrepancies") == "E0", "a0 = 1");
    c.require(reid_tai(SingularityType(2, {1, 1, 1})).verdict == ReidTai::Terminal, "1/2(1,1,1) terminal");
    return r.seconds;
}

// Shared by the char-3 and (0,3) criteria.
void char3_checks(Check& c, const Report& r) {
    common(c, r, "terminal");
    auto fl = steps_of(r, "fixed-locus");
    c.require(!fl.empty(), "fixed locus of Y1 certified");
    for (const auto* s : fl) {
        c.require(s->status == StepStatus::Pass, s->id + " passes");
        // every declared component is one-dimensional: one free coordinate
        std::size_t pos = 0;
        while ((pos = s->detail.find('(', pos)) != std::string::npos) {
            std::string comp = s->detail.substr(pos, s->detail.find(')', pos) - pos);
            if (comp.find("declared") == std::string::npos && comp.find(',') != std::string::npos)
                c.require(std::count(comp.begin(), comp.end(), '*') == 1, s->id + " component " + comp + " is a line");
            ++pos;
        }
    }
    c.require(passed(r, "expect:bad_points") && find_step(r, "expect:bad_points")->detail.find("in 6 class(es)") != std::string::npos,
              "6 bad points on E1");
    auto types = mup_types(r);
    c.require(types.size() == 6, "six mup results");
    c.require(count_equivalent(types, SingularityType(3, {1, 1, 2})) == 5, "five 1/3(1,1,2)");
    c.require(count_equivalent(types, SingularityType(3, {1, 1, 1})) == 1, "one 1/3(1,1,1)");
    c.require(reid_tai(SingularityType(3, {1, 1, 2})).verdict == ReidTai::Terminal, "1/3(1,1,2) terminal");
    c.require(reid_tai(SingularityType(3, {1, 1, 1})).verdict == ReidTai::Canonical, "1/3(1,1,1) canonical");
    int canonical_rt = 0;
    for (const auto* s : steps_of(r, "reid-tai")) canonical_rt += s->detail.find("canonical") != std::string::npos ? 1 : 0;
    c.require(canonical_rt == 1, "one canonical point in the run");
    c.require(computed(r, "expect:discrepancies") == "2E0 + E1", "discrepancies (2,1)");
    auto pairs = steps_of(r, "pair");
    c.require(pairs.size() == 1 && pairs[0]->status == StepStatus::Pass, "pair check at the canonical point");
}

double c2(Check& c) {
    Report r = run_scenario_file(path_of("f3"));
    char3_checks(c, r);
    return r.seconds;
}

double c3(Check& c) {
    Report r = run_scenario_file(path_of("z3"));
    char3_checks(c, r);
    c.require(tree_shape("z3") == tree_shape("f3"), "chart tree identical to the char-3 scenario");
    const StepResult* m = find_step(r, "membership:3.Y0");
    c.require(m && m->status == StepStatus::Pass && starts_with(m->detail, "3 = e2^3 * ") &&
                  m->detail.find("a unit at the origin") != std::string::npos,
              "3 in e2^3 (unit)");
    c.require(passed(r, "cm:1-e2"), "cm witness 1 - e2");
    return r.seconds;
}

// Types listed for the char-5 example, as (r; b).
const std::vector<std::vector<long long>> kF5Types = {
    {0, 1, 2}, {2, 1, 0}, {1, -1, -2}, {2, 1, 1}, {-2, 2, -2}, {2, -2, -1}, {-2, 1, 0},
    {-2, 0, 1}, {2, -1, 2}, {2, 2, 0}, {2, -2, 1}, {-1, -2, -1}, {2, 0, 2},
};

// The six numbered pair inequalities, as (coefficient, multiplier of i).
const std::vector<std::vector<std::pair<int, int>>> kF5Pairs = {
    {{4, 1}, {3, 2}},
    {{3, 2}, {3, 1}, {1, 1}},
    {{5, -2}, {5, 1}},
    {{3, 2}, {5, 2}, {1, -1}},
    {{5, 2}, {5, 2}},
    {{2, -2}, {5, -1}, {1, -1}},
};

long long mod5(long long x) { return ((x % 5) + 5) % 5; }

void char5_checks(Check& c, const Report& r, const std::string& id) {
    common(c, r, "terminal");
    c.require(computed(r, "expect:canonical") == "2E0 + 3E1 + 6E2 + 5E3 + 4E4 + 8E5 + 12E6", "K_Y7");
    c.require(computed(r, "expect:fixed_divisor") == "E2 + E3 + E5 + 2E6", "ramification divisor E2 + E3 + E5 + 2E6");
    c.require(computed(r, "expect:discrepancies") == "2E0 + 3E1 + 2E2 + E3 + 4E4 + 4E5 + 4E6", "discrepancies (2,3,2,1,4,4,4)");
    auto types = mup_types(r);
    for (const auto& b : kF5Types) {
        std::vector<long long> w;
        for (auto x : b) w.push_back(mod5(x));
        SingularityType t(5, w);
        c.require(count_equivalent(types, t) >= 1, "type " + t.str() + " found");
    }
    for (const auto& t : types) {
        bool listed = false;
        for (const auto& b : kF5Types) {
            std::vector<long long> w;
            for (auto x : b) w.push_back(mod5(x));
            listed = listed || t.equivalent(SingularityType(5, w));
        }
        c.require(listed, "computed type " + t.str() + " is listed");
    }
    // Each inequality holds, and a passing pair step declares exactly it.
    json doc = json::parse(std::ifstream(path_of(id)));
    for (std::size_t k = 0; k < kF5Pairs.size(); ++k) {
        for (long long i = 1; i < 5; ++i) {
            long long s = 0;
            for (auto [a, m] : kF5Pairs[k]) s += a * mod5(m * i);
            c.require(s > 5, "inequality (" + std::to_string(k + 1) + ") at i = " + std::to_string(i));
        }
        bool found = false;
        for (const auto& p : doc.at("pairs")) {
            std::vector<std::pair<int, int>> terms;
            for (const auto& t : p.at("expect_terms")) terms.emplace_back(t[0].get<int>(), t[1].get<int>());
            if (terms == kF5Pairs[k] && passed(r, "pair:" + p.at("id").get<std::string>())) found = true;
        }
        c.require(found, "pair check (" + std::to_string(k + 1) + ") passes");
    }
    for (const auto* s : steps_of(r, "pair")) c.require(s->status == StepStatus::Pass, s->id + " passes");
}

double c4(Check& c) {
    Report r = run_scenario_file(path_of("f5"));
    char5_checks(c, r, "f5");
    return r.seconds;
}

double c5(Check& c) {
    Report r = run_scenario_file(path_of("z5"));
    char5_checks(c, r, "z5");
    c.require(tree_shape("z5") == tree_shape("f5"), "chart tree identical to the char-5 scenario");
    const StepResult* m = find_step(r, "membership:5.Y0");
    c.require(m && m->status == StepStatus::Pass && starts_with(m->detail, "5 = e2^5 * ") &&
                  m->detail.find("a unit at the origin") != std::string::npos,
              "5 in e2^5 (unit)");
    auto modp = steps_of(r, "mod-p");
    c.require(!modp.empty() && std::all_of(modp.begin(), modp.end(), [](const StepResult* s) { return s->status == StepStatus::Pass; }),
              "reduction mod 5 equals the char-5 action");
    c.require(passed(r, "cm:1-e2"), "cm witness 1 - e2");
    Report f5 = run_scenario_file(path_of("f5"));
    auto a = mup_types(r), b = mup_types(f5);
    c.require(a.size() == b.size(), "same number of points as char 5");
    for (const auto& t : a) c.require(count_equivalent(a, t) == count_equivalent(b, t), "type " + t.str() + " multiplicity matches char 5");
    return r.seconds;
}

double c6(Check& c) {
    auto t0 = std::chrono::steady_clock::now();
    int rc = std::system(QUOTVER_PROPERTY_TESTS " --minimal > /dev/null 2>&1");
    c.require(rc == 0, "property suites (run " QUOTVER_PROPERTY_TESTS " for details)");
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double c7(Check& c) {
    double total = 0;
    std::set<std::string> bases, twinned;
    for (const auto& e : fs::directory_iterator(kDir)) {
        std::string name = e.path().filename().string();
        if (e.path().extension() != ".json") continue;
        if (name.size() > 9 && name.substr(name.size() - 9) == ".mut.json") {
            json raw = json::parse(std::ifstream(e.path()));
            twinned.insert(raw.at("base").get<std::string>());
            std::string want = raw.value("fails_at", "");
            Report r = run_scenario_file(e.path().string());
            total += r.seconds;
            c.require(r.exit_code() != 0, name + " exits nonzero");
            const StepResult* first = nullptr;
            for (const auto& s : r.steps)
                if (s.status == StepStatus::Fail) {
                    first = &s;
                    break;
                }
            bool at_step = first && (first->kind == "expansion" || first->id == "expect:discrepancies" || first->kind == "ledger");
            c.require(at_step, name + " fails at an expansion or discrepancy step");
            c.require(first && first->id == want, name + " first failure " + (first ? first->id : "none") + ", declared " + want);
        } else {
            bases.insert(name);
        }
    }
    for (const auto& b : bases) c.require(twinned.count(b) == 1, b + " has a mutated twin");
    return total;
}

}  // namespace

int main() {
    struct Criterion {
        int n;
        std::string what;
        double limit;
        std::function<double(Check&)> run;
    };
    const std::vector<Criterion> crit = {
        {1, "(0,2): 7 points 1/2(1,1,1), E0 fierce i=1, a0=1, terminal, cm", 10, c1},
        {2, "char 3: line, 6 points, 5x1/3(1,1,2) + 1/3(1,1,1), (2,1), pair, terminal", 30, c2},
        {3, "(0,3): same tree and results, 3 = e2^3 (unit), cm 1-e2", 30, c3},
        {4, "char 5: K_Y7, E2+E3+E5+2E6, (2,3,2,1,4,4,4), 13 types, pairs (1)-(6), terminal", 300, c4},
        {5, "(0,5): same tree and types, 5 = e2^5 (unit), mod-5 reduction, cm 1-e2", 300, c5},
        {6, "property suites", 300, c6},
        {7, "negative controls: every twin fails at an expansion or discrepancy step", 600, c7},
    };
    int failed = 0;
    for (const auto& k : crit) {
        Check c;
        double secs = 0;
        try {
            secs = k.run(c);
        } catch (const std::exception& e) {
            c.require(false, std::string("exception: ") + e.what());
        }
        c.require(secs < k.limit, "runtime over the limit");
        bool ok = c.failures.empty();
        failed += ok ? 0 : 1;
        std::printf("criterion %d: %s  %.2f s (limit %.0f s)  %s\n", k.n, ok ? "PASS" : "FAIL", secs, k.limit, k.what.c_str());
        for (const auto& f : c.failures) std::printf("    failed: %s\n", f.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
