// quotver: command-line front end for the scenario runner.
#include "quotver/scenario.hpp"
#include "quotver/singularity.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

namespace {

std::string default_scenario_dir() {
    if (const char* d = std::getenv("QUOTVER_SCENARIOS")) return d;
#ifdef QUOTVER_SCENARIO_DIR
    return QUOTVER_SCENARIO_DIR;
#else
    return "scenarios";
#endif
}

std::vector<std::string> scenario_files(const std::string& dir) {
    std::vector<std::string> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json") out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

int cmd_verify(const std::string& file, const std::string& json_out, const std::string& chart, int max_scan, bool timing,
               bool quiet) {
    qv::RunOptions opts;
    opts.chart = chart;
    if (max_scan > 0) opts.max_scan_degree = max_scan;
    qv::Report r = qv::run_scenario_file(file, opts);
    if (!json_out.empty()) {
        std::string doc = r.json(timing);
        if (json_out == "-") {
            std::cout << doc;
        } else {
            std::ofstream out(json_out);
            if (!out) throw qv::ScenarioInputError("cannot write " + json_out);
            out << doc;
        }
    }
    if (!quiet && json_out != "-") std::cout << r.table();
    if (r.failed()) {
        for (const auto& s : r.steps)
            if (s.status == qv::StepStatus::Fail) {
                std::cerr << "first failure: " << s.id << ": " << s.detail << "\n";
                break;
            }
    }
    return r.exit_code();
}

int cmd_reid_tai(const std::vector<long long>& args, const std::vector<std::string>& coeffs, bool as_json) {
    if (args.size() < 2) throw std::invalid_argument("usage: reid-tai r b1 .. bn");
    qv::SingularityType t(args[0], std::vector<long long>(args.begin() + 1, args.end()));
    std::string why;
    if (!t.well_formed(&why)) {
        std::cerr << "not well formed: " << why << "\n";
        return 2;
    }
    if (!coeffs.empty()) {
        if (coeffs.size() != t.b.size()) throw std::invalid_argument("need one coefficient per weight");
        std::vector<mpq_class> c;
        for (const auto& s : coeffs) c.emplace_back(s);
        for (auto& x : c) x.canonicalize();
        auto r = qv::reid_tai_pair(t, c);
        if (as_json) {
            std::cout << "{\"type\": \"" << t.str() << "\", \"pair\": " << (r.ok ? "true" : "false") << ", \"sums\": [";
            for (std::size_t i = 0; i < r.sums.size(); ++i) std::cout << (i ? ", " : "") << "\"" << r.sums[i].get_str() << "\"";
            std::cout << "]}\n";
        } else {
            std::cout << "pair " << t.str() << " with c = (";
            for (std::size_t i = 0; i < c.size(); ++i) std::cout << (i ? "," : "") << c[i].get_str();
            std::cout << ")\n  i  sum\n";
            for (std::size_t i = 0; i < r.sums.size(); ++i) std::cout << "  " << i + 1 << "  " << r.sums[i].get_str() << "\n";
            std::cout << (r.ok ? "terminal pair" : "not terminal: " + r.reason) << "\n";
        }
        return 0;
    }
    auto r = qv::reid_tai(t);
    if (as_json) {
        std::cout << "{\"type\": \"" << t.str() << "\", \"verdict\": \"" << qv::to_string(r.verdict) << "\", \"sums\": [";
        for (std::size_t i = 0; i < r.sums.size(); ++i) std::cout << (i ? ", " : "") << r.sums[i];
        std::cout << "]}\n";
    } else {
        std::cout << t.str() << "\n  i  sum\n";
        for (std::size_t i = 0; i < r.sums.size(); ++i) std::cout << "  " << i + 1 << "  " << r.sums[i] << "\n";
        std::cout << qv::to_string(r.verdict) << "\n";
    }
    return 0;
}

int cmd_list(const std::string& dir) {
    auto files = scenario_files(dir);
    if (files.empty()) {
        std::cerr << "no scenarios in " << dir << "\n";
        return 2;
    }
    for (const auto& f : files) {
        auto s = qv::scenario_summary(f);
        std::cout << fs::path(f).filename().string() << "  " << s.id;
        if (!s.base.empty()) std::cout << "  (mutated twin of " << s.base << ")";
        else std::cout << "  " << s.title;
        std::cout << "\n";
    }
    return 0;
}

int cmd_explain(const std::string& target, const std::string& dir) {
    // Accepts "scenario/step-id" or a bare step id searched in every scenario.
    std::string scen, step = target;
    auto slash = target.find('/');
    if (slash != std::string::npos) {
        scen = target.substr(0, slash);
        step = target.substr(slash + 1);
    }
    bool found = false;
    for (const auto& f : scenario_files(dir)) {
        auto s = qv::scenario_summary(f);
        if (!scen.empty() && s.id != scen && fs::path(f).stem().string() != scen) continue;
        if (scen.empty() && !s.base.empty()) continue;
        if (auto text = qv::explain_step(f, step)) {
            std::cout << *text << "\n";
            found = true;
        }
    }
    if (!found) {
        std::cerr << "no step '" << target << "' in " << dir << "\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quotver: verify quotient singularity constructions from scenario files"};
    app.require_subcommand(1);
    std::string dir = default_scenario_dir();
    app.add_option("--scenarios", dir, "Directory searched by list and explain");

    auto* verify = app.add_subcommand("verify", "Run a scenario and report every step");
    std::string file, json_out, chart;
    int max_scan = 0;
    bool timing = false, quiet = false;
    verify->add_option("file", file, "Scenario JSON file")->required();
    verify->add_option("--json", json_out, "Write the JSON report to this file ('-' for stdout)");
    verify->add_option("--chart", chart, "Only run the steps attached to this chart");
    verify->add_option("--max-scan-degree", max_scan, "Largest k for the F_{p^k} completeness scan")->check(CLI::Range(1, 12));
    verify->add_flag("--timing", timing, "Include wall-clock seconds in the JSON report");
    verify->add_flag("-q,--quiet", quiet, "Suppress the text table");

    auto* rt = app.add_subcommand("reid-tai", "Reid-Tai classification of 1/r(b1,..,bn)");
    std::vector<long long> rt_args;
    std::vector<std::string> rt_c;
    bool rt_json = false;
    rt->add_option("r_and_weights", rt_args, "r followed by the weights")->required();
    rt->add_option("-c,--coefficients", rt_c, "Pair coefficients c_j (rationals such as -1 or 1/2)");
    rt->add_flag("--json", rt_json, "Machine-readable output");

    auto* list = app.add_subcommand("list", "List the shipped scenarios");
    auto* explain = app.add_subcommand("explain", "Describe a step: explain <scenario/step-id>");
    std::string step_id;
    explain->add_option("step", step_id, "Step id, optionally prefixed by the scenario id")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*verify) return cmd_verify(file, json_out, chart, max_scan, timing, quiet);
        if (*rt) return cmd_reid_tai(rt_args, rt_c, rt_json);
        if (*list) return cmd_list(dir);
        if (*explain) return cmd_explain(step_id, dir);
    } catch (const qv::ScenarioInputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
