#pragma once

#include "quotver/blowup.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qv {

// Malformed scenario: unreadable file, bad JSON, schema violation, unknown
// names or unparsable expressions. Maps to exit code 2.
struct ScenarioInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class StepStatus { Pass, Fail, Heuristic, Cited, Skipped };
std::string to_string(StepStatus s);

struct StepResult {
    std::string id;
    std::string kind;
    StepStatus status = StepStatus::Skipped;
    std::string citation;
    std::string detail;
};

struct Report {
    std::string scenario;
    std::string title;
    std::vector<StepResult> steps;
    std::string verdict;
    std::string expected_verdict;
    double limit_seconds = 0;
    double seconds = 0;  // wall clock, kept out of the default JSON rendering
    bool filtered = false;

    bool failed() const;
    // No failing step, and the verdict matches unless steps were filtered out.
    bool passed() const;
    int exit_code() const { return passed() ? 0 : 1; }
    // Deterministic JSON document; `with_timing` adds the measured seconds.
    std::string json(bool with_timing = false) const;
    std::string table() const;
};

struct RunOptions {
    std::optional<int> max_scan_degree;  // else QUOTVER_MAX_SCAN_DEGREE, else 4
    std::string chart;                   // only run steps attached to this chart
    int order_samples = 200;
};

Report run_scenario_file(const std::string& path, const RunOptions& opts = {});
// `base_dir` resolves a twin's "base" file.
Report run_scenario_text(const std::string& text, const std::string& base_dir, const RunOptions& opts = {});

// Chart tree of a scenario (twins resolved), in declaration order, without
// running any checks.
std::vector<Chart> scenario_charts(const std::string& path);

struct ScenarioSummary {
    std::string id;
    std::string title;
    std::string path;
    std::string base;  // non-empty for a mutated twin
};
ScenarioSummary scenario_summary(const std::string& path);

// Human-readable account of a step id declared in the scenario file, or
// nullopt when the file declares no such step.
std::optional<std::string> explain_step(const std::string& path, const std::string& step_id);
// One-paragraph description of a step kind.
std::string describe_kind(const std::string& kind);

}  // namespace qv
