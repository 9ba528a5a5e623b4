#pragma once

#include "quotver/action.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qv {

// Named coordinate chart with its action, divisor table and the maps to and
// from the chart it was derived from.
struct Chart {
    std::string name;
    int stage = 0;
    Action action;
    // Divisor symbol -> defining function. Symbols missing here are absent.
    std::map<std::string, Frac> divisors;
    std::string parent;  // empty for a root chart
    std::string provenance;
    std::vector<Frac> parent_in_self;  // parent coordinates as functions here
    std::vector<Frac> self_in_parent;  // own coordinates as functions on the parent

    const RingPtr& ring() const { return action.ring(); }
};

Chart make_root_chart(const std::string& name, const Action& action, std::map<std::string, Frac> divisors = {});

// Pullback multiplicity of each parent divisor along a new exceptional divisor.
using PullbackTable = std::map<std::string, int>;

// Chart of the blow-up of `parent` along {v_c = 0 : c in center} in which
// v_kept stays a coordinate and every other center coordinate v_l is
// replaced by w_l = v_l / v_kept. Coordinates keep their positions;
// `names` lists all coordinate names of the new chart.
Chart blowup_chart(const Chart& parent, const std::vector<int>& center, int kept, const std::vector<std::string>& names,
                   const std::string& child_name, const std::string& exceptional, PullbackTable* pullbacks = nullptr);

// New chart with coordinates v' = v - point (same stage).
Chart shifted_chart(const Chart& parent, const std::vector<long long>& point, const std::vector<std::string>& names,
                    const std::string& child_name);

// General polynomial change of coordinates (same stage).
Chart changed_chart(const Chart& parent, const std::vector<std::string>& old_in_new,
                    const std::vector<std::string>& new_in_old, const std::vector<std::string>& names,
                    const std::string& child_name);

// Lookup for charts by name, used to walk provenance chains.
using ChartLookup = std::map<std::string, const Chart*>;

// Coordinates of chart `b` as functions on chart `a`, through their common
// ancestor.
std::vector<Frac> transition_map(const ChartLookup& charts, const Chart& a, const Chart& b);

struct TransitionResult {
    bool ok = false;
    std::string detail;
};
// The transition from a to b sends point pa to pb, and the divisors through
// pb are those through pa with matching defining functions up to units.
TransitionResult verify_transition(const ChartLookup& charts, const Chart& a, const std::vector<long long>& pa,
                                   const Chart& b, const std::vector<long long>& pb);

}  // namespace qv
