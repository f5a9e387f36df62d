#pragma once

#include <stdexcept>
#include <vector>

#include "fogplace/model.hpp"

namespace fogplace {

// The app cannot meet its output deadline even with unbounded bandwidth:
// the fixed delay terms alone exceed 1/F.
struct InfeasibleDeadline : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deadline slack at or below this is treated as infeasible rather than
// producing an astronomically large throughput request.
inline constexpr double kMinDeadlineSlack = 1e-12;

// Minimum throughputs that let a configuration meet the deadline exactly.
struct ThroughputRequirement {
  ConfigType config = ConfigType::Type1;
  double bh = 0.0;  // 0 for Type1
  double bl = 0.0;  // 0 for Type2
};

// Time left for module-to-module transfers once the processing delay, the
// network delay along the configuration's path and the IoT serving time are
// paid. `path_delay` is d_{u0} for Types 1/2 and d_{uj}+d_{j0} for Type 3.
inline double deadline_slack(const Application& app, double path_delay) {
  return 1.0 / app.output_rate - app.proc_delay - path_delay - app.data_high / app.source_rate;
}

// Type 1 (module B at home): bl = data_low / slack, no high-throughput flow
// on the region graph.
ThroughputRequirement min_throughput_type1(const Application& app, double delay_home_cloud);

// Type 2 (module B on the cloud): bh = data_high / slack.
ThroughputRequirement min_throughput_type2(const Application& app, double delay_home_cloud);

// Type 3 (module B on a neighbor): the proportionality bh/bl =
// data_high/data_low makes the minimum unique; bh = 2*data_high/slack and
// bl = 2*data_low/slack.
ThroughputRequirement min_throughput_type3(const Application& app, double delay_home_j,
                                           double delay_j_cloud);

// One precomputed requirement per candidate placement of an app: its home
// region (Type1), the cloud (Type2) and each fog neighbor (Type3). Entries
// whose deadline slack is non-positive are kept but marked infeasible. Apps
// carrying fixed throughputs skip the closed forms and use them verbatim.
struct RequirementEntry {
  ConfigType config = ConfigType::Type1;
  int region = -1;
  bool feasible = false;
  ThroughputRequirement req;
};

std::vector<RequirementEntry> all_requirements(const Application& app, const Topology& topology);

}  // namespace fogplace
