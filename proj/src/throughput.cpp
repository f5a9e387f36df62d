#include "fogplace/throughput.hpp"

#include <cassert>
#include <string>

namespace fogplace {

namespace {

[[noreturn]] void infeasible(const Application& app, double slack) {
  throw InfeasibleDeadline("app " + std::to_string(app.id) + " cannot meet 1/F = " +
                           std::to_string(1.0 / app.output_rate) + " s (slack " +
                           std::to_string(slack) + " s)");
}

}  // namespace

ThroughputRequirement min_throughput_type1(const Application& app, double delay_home_cloud) {
  const double slack = deadline_slack(app, delay_home_cloud);
  if (slack <= kMinDeadlineSlack) infeasible(app, slack);
  return {ConfigType::Type1, 0.0, app.data_low / slack};
}

ThroughputRequirement min_throughput_type2(const Application& app, double delay_home_cloud) {
  const double slack = deadline_slack(app, delay_home_cloud);
  if (slack <= kMinDeadlineSlack) infeasible(app, slack);
  ThroughputRequirement req{ConfigType::Type2, app.data_high / slack, 0.0};
  // data_high >= data_low, so the high-throughput mode never asks for less
  // than Type 1 would on the same delays.
  assert(req.bh >= app.data_low / slack - kResidualTol);
  return req;
}

ThroughputRequirement min_throughput_type3(const Application& app, double delay_home_j,
                                           double delay_j_cloud) {
  const double slack = deadline_slack(app, delay_home_j + delay_j_cloud);
  if (slack <= kMinDeadlineSlack) infeasible(app, slack);
  return {ConfigType::Type3, 2.0 * app.data_high / slack, 2.0 * app.data_low / slack};
}

std::vector<RequirementEntry> all_requirements(const Application& app, const Topology& topology) {
  std::vector<RequirementEntry> entries;

  if (app.has_fixed_throughput()) {
    const double bh = *app.fixed_bh;
    const double bl = *app.fixed_bl;
    entries.push_back({ConfigType::Type1, app.home_region, true, {ConfigType::Type1, 0.0, bl}});
    entries.push_back({ConfigType::Type2, 0, true, {ConfigType::Type2, bh, 0.0}});
    for (int j : topology.neighbors(app.home_region)) {
      if (j == 0) continue;
      entries.push_back({ConfigType::Type3, j, true, {ConfigType::Type3, bh, bl}});
    }
    return entries;
  }

  const double d_home_cloud = topology.link_between(app.home_region, 0).delay();

  RequirementEntry t1{ConfigType::Type1, app.home_region, false, {}};
  if (deadline_slack(app, d_home_cloud) > kMinDeadlineSlack) {
    t1.feasible = true;
    t1.req = min_throughput_type1(app, d_home_cloud);
  }
  entries.push_back(t1);

  RequirementEntry t2{ConfigType::Type2, 0, false, {}};
  if (deadline_slack(app, d_home_cloud) > kMinDeadlineSlack) {
    t2.feasible = true;
    t2.req = min_throughput_type2(app, d_home_cloud);
  }
  entries.push_back(t2);

  for (int j : topology.neighbors(app.home_region)) {
    if (j == 0) continue;
    const double d_uj = topology.link_between(app.home_region, j).delay();
    const double d_j0 = topology.link_between(j, 0).delay();
    RequirementEntry t3{ConfigType::Type3, j, false, {}};
    if (deadline_slack(app, d_uj + d_j0) > kMinDeadlineSlack) {
      t3.feasible = true;
      t3.req = min_throughput_type3(app, d_uj, d_j0);
    }
    entries.push_back(t3);
  }
  return entries;
}

}  // namespace fogplace
