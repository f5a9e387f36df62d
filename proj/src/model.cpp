#include "fogplace/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fogplace {

namespace {

std::string server_entity(int region, int server, Resource r) {
  std::ostringstream os;
  os << "region " << region << " server " << server << " " << resource_name(r);
  return os.str();
}

std::string link_entity(int a, int b) {
  std::ostringstream os;
  os << "link {" << a << "," << b << "}";
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Topology
// ---------------------------------------------------------------------------

void Topology::rebuild_index() {
  link_index_.clear();
  adjacency_.assign(regions.size(), {});
  for (std::size_t i = 0; i < links.size(); ++i) {
    const Link& l = links[i];
    link_index_[{l.a(), l.b()}] = static_cast<int>(i);
    adjacency_[l.a()].insert(l.b());
    adjacency_[l.b()].insert(l.a());
  }
}

void Topology::validate() const {
  for (std::size_t k = 0; k < regions.size(); ++k) {
    if (regions[k].id != static_cast<int>(k)) {
      throw StructuralError("region ids must be contiguous from 0");
    }
    std::set<int> seen;
    for (std::size_t i = 0; i < regions[k].servers.size(); ++i) {
      const ServerUnit& s = regions[k].servers[i];
      if (s.id() != static_cast<int>(i) || s.region_id() != static_cast<int>(k)) {
        throw StructuralError("server ids must be contiguous within their region");
      }
      if (!s.capacity().non_negative()) throw StructuralError("negative server capacity");
      if (!seen.insert(s.id()).second) throw StructuralError("duplicate server id");
    }
  }
  std::set<std::pair<int, int>> pairs;
  for (const Link& l : links) {
    if (l.a() == l.b()) throw StructuralError("self-loop link");
    if (l.a() < 0 || l.b() >= num_regions()) throw StructuralError("link endpoint out of range");
    if (!pairs.insert({l.a(), l.b()}).second) throw StructuralError("duplicate link");
    if (l.capacity() < 0 || l.delay() < 0) throw StructuralError("negative link weight");
  }
  for (int k = 1; k < num_regions(); ++k) {
    if (!pairs.count({0, k})) {
      throw StructuralError("fog region " + std::to_string(k) + " lacks a cloud-link");
    }
  }
}

Link* Topology::find_link(int x, int y) {
  auto it = link_index_.find({std::min(x, y), std::max(x, y)});
  return it == link_index_.end() ? nullptr : &links[it->second];
}

const Link* Topology::find_link(int x, int y) const {
  auto it = link_index_.find({std::min(x, y), std::max(x, y)});
  return it == link_index_.end() ? nullptr : &links[it->second];
}

Link& Topology::link_between(int x, int y) {
  Link* l = find_link(x, y);
  if (!l) throw StructuralError("no link between " + std::to_string(x) + " and " + std::to_string(y));
  return *l;
}

const Link& Topology::link_between(int x, int y) const {
  const Link* l = find_link(x, y);
  if (!l) throw StructuralError("no link between " + std::to_string(x) + " and " + std::to_string(y));
  return *l;
}

Region make_cloud_region(const ResourceVector& nominal_app) {
  Region cloud;
  cloud.id = 0;
  cloud.servers.emplace_back(0, 0, 1e6 * nominal_app);
  return cloud;
}

const char* config_name(ConfigType c) {
  switch (c) {
    case ConfigType::Type1: return "type1";
    case ConfigType::Type2: return "type2";
    case ConfigType::Type3: return "type3";
  }
  return "?";
}

ConfigType config_from_name(const std::string& s) {
  if (s == "type1") return ConfigType::Type1;
  if (s == "type2") return ConfigType::Type2;
  if (s == "type3") return ConfigType::Type3;
  throw StructuralError("unknown configuration type: " + s);
}

void Application::validate() const {
  if (home_region < 1) throw StructuralError("app home region must be a fog region");
  if (!demand.non_negative()) throw StructuralError("negative app demand");
  if (!(data_high >= data_low) || !(data_low > 0)) {
    throw StructuralError("need data_high >= data_low > 0");
  }
  if (!(output_rate > 0)) throw StructuralError("output_rate must be positive");
  if (!(source_rate > 0)) throw StructuralError("source_rate must be positive");
  if (fixed_bh.has_value() != fixed_bl.has_value()) {
    throw StructuralError("fixed throughputs must be set as a pair");
  }
  if (fixed_bh && (*fixed_bh < 0 || *fixed_bl < 0)) {
    throw StructuralError("negative fixed throughput");
  }
}

void Instance::rebuild_home_apps() {
  for (Region& r : topology.regions) r.home_apps.clear();
  for (const Application& a : apps) {
    if (a.home_region < 0 || a.home_region >= topology.num_regions()) {
      throw StructuralError("app " + std::to_string(a.id) + " home region out of range");
    }
    topology.regions[a.home_region].home_apps.insert(a.id);
  }
}

void Instance::validate() const {
  topology.validate();
  std::set<int> ids;
  for (const Application& a : apps) {
    a.validate();
    if (a.home_region >= topology.num_regions()) throw StructuralError("home region out of range");
    if (!ids.insert(a.id).second) throw StructuralError("duplicate app id");
  }
}

const char* family_name(ConstraintFamily f) {
  switch (f) {
    case ConstraintFamily::Capacity: return "capacity";
    case ConstraintFamily::CloudLinkBandwidth: return "cloud-link bandwidth";
    case ConstraintFamily::CrosslinkBandwidth: return "crosslink bandwidth";
    case ConstraintFamily::Delay: return "delay";
    case ConstraintFamily::Uniqueness: return "uniqueness";
    case ConstraintFamily::Locality: return "locality";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Audit
// ---------------------------------------------------------------------------

namespace {

struct AppIndex {
  std::map<int, const Application*> by_id;

  explicit AppIndex(const std::vector<Application>& apps) {
    for (const Application& a : apps) by_id[a.id] = &a;
  }

  const Application& at(int id) const {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw StructuralError("solution references unknown app " + std::to_string(id));
    }
    return *it->second;
  }
};

void check_assignment_refs(const Topology& topo, const Application& app, const Assignment& asg) {
  if (asg.region < 0 || asg.region >= topo.num_regions()) {
    throw StructuralError("assignment of app " + std::to_string(app.id) + " references region " +
                          std::to_string(asg.region));
  }
  const Region& r = topo.regions[asg.region];
  if (asg.server < 0 || asg.server >= static_cast<int>(r.servers.size())) {
    throw StructuralError("assignment of app " + std::to_string(app.id) + " references server " +
                          std::to_string(asg.server) + " of region " + std::to_string(asg.region));
  }
  if (asg.bh < 0 || asg.bl < 0) {
    throw StructuralError("negative allocated throughput for app " + std::to_string(app.id));
  }
}

}  // namespace

AuditReport audit_solution(const Topology& topology, const std::vector<Application>& apps,
                           const PlacementSolution& solution, const AuditOptions& options) {
  AuditReport report;
  AppIndex index(apps);

  for (int u : solution.undeployable) {
    index.at(u);
    if (solution.assignments.count(u)) {
      throw StructuralError("app " + std::to_string(u) + " is both deployed and undeployable");
    }
  }
  for (const auto& [u, asg] : solution.assignments) {
    check_assignment_refs(topology, index.at(u), asg);
  }

  // Locality and configuration consistency.
  for (const auto& [u, asg] : solution.assignments) {
    const Application& app = index.at(u);
    const auto& nbrs = topology.neighbors(app.home_region);
    bool ok = false;
    std::string why;
    switch (asg.config) {
      case ConfigType::Type1:
        ok = asg.region == app.home_region;
        why = "type1 must be placed on the home region";
        break;
      case ConfigType::Type2:
        ok = asg.region == 0;
        why = "type2 must be placed on the cloud";
        break;
      case ConfigType::Type3:
        ok = asg.region != 0 && asg.region != app.home_region && nbrs.count(asg.region) > 0;
        why = "type3 must be placed on a fog neighbor of the home region";
        break;
    }
    if (!ok) {
      report.violations.push_back({ConstraintFamily::Locality, "app " + std::to_string(u),
                                   -1.0, why});
    }
  }

  // Per-server capacity, component-wise.
  {
    std::map<std::pair<int, int>, ResourceVector> load;
    for (const auto& [u, asg] : solution.assignments) {
      load[{asg.region, asg.server}] += index.at(u).demand;
    }
    for (const auto& [key, used] : load) {
      const ResourceVector cap = topology.regions[key.first].servers[key.second].capacity();
      for (Resource r : kAllResources) {
        const double slack = cap[r] - used[r];
        if (slack < -kResidualTol) {
          report.violations.push_back({ConstraintFamily::Capacity,
                                       server_entity(key.first, key.second, r), slack,
                                       "aggregate demand exceeds capacity"});
        }
      }
    }
  }

  // Cloud-link bandwidth, per fog region k: its own apps placed at home use
  // bl, placed on the cloud use bh; plus the bl of neighbor-homed apps. The
  // default charges neighbor apps hosted *in k* (Type-3 geometry); the
  // literal mode charges neighbor apps placed in their own home region.
  for (int k = 1; k < topology.num_regions(); ++k) {
    const Link& cl = topology.link_between(k, 0);
    double load = 0.0;
    for (const auto& [u, asg] : solution.assignments) {
      const Application& app = index.at(u);
      if (app.home_region == k) {
        if (asg.region == k) load += asg.bl;        // Type 1
        else if (asg.region == 0) load += asg.bh;   // Type 2
      } else if (topology.neighbors(k).count(app.home_region) && app.home_region != 0) {
        if (!options.literal_neighbor_index) {
          if (asg.region == k && asg.config == ConfigType::Type3) load += asg.bl;
        } else {
          if (asg.region == app.home_region) load += asg.bl;
        }
      }
    }
    const double slack = cl.capacity() - load;
    if (slack < -kResidualTol) {
      report.violations.push_back({ConstraintFamily::CloudLinkBandwidth, link_entity(k, 0), slack,
                                   "cloud-link overload"});
    }
  }

  // Crosslink bandwidth: high-throughput flows of apps offloaded across it.
  for (const Link& l : topology.links) {
    if (l.is_cloud_link()) continue;
    double load = 0.0;
    for (const auto& [u, asg] : solution.assignments) {
      const Application& app = index.at(u);
      const bool a_to_b = app.home_region == l.a() && asg.region == l.b();
      const bool b_to_a = app.home_region == l.b() && asg.region == l.a();
      if ((a_to_b || b_to_a) && asg.config == ConfigType::Type3) load += asg.bh;
    }
    const double slack = l.capacity() - load;
    if (slack < -kResidualTol) {
      report.violations.push_back({ConstraintFamily::CrosslinkBandwidth,
                                   link_entity(l.a(), l.b()), slack, "crosslink overload"});
    }
  }

  // Per-app deadline with the allocated throughputs. For apps with fixed
  // throughput requirements the deadline reduces to allocated >= required.
  for (const auto& [u, asg] : solution.assignments) {
    const Application& app = index.at(u);
    if (app.has_fixed_throughput()) {
      const bool needs_bh = asg.config != ConfigType::Type1;
      const bool needs_bl = asg.config != ConfigType::Type2;
      if (needs_bh) {
        const double slack = asg.bh - *app.fixed_bh;
        if (slack < -kResidualTol) {
          report.violations.push_back({ConstraintFamily::Delay, "app " + std::to_string(u), slack,
                                       "allocated high throughput below requirement"});
        }
      }
      if (needs_bl) {
        const double slack = asg.bl - *app.fixed_bl;
        if (slack < -kResidualTol) {
          report.violations.push_back({ConstraintFamily::Delay, "app " + std::to_string(u), slack,
                                       "allocated low throughput below requirement"});
        }
      }
      continue;
    }
    double lhs = app.proc_delay + app.data_high / app.source_rate;
    switch (asg.config) {
      case ConfigType::Type1:
        lhs += topology.link_between(app.home_region, 0).delay();
        lhs += asg.bl > 0 ? app.data_low / asg.bl : std::numeric_limits<double>::infinity();
        break;
      case ConfigType::Type2:
        lhs += topology.link_between(app.home_region, 0).delay();
        lhs += asg.bh > 0 ? app.data_high / asg.bh : std::numeric_limits<double>::infinity();
        break;
      case ConfigType::Type3: {
        const Link* cross = topology.find_link(app.home_region, asg.region);
        const Link* up = topology.find_link(asg.region, 0);
        if (!cross || !up) break;  // already reported as a locality violation
        lhs += cross->delay() + up->delay();
        lhs += asg.bh > 0 ? app.data_high / asg.bh : std::numeric_limits<double>::infinity();
        lhs += asg.bl > 0 ? app.data_low / asg.bl : std::numeric_limits<double>::infinity();
        break;
      }
    }
    const double slack = 1.0 / app.output_rate - lhs;
    if (slack < -kResidualTol) {
      report.violations.push_back({ConstraintFamily::Delay, "app " + std::to_string(u), slack,
                                   "deadline missed with the allocated throughputs"});
    }
  }

  return report;
}

// ---------------------------------------------------------------------------
// Mutation
// ---------------------------------------------------------------------------

namespace {

// The (link, amount) pairs a configuration loads; zero flows are dropped.
std::vector<std::pair<std::pair<int, int>, double>> flow_plan(const Application& app, int region,
                                                              ConfigType config, double bh,
                                                              double bl) {
  std::vector<std::pair<std::pair<int, int>, double>> plan;
  switch (config) {
    case ConfigType::Type1:
      if (bl > 0) plan.push_back({{app.home_region, 0}, bl});
      break;
    case ConfigType::Type2:
      if (bh > 0) plan.push_back({{app.home_region, 0}, bh});
      break;
    case ConfigType::Type3:
      if (bh > 0) plan.push_back({{app.home_region, region}, bh});
      if (bl > 0) plan.push_back({{region, 0}, bl});
      break;
  }
  return plan;
}

}  // namespace

bool apply_placement(Topology& topology, const Application& app, int region, int server,
                     ConfigType config, double bh, double bl) {
  if (region < 0 || region >= topology.num_regions()) return false;
  Region& reg = topology.regions[region];
  if (server < 0 || server >= static_cast<int>(reg.servers.size())) return false;
  ServerUnit& srv = reg.servers[server];
  if (!srv.can_host(app.demand)) return false;

  const auto plan = flow_plan(app, region, config, bh, bl);
  for (const auto& [ends, amount] : plan) {
    const Link* l = topology.find_link(ends.first, ends.second);
    if (!l || l->residual() + kResidualTol < amount) return false;
  }

  srv.place(app.id, app.demand);
  for (const auto& [ends, amount] : plan) {
    topology.link_between(ends.first, ends.second).add_flow(app.id, amount);
  }
  return true;
}

void release_placement(Topology& topology, const Application& app, int region, int server,
                       ConfigType config, double bh, double bl) {
  topology.regions.at(region).servers.at(server).unplace(app.id);
  for (const auto& [ends, amount] : flow_plan(app, region, config, bh, bl)) {
    topology.link_between(ends.first, ends.second).remove_flow(app.id);
  }
}

std::vector<double> link_loads(const Topology& topology, const std::vector<Application>& apps,
                               const PlacementSolution& solution) {
  AppIndex index(apps);
  std::vector<double> loads(topology.links.size(), 0.0);
  auto add = [&](int x, int y, double amount) {
    const Link* l = topology.find_link(x, y);
    if (!l) throw StructuralError("solution uses a missing link");
    loads[static_cast<std::size_t>(l - topology.links.data())] += amount;
  };
  for (const auto& [u, asg] : solution.assignments) {
    for (const auto& [ends, amount] : flow_plan(index.at(u), asg.region, asg.config, asg.bh, asg.bl)) {
      add(ends.first, ends.second, amount);
    }
  }
  return loads;
}

}  // namespace fogplace
