#include "fogplace/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace fogplace {

std::vector<ServerClass> default_server_classes() {
  return {
      {"low", {2.0, 60.0, 5000.0}},
      {"medium", {8.0, 80.0, 15000.0}},
      {"high", {16.0, 120.0, 44000.0}},
  };
}

const char* reward_mode_name(RewardMode m) {
  return m == RewardMode::Unit ? "unit" : "cpu_weighted";
}

RewardMode reward_mode_from_name(const std::string& s) {
  if (s == "unit") return RewardMode::Unit;
  if (s == "cpu_weighted") return RewardMode::CpuWeighted;
  throw std::invalid_argument("unknown reward mode: " + s);
}

void ScenarioConfig::validate() const {
  if (K < 2) throw std::invalid_argument("K must be at least 2");
  if (U < 0) throw std::invalid_argument("U must be non-negative");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("q must be in [0,1]");
  if (alpha <= 0.0) throw std::invalid_argument("alpha must be positive");
  if (beta <= -1.0) throw std::invalid_argument("beta must exceed -1");
  if (link_bandwidth < 0.0) throw std::invalid_argument("negative link bandwidth");
  if (server_classes.empty()) throw std::invalid_argument("no server classes");
  if (fog_regions() < 1) throw std::invalid_argument("need at least one fog region");
}

double home_region_pmf(const ScenarioConfig& config, int region) {
  const int fog = config.fog_regions();
  double gamma = 0.0;
  for (int h = 1; h <= fog; ++h) gamma += std::pow(h, -config.alpha);
  return std::pow(region, -config.alpha) / gamma;
}

Topology gen_topology(const ScenarioConfig& config, Rng& rng) {
  const int fog = config.fog_regions();
  Topology topo;
  topo.regions.push_back(make_cloud_region(config.nominal_app));
  for (int k = 1; k <= fog; ++k) {
    Region r;
    r.id = k;
    topo.regions.push_back(r);
  }
  for (int k = 1; k <= fog; ++k) {
    topo.links.emplace_back(0, k, config.link_bandwidth, 0.0);
  }
  // One draw per pair, accepted or not, keeps the stream aligned across q.
  for (int i = 1; i <= fog; ++i) {
    for (int j = i + 1; j <= fog; ++j) {
      const bool present = rng.uniform(0.0, 1.0) < config.q;
      if (present) topo.links.emplace_back(i, j, config.link_bandwidth, 0.0);
    }
  }
  if (config.delay_mode) {
    for (Link& l : topo.links) {
      l = Link(l.a(), l.b(), l.capacity(), config.delay_params.link_delay.sample(rng));
    }
  }
  topo.rebuild_index();
  topo.validate();
  return topo;
}

std::vector<Application> gen_apps(const ScenarioConfig& config, Rng& rng) {
  const int fog = config.fog_regions();
  std::vector<double> cumulative(fog + 1, 0.0);
  for (int k = 1; k <= fog; ++k) cumulative[k] = cumulative[k - 1] + home_region_pmf(config, k);

  std::vector<Application> apps;
  apps.reserve(config.U);
  for (int u = 0; u < config.U; ++u) {
    Application app;
    app.id = u;

    const double x = rng.uniform(0.0, 1.0) * cumulative[fog];
    int home = fog;
    for (int k = 1; k <= fog; ++k) {
      if (x < cumulative[k]) {
        home = k;
        break;
      }
    }
    app.home_region = home;

    app.demand.cpu = config.demand_ranges.cpu.sample(rng);
    app.demand.memory = config.demand_ranges.memory.sample(rng);
    app.demand.storage = config.demand_ranges.storage.sample(rng);

    if (config.delay_mode) {
      app.data_low = config.delay_params.data_low.sample(rng);
      app.data_high = std::max(config.delay_params.data_high.sample(rng), app.data_low);
      app.output_rate = config.delay_params.output_rate.sample(rng);
      app.proc_delay = config.delay_params.proc_delay.sample(rng);
      app.source_rate = config.delay_params.source_rate.sample(rng);
    } else {
      const double bl = config.demand_ranges.bl.sample(rng);
      const double bh = config.demand_ranges.bh.sample(rng);
      app.fixed_bl = bl;
      app.fixed_bh = bh;
      // The throughput rows double as the data unit sizes; with zero delays
      // and a fast source the deadline is met by construction.
      app.data_low = bl;
      app.data_high = std::max(bh, bl);
      app.output_rate = 1.0;
      app.proc_delay = 0.0;
      app.source_rate = 1e9;
    }

    if (config.reward_mode == RewardMode::CpuWeighted) {
      if (u % 2 == 1) app.demand.cpu = config.demand_ranges.cpu.hi;
      app.reward_default = app.demand.cpu / config.demand_ranges.cpu.hi;
    } else {
      app.reward_default = 1.0;
    }

    app.validate();
    apps.push_back(std::move(app));
  }
  return apps;
}

void provision_servers(const ScenarioConfig& config, Topology& topology, Rng& rng) {
  const int classes = static_cast<int>(config.server_classes.size());
  for (Region& region : topology.regions) {
    if (region.id == 0) continue;
    if (!region.servers.empty()) throw StructuralError("region already provisioned");
    ResourceVector budget =
        (1.0 + config.beta) * ((static_cast<double>(config.U) / config.K) * config.nominal_app);
    // At least one server per region; the final server may overshoot.
    do {
      const ServerClass& cls =
          config.server_classes[rng.uniform_index(static_cast<std::uint64_t>(classes))];
      region.servers.emplace_back(static_cast<int>(region.servers.size()), region.id,
                                  cls.capacity);
      budget -= cls.capacity;
    } while (budget.memory > 0 && budget.storage > 0 && budget.cpu > 0);
  }
}

Instance gen_instance(const ScenarioConfig& config) {
  config.validate();
  Rng rng(config.seed);
  Instance instance;
  instance.topology = gen_topology(config, rng);
  instance.apps = gen_apps(config, rng);
  provision_servers(config, instance.topology, rng);
  instance.rebuild_home_apps();
  instance.validate();
  return instance;
}

}  // namespace fogplace
