#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>

#include "fogplace/scenario.hpp"
#include "fogplace/serialize.hpp"

using namespace fogplace;

namespace {

ScenarioConfig base_config() {
  ScenarioConfig c;
  c.K = 10;
  c.U = 50;
  c.q = 0.4;
  c.alpha = 1.0;
  c.beta = 1.5;
  c.seed = 1234;
  return c;
}

int crosslink_count(const Topology& topo) {
  int n = 0;
  for (const Link& l : topo.links) {
    if (!l.is_cloud_link()) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("gen_topology: q=0 is a pure star, q=1 the complete fog graph") {
  ScenarioConfig c = base_config();
  {
    c.q = 0.0;
    Rng rng(c.seed);
    const Topology topo = gen_topology(c, rng);
    CHECK(topo.num_regions() == 10);
    CHECK(topo.links.size() == 9);
    CHECK(crosslink_count(topo) == 0);
  }
  {
    c.q = 1.0;
    Rng rng(c.seed);
    const Topology topo = gen_topology(c, rng);
    CHECK(topo.links.size() == 9 + 36);
    CHECK(crosslink_count(topo) == 36);
    for (const Link& l : topo.links) CHECK(l.capacity() == 15.0);
  }
}

TEST_CASE("gen_topology: crosslink count matches the edge-probability mean") {
  ScenarioConfig c = base_config();
  c.q = 0.4;
  double total = 0.0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    Rng rng(static_cast<std::uint64_t>(t));
    total += crosslink_count(gen_topology(c, rng));
  }
  CHECK(total / trials == doctest::Approx(0.4 * 36).epsilon(0.07));
}

TEST_CASE("home region pmf: alpha=1 over two fog regions is 2/3 vs 1/3") {
  ScenarioConfig c = base_config();
  c.K = 3;
  c.alpha = 1.0;
  CHECK(home_region_pmf(c, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(home_region_pmf(c, 2) == doctest::Approx(1.0 / 3.0));

  // Empirical frequencies agree.
  c.U = 4000;
  Rng rng(9);
  (void)gen_topology(c, rng);
  int first = 0;
  for (const Application& a : gen_apps(c, rng)) {
    if (a.home_region == 1) ++first;
  }
  CHECK(static_cast<double>(first) / c.U == doctest::Approx(2.0 / 3.0).epsilon(0.05));
}

TEST_CASE("gen_apps: collapsed ranges reproduce the nominal app exactly") {
  ScenarioConfig c = base_config();
  c.U = 5;
  c.demand_ranges.cpu = {1250.0, 1250.0};
  c.demand_ranges.memory = {1.2, 1.2};
  c.demand_ranges.storage = {3.5, 3.5};
  c.demand_ranges.bl = {1.5, 1.5};
  c.demand_ranges.bh = {4.25, 4.25};
  Rng rng(c.seed);
  (void)gen_topology(c, rng);
  for (const Application& a : gen_apps(c, rng)) {
    CHECK(a.demand == ResourceVector{1.2, 3.5, 1250.0});
    CHECK(*a.fixed_bl == 1.5);
    CHECK(*a.fixed_bh == 4.25);
    CHECK(a.reward_default == 1.0);
  }
}

TEST_CASE("gen_apps: a huge alpha pins every app to region 1") {
  ScenarioConfig c = base_config();
  c.alpha = 60.0;
  c.U = 200;
  Rng rng(3);
  (void)gen_topology(c, rng);
  for (const Application& a : gen_apps(c, rng)) CHECK(a.home_region == 1);
}

TEST_CASE("gen_apps: demand means land on the range means") {
  // Demands are uniform over the configured ranges, so the empirical means
  // sit at the range midpoints. Note the published memory/storage ranges are
  // not centered on the nominal app (1.25 vs 1.2 GB, 4.5 vs 3.5 GB): the
  // nominal vector only anchors budgets, never sampling.
  ScenarioConfig c = base_config();
  c.U = 10000;
  Rng rng(77);
  (void)gen_topology(c, rng);
  const auto apps = gen_apps(c, rng);
  double cpu = 0, mem = 0, stor = 0, bl = 0, bh = 0;
  for (const Application& a : apps) {
    cpu += a.demand.cpu;
    mem += a.demand.memory;
    stor += a.demand.storage;
    bl += *a.fixed_bl;
    bh += *a.fixed_bh;
  }
  const double n = static_cast<double>(apps.size());
  CHECK(cpu / n == doctest::Approx(c.demand_ranges.cpu.mean()).epsilon(0.02));
  CHECK(mem / n == doctest::Approx(c.demand_ranges.memory.mean()).epsilon(0.02));
  CHECK(stor / n == doctest::Approx(c.demand_ranges.storage.mean()).epsilon(0.02));
  CHECK(bl / n == doctest::Approx(c.demand_ranges.bl.mean()).epsilon(0.02));
  CHECK(bh / n == doctest::Approx(c.demand_ranges.bh.mean()).epsilon(0.02));
}

TEST_CASE("gen_apps: home frequencies pass a chi-square test against the pmf") {
  ScenarioConfig c = base_config();
  c.U = 10000;
  c.alpha = 1.0;
  Rng rng(101);
  (void)gen_topology(c, rng);
  std::map<int, int> counts;
  for (const Application& a : gen_apps(c, rng)) ++counts[a.home_region];
  double chi2 = 0.0;
  for (int k = 1; k <= 9; ++k) {
    const double expected = c.U * home_region_pmf(c, k);
    const double diff = counts[k] - expected;
    chi2 += diff * diff / expected;
  }
  // 8 degrees of freedom, critical value 20.09 at significance 0.01.
  CHECK(chi2 < 20.09);
}

TEST_CASE("gen_apps: cpu-weighted mode pins half the batch at max cpu") {
  ScenarioConfig c = base_config();
  c.U = 100;
  c.reward_mode = RewardMode::CpuWeighted;
  Rng rng(5);
  (void)gen_topology(c, rng);
  const auto apps = gen_apps(c, rng);
  int at_max = 0;
  for (const Application& a : apps) {
    if (a.demand.cpu == 2000.0) ++at_max;
    CHECK(a.reward_default == doctest::Approx(a.demand.cpu / 2000.0));
  }
  CHECK(at_max >= 50);  // the 50 pinned apps plus any lucky uniform draws
  int pinned = 0;
  for (std::size_t i = 1; i < apps.size(); i += 2) {
    if (apps[i].demand.cpu == 2000.0) ++pinned;
  }
  CHECK(pinned == 50);
}

TEST_CASE("provision_servers: budget arithmetic and the floor rule") {
  ScenarioConfig c = base_config();  // beta=1.5, U=50, K=10
  // Budget (1+1.5)*(50/10)*u0 = (15, 43.75, 15625): any class's storage
  // (>= 60) exhausts it, so every region gets exactly one server.
  const Instance instance = gen_instance(c);
  for (const Region& r : instance.topology.regions) {
    if (r.id == 0) continue;
    CHECK(r.servers.size() == 1);
  }

  // beta = -1: zero budget still yields one server per region.
  ScenarioConfig floor_cfg = base_config();
  floor_cfg.beta = -1.0;
  Rng rng(floor_cfg.seed);
  Topology topo = gen_topology(floor_cfg, rng);
  (void)gen_apps(floor_cfg, rng);
  provision_servers(floor_cfg, topo, rng);
  for (const Region& r : topo.regions) {
    if (r.id == 0) continue;
    CHECK(r.servers.size() == 1);
  }
}

TEST_CASE("provision_servers: removing the last server re-opens the budget") {
  ScenarioConfig c = base_config();
  c.U = 250;  // budget (75, 218.75, 78125): several servers per region
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    c.seed = seed;
    const Instance instance = gen_instance(c);
    for (const Region& r : instance.topology.regions) {
      if (r.id == 0) continue;
      CHECK(r.servers.size() >= 2);
      ResourceVector spent;
      for (std::size_t i = 0; i + 1 < r.servers.size(); ++i) {
        spent += r.servers[i].capacity();
      }
      const ResourceVector budget = (1.0 + c.beta) * ((250.0 / c.K) * c.nominal_app);
      const ResourceVector remaining = budget - spent;
      CHECK(remaining.memory > 0);
      CHECK(remaining.storage > 0);
      CHECK(remaining.cpu > 0);
    }
  }
}

TEST_CASE("provision_servers: class draws are uniform") {
  ScenarioConfig c = base_config();
  c.U = 250;
  std::map<double, int> by_memory;  // class keyed by its memory size
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    c.seed = seed;
    const Instance instance = gen_instance(c);
    for (const Region& r : instance.topology.regions) {
      if (r.id == 0) continue;
      for (const ServerUnit& s : r.servers) ++by_memory[s.capacity().memory];
    }
  }
  int total = 0;
  for (const auto& [mem, n] : by_memory) total += n;
  REQUIRE(by_memory.size() == 3);
  for (const auto& [mem, n] : by_memory) {
    CHECK(static_cast<double>(n) / total == doctest::Approx(1.0 / 3.0).epsilon(0.12));
  }
}

TEST_CASE("gen_instance: home_apps indexes every app under its region") {
  const Instance instance = gen_instance(base_config());
  std::size_t indexed = 0;
  for (const Region& r : instance.topology.regions) {
    for (int id : r.home_apps) {
      CHECK(instance.apps.at(static_cast<std::size_t>(id)).home_region == r.id);
      ++indexed;
    }
  }
  CHECK(indexed == instance.apps.size());
  CHECK(instance.topology.regions[0].home_apps.empty());
}

TEST_CASE("gen_instance: same seed, same bytes; different seed, different draw") {
  ScenarioConfig c = base_config();
  const std::string a = instance_to_json(gen_instance(c), &c);
  const std::string b = instance_to_json(gen_instance(c), &c);
  CHECK(a == b);
  ScenarioConfig other = c;
  other.seed = c.seed + 1;
  CHECK(instance_to_json(gen_instance(other), &other) != a);
}

TEST_CASE("gen_instance: the stream is aligned across q (paired topologies)") {
  ScenarioConfig sparse = base_config();
  sparse.q = 0.3;
  ScenarioConfig dense = base_config();
  dense.q = 0.5;
  const Instance a = gen_instance(sparse);
  const Instance b = gen_instance(dense);
  REQUIRE(a.apps.size() == b.apps.size());
  for (std::size_t i = 0; i < a.apps.size(); ++i) {
    CHECK(a.apps[i].home_region == b.apps[i].home_region);
    CHECK(a.apps[i].demand == b.apps[i].demand);
    CHECK(*a.apps[i].fixed_bh == *b.apps[i].fixed_bh);
  }
  // Every link of the sparser graph appears in the denser one's candidate
  // set; the number of fog regions and cloud links is identical.
  CHECK(a.topology.num_regions() == b.topology.num_regions());
}

TEST_CASE("gen_instance: fog_region_count override and experiment-mode fields") {
  ScenarioConfig c = base_config();
  c.fog_region_count = 12;
  const Instance instance = gen_instance(c);
  CHECK(instance.topology.num_regions() == 13);
  for (const Application& a : instance.apps) {
    CHECK(a.home_region >= 1);
    CHECK(a.home_region <= 12);
    CHECK(a.has_fixed_throughput());
    CHECK(a.proc_delay == 0.0);
    CHECK(a.output_rate == 1.0);
  }
  for (const Link& l : instance.topology.links) CHECK(l.delay() == 0.0);
}

TEST_CASE("gen_instance: delay mode samples the delay-driven pipeline") {
  ScenarioConfig c = base_config();
  c.delay_mode = true;
  c.U = 20;
  const Instance instance = gen_instance(c);
  for (const Application& a : instance.apps) {
    CHECK(!a.has_fixed_throughput());
    CHECK(a.data_high >= a.data_low);
    CHECK(a.proc_delay >= c.delay_params.proc_delay.lo);
  }
  bool some_delay = false;
  for (const Link& l : instance.topology.links) some_delay |= l.delay() > 0;
  CHECK(some_delay);
}

TEST_CASE("config validation rejects out-of-range parameters") {
  ScenarioConfig c = base_config();
  c.q = 1.5;
  CHECK_THROWS(c.validate());
  c = base_config();
  c.beta = -1.0;
  CHECK_THROWS(c.validate());
  c = base_config();
  c.K = 1;
  CHECK_THROWS(c.validate());
}

TEST_CASE("config JSON round-trip") {
  ScenarioConfig c = base_config();
  c.reward_mode = RewardMode::CpuWeighted;
  c.fog_region_count = 9;
  c.delay_mode = true;
  const std::string text = config_to_json(c);
  const ScenarioConfig back = config_from_json(text);
  CHECK(config_to_json(back) == text);
  CHECK(back.K == c.K);
  CHECK(back.seed == c.seed);
  CHECK(back.reward_mode == RewardMode::CpuWeighted);
  CHECK(*back.fog_region_count == 9);
  CHECK(back.delay_mode);
}
