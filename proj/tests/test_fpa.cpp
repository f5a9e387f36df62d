#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fogplace/exact.hpp"
#include "fogplace/fpa.hpp"
#include "test_support.hpp"

using namespace fogplace;
using namespace fogtest;

TEST_CASE("verify returns the first fitting server when links admit the flows") {
  // Medium server, 15 Mbit/s free cloud-link, mean app placed on the cloud.
  const Topology topo = make_topology({{{8.0, 80.0, 15000.0}}}, 15.0);
  const Application app = make_fixed_app(0, 1, {1.2, 3.5, 1250.0}, 4.25, 1.5);
  const ThroughputRequirement req{ConfigType::Type2, 4.25, 0.0};
  const auto server = verify(0, app, topo, req);
  REQUIRE(server.has_value());
  CHECK(*server == 0);
}

TEST_CASE("verify rejects a region with no fitting server") {
  Topology topo = make_topology({{{2.0, 60.0, 5000.0}}}, 15.0);
  const Application filler = make_fixed_app(9, 1, {2.0, 1.0, 100.0}, 0.2, 0.1);
  REQUIRE(apply_placement(topo, filler, 1, 0, ConfigType::Type1, 0.0, 0.1));
  const Application app = make_fixed_app(0, 1, {0.5, 1.0, 100.0}, 4.25, 1.5);
  CHECK(!verify(1, app, topo, {ConfigType::Type1, 0.0, 1.5}).has_value());
}

TEST_CASE("verify checks both links of a type-3 placement") {
  // Crosslink {1,2} has room for bh but cloud-link {2,0} lacks bl.
  Topology topo = make_topology({{{8.0, 80.0, 15000.0}}, {{8.0, 80.0, 15000.0}}}, 15.0,
                                {{1, 2, 15.0, 0.0}});
  const Application drain = make_fixed_app(9, 2, {0.1, 0.1, 10.0}, 14.5, 0.1);
  REQUIRE(apply_placement(topo, drain, 0, 0, ConfigType::Type2, 14.5, 0.0));

  const Application app = make_fixed_app(0, 1, {1.0, 1.0, 100.0}, 4.25, 1.5);
  const ThroughputRequirement req{ConfigType::Type3, 4.25, 1.5};
  CHECK(topo.link_between(1, 2).residual() == 15.0);
  CHECK(topo.link_between(2, 0).residual() == doctest::Approx(0.5));
  CHECK(!verify(2, app, topo, req).has_value());

  release_placement(topo, drain, 0, 0, ConfigType::Type2, 14.5, 0.0);
  CHECK(verify(2, app, topo, req).has_value());
}

TEST_CASE("select: a single candidate is returned unconditionally") {
  const Topology topo = make_topology({{{8.0, 80.0, 15000.0}}}, 15.0);
  const Application app = make_fixed_app(0, 1, {1.2, 3.5, 1250.0}, 4.25, 1.5);
  CandidateSet cs = build_candidates(app, topo, all_requirements(app, topo), false);
  REQUIRE(!cs.empty());
  const std::size_t pick = select(cs, app, topo);
  CHECK(cs.admissible[pick].region == cs.admissible[0].region);
}

TEST_CASE("select: squared-norm comparison matches the hand computation") {
  // Two regions with identical compute fractions (0.5, 0.5, 0.5); case 1
  // carries b1 = 0.1 and case 3 carries (0.3, 0.2): 0.76 vs 0.88.
  Topology topo = make_topology({{{2.0, 2.0, 2.0}}, {{2.0, 2.0, 2.0}}}, 15.0,
                                {{1, 2, 15.0, 0.0}});
  Application app = make_fixed_app(0, 1, {1.0, 1.0, 1.0}, 4.5, 1.5);
  // b1(case1) = 1.5/15 = 0.1; b1(case3) = 4.5/15 = 0.3, b2 = bl'/15 = 0.2.
  app.fixed_bl = 1.5;
  CandidateSet cs;
  cs.app_id = 0;
  cs.admissible.push_back({1, 0, ConfigType::Type1, {ConfigType::Type1, 0.0, 1.5}, {}, 0.0});
  cs.admissible.push_back({2, 0, ConfigType::Type3, {ConfigType::Type3, 4.5, 3.0}, {}, 0.0});
  const std::size_t pick = select(cs, app, topo);
  CHECK(cs.admissible[0].norm2 == doctest::Approx(0.76));
  CHECK(cs.admissible[1].norm2 == doctest::Approx(0.88));
  CHECK(pick == 0);
}

TEST_CASE("select: exact fit gives unit compute fractions and stays admissible") {
  const Topology topo = make_topology({{{1.0, 1.0, 1.0}}}, 15.0);
  const Application app = make_fixed_app(0, 1, {1.0, 1.0, 1.0}, 4.25, 1.5);
  CandidateSet cs = build_candidates(app, topo, all_requirements(app, topo), false);
  REQUIRE(cs.admissible.size() >= 1);
  CHECK(cs.admissible[0].region == 1);
  select(cs, app, topo);
  CHECK(cs.admissible[0].gradient[0] == doctest::Approx(1.0));
  CHECK(cs.admissible[0].gradient[1] == doctest::Approx(1.0));
  CHECK(cs.admissible[0].gradient[2] == doctest::Approx(1.0));
}

TEST_CASE("gradient components stay in [0,1] for verified candidates") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance instance = random_small_instance(seed);
    for (const Application& app : instance.apps) {
      CandidateSet cs =
          build_candidates(app, instance.topology, all_requirements(app, instance.topology), false);
      if (cs.empty()) continue;
      select(cs, app, instance.topology);
      for (const Candidate& c : cs.admissible) {
        for (double g : c.gradient) {
          CHECK(g >= 0.0);
          CHECK(g <= 1.0 + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("fpa: lone app lands at home as type 1") {
  const Topology topo = make_topology({{{8.0, 80.0, 15000.0}}}, 15.0);
  const std::vector<Application> apps = {make_fixed_app(0, 1, {1.2, 3.5, 1250.0}, 4.25, 1.5)};
  const PlacementSolution sol = fpa(topo, apps);
  REQUIRE(sol.deployed_count() == 1);
  CHECK(sol.assignments.at(0).config == ConfigType::Type1);
  CHECK(sol.assignments.at(0).region == 1);
  CHECK(sol.objective == 1.0);
  CHECK(audit_solution(topo, apps, sol).clean());
}

TEST_CASE("fpa: two apps contending for one server match exhaustive feasibility") {
  // One server fits one app; the cloud-link fits one bl plus one bh but not
  // two of either kind.
  const Topology topo = make_topology({{{2.0, 60.0, 5000.0}}}, 6.0);
  const std::vector<Application> apps = {
      make_fixed_app(0, 1, {1.5, 3.0, 1000.0}, 4.25, 1.5),
      make_fixed_app(1, 1, {1.5, 3.0, 1000.0}, 4.25, 1.5)};
  const PlacementSolution greedy = fpa(topo, apps);
  const PlacementSolution oracle = solve_exhaustive(topo, apps);
  CHECK(audit_solution(topo, apps, greedy).clean());
  CHECK(greedy.deployed_count() == 2);  // one at home, one on the cloud
  CHECK(oracle.objective == 2.0);
  CHECK(greedy.objective == oracle.objective);
}

TEST_CASE("fpa: batch with nothing feasible ends all-undeployable") {
  const Topology topo = make_topology({{{8.0, 80.0, 15000.0}}}, 1.0);  // starved links
  std::vector<Application> apps = {
      make_delay_app(0, 1, {1.0, 1.0, 100.0}, 4.25, 1.5, 10.0, 0.2, 10.0),
      make_delay_app(1, 1, {1.0, 1.0, 100.0}, 4.25, 1.5, 10.0, 0.3, 10.0)};
  const PlacementSolution sol = fpa(topo, apps);
  CHECK(sol.deployed_count() == 0);
  CHECK(sol.objective == 0.0);
  CHECK(sol.undeployable.size() == 2);
}

TEST_CASE("fpa is deterministic and audits clean on random instances") {
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    const Instance instance = random_small_instance(seed);
    const PlacementSolution a = fpa(instance.topology, instance.apps);
    const PlacementSolution b = fpa(instance.topology, instance.apps);
    CHECK(a == b);
    CHECK(audit_solution(instance.topology, instance.apps, a).clean());
    CHECK(a.deployed_count() + static_cast<int>(a.undeployable.size()) ==
          static_cast<int>(instance.apps.size()));
  }
}

TEST_CASE("fpa never beats the exact solver") {
  for (std::uint64_t seed = 200; seed < 230; ++seed) {
    const Instance instance = random_small_instance(seed, 6);
    std::vector<std::vector<RequirementEntry>> reqs;
    for (const Application& a : instance.apps) {
      reqs.push_back(all_requirements(a, instance.topology));
    }
    const ExactResult exact = solve_exact(build_model(instance.topology, instance.apps, reqs));
    const PlacementSolution greedy = fpa(instance.topology, instance.apps);
    REQUIRE(exact.certified);
    CHECK(greedy.objective <= exact.objective + 1e-9);
  }
}

TEST_CASE("fpa-r: fragmentation makes an aggregate-admitted app undeployable") {
  // Home region splits 2 GB over two servers; the neighbor has one whole
  // 2 GB server. The 1.5 GB app fits no single home server, and the narrow
  // cloud-links rule the cloud out (bh = 4.25 > 2).
  Topology topo = make_topology({{{1.0, 60.0, 5000.0}, {1.0, 60.0, 5000.0}},
                                 {{2.0, 60.0, 5000.0}}},
                                2.0, {{1, 2, 15.0, 0.0}});
  const std::vector<Application> apps = {make_fixed_app(0, 1, {1.5, 2.0, 500.0}, 4.25, 1.5)};

  // Plain FPA rejects the fragmented home region up front and offloads.
  const PlacementSolution plain = fpa(topo, apps);
  REQUIRE(plain.deployed_count() == 1);
  CHECK(plain.assignments.at(0).region == 2);

  // FPA-R admits the home region on the aggregate (2 GB), picks it (home
  // beats the neighbor on gradient), then finds no individual server.
  for (std::uint64_t seed : {0ULL, 1ULL, 42ULL}) {
    const PlacementSolution aggregated = fpa_r(topo, apps, seed);
    CHECK(aggregated.deployed_count() == 0);
    CHECK(aggregated.undeployable.count(0) == 1);
  }
}

TEST_CASE("fpa-r equals fpa on single-server regions, any seed") {
  for (std::uint64_t seed = 300; seed < 320; ++seed) {
    Instance instance = random_small_instance(seed);
    for (Region& r : instance.topology.regions) {
      if (r.id == 0) continue;
      r.servers.resize(1);  // collapse to one server per region
    }
    instance.topology.rebuild_index();
    const PlacementSolution base = fpa(instance.topology, instance.apps);
    for (std::uint64_t s : {0ULL, 7ULL, 99ULL}) {
      CHECK(fpa_r(instance.topology, instance.apps, s) == base);
    }
  }
}

TEST_CASE("fpa-r audits clean and matches fpa determinism per seed") {
  for (std::uint64_t seed = 400; seed < 420; ++seed) {
    const Instance instance = random_small_instance(seed);
    const PlacementSolution a = fpa_r(instance.topology, instance.apps, seed);
    const PlacementSolution b = fpa_r(instance.topology, instance.apps, seed);
    CHECK(a == b);
    CHECK(audit_solution(instance.topology, instance.apps, a).clean());
  }
}

TEST_CASE("delay-driven pipeline: placements meet the deadline inequality end to end") {
  // The generator samples delays/data sizes, the closed forms fix the
  // throughputs, and the auditor re-checks the deadline from raw deltas: a
  // disagreement anywhere in the chain shows up as a delay violation.
  for (std::uint64_t seed = 600; seed < 610; ++seed) {
    ScenarioConfig c;
    c.K = 4;
    c.U = 8;
    c.q = 0.7;
    c.beta = 1.5;
    c.delay_mode = true;
    c.seed = seed;
    const Instance instance = gen_instance(c);
    for (const Application& a : instance.apps) CHECK(!a.has_fixed_throughput());

    const PlacementSolution greedy = fpa(instance.topology, instance.apps);
    CHECK(audit_solution(instance.topology, instance.apps, greedy).clean());

    std::vector<std::vector<RequirementEntry>> reqs;
    for (const Application& a : instance.apps) {
      reqs.push_back(all_requirements(a, instance.topology));
    }
    const ExactResult exact = solve_exact(build_model(instance.topology, instance.apps, reqs));
    REQUIRE(exact.certified);
    CHECK(audit_solution(instance.topology, instance.apps, exact.solution).clean());
    CHECK(greedy.objective <= exact.objective + 1e-9);
    CHECK(exact.objective == solve_exhaustive(instance.topology, instance.apps).objective);
  }
}

TEST_CASE("fpa-r deploys no more than fpa on fragmentation-prone instances") {
  // Regions made of many small servers versus apps near the server size:
  // aggregation overcommits, so on average FPA-R loses deployments.
  int fpa_total = 0, fpar_total = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    std::vector<std::vector<ResourceVector>> servers(3);
    for (auto& region : servers) {
      const int n = 2 + static_cast<int>(rng.uniform_index(2));
      for (int i = 0; i < n; ++i) region.push_back({1.0, 30.0, 4000.0});
    }
    Instance instance;
    instance.topology = make_topology(servers, 30.0, {{1, 2, 30.0, 0.0}, {2, 3, 30.0, 0.0}});
    for (int u = 0; u < 8; ++u) {
      instance.apps.push_back(make_fixed_app(
          u, 1 + static_cast<int>(rng.uniform_index(3)),
          {rng.uniform(0.6, 1.0), rng.uniform(1.0, 8.0), rng.uniform(500.0, 2000.0)},
          rng.uniform(3.5, 5.0), rng.uniform(1.0, 2.0)));
    }
    instance.rebuild_home_apps();
    fpa_total += fpa(instance.topology, instance.apps).deployed_count();
    fpar_total += fpa_r(instance.topology, instance.apps, seed).deployed_count();
  }
  CHECK(fpar_total <= fpa_total);
}
