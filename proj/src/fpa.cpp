#include "fogplace/fpa.hpp"

#include <cassert>
#include <limits>

#include "fogplace/rng.hpp"

namespace fogplace {

namespace {

// Links a configuration draws bandwidth from, with the amounts.
bool links_admit(int region, const Application& app, const Topology& topology,
                 const ThroughputRequirement& req) {
  switch (req.config) {
    case ConfigType::Type1: {
      const Link* l = topology.find_link(app.home_region, 0);
      return l && l->residual() + kResidualTol >= req.bl;
    }
    case ConfigType::Type2: {
      const Link* l = topology.find_link(app.home_region, 0);
      return l && l->residual() + kResidualTol >= req.bh;
    }
    case ConfigType::Type3: {
      const Link* cross = topology.find_link(app.home_region, region);
      const Link* up = topology.find_link(region, 0);
      return cross && up && cross->residual() + kResidualTol >= req.bh &&
             up->residual() + kResidualTol >= req.bl;
    }
  }
  return false;
}

// demand/residual with the 0/0 -> 0 convention; positive demand against a
// zero residual cannot occur for verified candidates.
double ratio(double demand, double residual) {
  if (demand <= 0.0) return 0.0;
  return demand / residual;
}

}  // namespace

std::optional<int> verify(int region, const Application& app, const Topology& topology,
                          const ThroughputRequirement& req) {
  if (region < 0 || region >= topology.num_regions()) return std::nullopt;
  if (!links_admit(region, app, topology, req)) return std::nullopt;
  for (const ServerUnit& s : topology.regions[region].servers) {
    if (s.can_host(app.demand)) return s.id();
  }
  return std::nullopt;
}

bool verify_aggregate(int region, const Application& app, const Topology& topology,
                      const ThroughputRequirement& req) {
  if (region < 0 || region >= topology.num_regions()) return false;
  if (!links_admit(region, app, topology, req)) return false;
  return fits(app.demand, topology.regions[region].aggregate_residual());
}

CandidateSet build_candidates(const Application& app, const Topology& topology,
                              const std::vector<RequirementEntry>& entries,
                              bool region_aggregated) {
  CandidateSet cs;
  cs.app_id = app.id;
  for (const RequirementEntry& e : entries) {
    if (!e.feasible) continue;
    Candidate c;
    c.region = e.region;
    c.config = e.config;
    c.req = e.req;
    if (region_aggregated) {
      if (!verify_aggregate(e.region, app, topology, e.req)) continue;
      c.server = -1;
    } else {
      auto server = verify(e.region, app, topology, e.req);
      if (!server) continue;
      c.server = *server;
    }
    cs.admissible.push_back(c);
  }
  return cs;
}

std::size_t select(CandidateSet& candidates, const Application& app, const Topology& topology) {
  if (candidates.empty()) throw std::logic_error("select on an empty candidate set");

  for (Candidate& c : candidates.admissible) {
    const ResourceVector agg = topology.regions[c.region].aggregate_residual();
    double b1 = 0.0, b2 = 0.0;
    switch (c.config) {
      case ConfigType::Type1:
        b1 = ratio(c.req.bl, topology.link_between(app.home_region, 0).residual());
        break;
      case ConfigType::Type2:
        b1 = ratio(c.req.bh, topology.link_between(app.home_region, 0).residual());
        break;
      case ConfigType::Type3:
        b1 = ratio(c.req.bh, topology.link_between(app.home_region, c.region).residual());
        b2 = ratio(c.req.bl, topology.link_between(c.region, 0).residual());
        break;
    }
    c.gradient = {ratio(app.demand.memory, agg.memory), ratio(app.demand.cpu, agg.cpu),
                  ratio(app.demand.storage, agg.storage), b1, b2};
    c.norm2 = 0.0;
    for (double v : c.gradient) c.norm2 += v * v;
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.admissible.size(); ++i) {
    const Candidate& a = candidates.admissible[i];
    const Candidate& b = candidates.admissible[best];
    if (a.norm2 < b.norm2 ||
        (a.norm2 == b.norm2 &&
         std::make_pair(a.region, a.server) < std::make_pair(b.region, b.server))) {
      best = i;
    }
  }
  return best;
}

namespace {

PlacementSolution run_greedy(Topology& topology, const std::vector<Application>& apps,
                             bool region_aggregated, Rng* rng) {
  PlacementSolution solution;

  // The throughput requirements depend only on static delays, so they are
  // computed once; candidate sets and gradients are rebuilt every iteration
  // against the current residuals.
  std::vector<std::vector<RequirementEntry>> reqs;
  reqs.reserve(apps.size());
  for (const Application& a : apps) reqs.push_back(all_requirements(a, topology));

  std::vector<std::size_t> working(apps.size());
  for (std::size_t i = 0; i < apps.size(); ++i) working[i] = i;

  while (!working.empty()) {
    std::vector<std::size_t> next;
    bool have_best = false;
    std::size_t best_app = 0;
    Candidate best_candidate;
    double best_priority = std::numeric_limits<double>::infinity();

    for (std::size_t i : working) {
      const Application& app = apps[i];
      CandidateSet cs = build_candidates(app, topology, reqs[i], region_aggregated);
      if (cs.empty()) {
        solution.undeployable.insert(app.id);  // leaves the working set now
        continue;
      }
      next.push_back(i);
      const Candidate& c = cs.admissible[select(cs, app, topology)];
      const double reward = app.reward_for(c.region);
      const double priority =
          reward > 0 ? c.norm2 / reward : std::numeric_limits<double>::infinity();
      if (!have_best || priority < best_priority ||
          (priority == best_priority && app.id < apps[best_app].id)) {
        have_best = true;
        best_app = i;
        best_candidate = c;
        best_priority = priority;
      }
    }

    if (!have_best) break;  // everything left was undeployable

    const Application& app = apps[best_app];
    int server = best_candidate.server;
    if (region_aggregated) {
      std::vector<int> fitting;
      for (const ServerUnit& s : topology.regions[best_candidate.region].servers) {
        if (s.can_host(app.demand)) fitting.push_back(s.id());
      }
      if (fitting.empty()) {
        // The aggregate admitted the app but no single server holds it.
        solution.undeployable.insert(app.id);
        working.clear();
        for (std::size_t i : next) {
          if (i != best_app) working.push_back(i);
        }
        continue;
      }
      server = fitting[rng->uniform_index(fitting.size())];
    }

    const bool ok = apply_placement(topology, app, best_candidate.region, server,
                                    best_candidate.config, best_candidate.req.bh,
                                    best_candidate.req.bl);
    assert(ok);
    (void)ok;
    solution.assignments[app.id] = {best_candidate.region, server, best_candidate.config,
                                    best_candidate.req.bh, best_candidate.req.bl};
    solution.objective += app.reward_for(best_candidate.region);

    working.clear();
    for (std::size_t i : next) {
      if (i != best_app) working.push_back(i);
    }
  }

  return solution;
}

}  // namespace

PlacementSolution fpa(Topology topology, const std::vector<Application>& apps) {
  return run_greedy(topology, apps, /*region_aggregated=*/false, nullptr);
}

PlacementSolution fpa_r(Topology topology, const std::vector<Application>& apps,
                        std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return run_greedy(topology, apps, /*region_aggregated=*/true, &rng);
}

}  // namespace fogplace
