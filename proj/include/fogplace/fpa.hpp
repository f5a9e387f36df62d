#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "fogplace/model.hpp"
#include "fogplace/throughput.hpp"

namespace fogplace {

// One admissible deployment option for an app with its gradient: normalized
// residual fractions (memory, cpu, storage, first bandwidth term, second
// bandwidth term). Components are in [0,1] for verified candidates.
struct Candidate {
  int region = -1;
  int server = -1;  // -1 in region-aggregated mode until deployment
  ConfigType config = ConfigType::Type1;
  ThroughputRequirement req;
  std::array<double, 5> gradient{};
  double norm2 = 0.0;
};

struct CandidateSet {
  int app_id = -1;
  std::vector<Candidate> admissible;
  bool empty() const { return admissible.empty(); }
};

// Admission check for one region: the first server (ascending id) whose
// residual covers the demand, provided every link the configuration uses has
// residual for its throughput. Empty optional means not admissible.
std::optional<int> verify(int region, const Application& app, const Topology& topology,
                          const ThroughputRequirement& req);

// Region-aggregated admission: the region's summed residual covers the
// demand (one virtual server per region) plus the same link checks.
bool verify_aggregate(int region, const Application& app, const Topology& topology,
                      const ThroughputRequirement& req);

// Gradient over the admissible options: compute fractions against the
// region's aggregated residual, bandwidth fractions against the involved
// link residuals. Fills gradients/norms and returns the index of the
// candidate with minimum squared norm; ties broken by (region id, server id)
// ascending. Precondition: candidates non-empty.
std::size_t select(CandidateSet& candidates, const Application& app, const Topology& topology);

// Builds the candidate set of an app over {home, fog neighbors, cloud} from
// its precomputed requirement entries.
CandidateSet build_candidates(const Application& app, const Topology& topology,
                              const std::vector<RequirementEntry>& entries,
                              bool region_aggregated);

// Greedy placement: per outer iteration every undeployed app is scored by
// its best candidate's squared gradient norm (divided by the deployment
// reward when rewards are not uniform) and the minimum is deployed; apps
// with no admissible candidate become undeployable. Deterministic.
PlacementSolution fpa(Topology topology, const std::vector<Application>& apps);

// Region-aggregated variant: admission treats each region as one virtual
// server with the summed residual; after the region is chosen the server is
// drawn uniformly at random among servers that individually fit. An app
// whose chosen region has no individually fitting server (a fragmentation
// artifact of the aggregation) becomes undeployable.
PlacementSolution fpa_r(Topology topology, const std::vector<Application>& apps,
                        std::uint64_t rng_seed);

}  // namespace fogplace
