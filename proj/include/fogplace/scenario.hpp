#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fogplace/model.hpp"
#include "fogplace/rng.hpp"

namespace fogplace {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double mean() const { return 0.5 * (lo + hi); }
  double sample(Rng& rng) const { return lo == hi ? lo : rng.uniform(lo, hi); }
};

struct ServerClass {
  std::string name;
  ResourceVector capacity;
};

// Low / Medium / High fog server classes.
std::vector<ServerClass> default_server_classes();

// Per-app uniform generation ranges (resources and the two throughputs).
struct DemandRanges {
  Range cpu{500.0, 2000.0};      // MIPS
  Range memory{0.5, 2.0};        // GB
  Range storage{1.0, 8.0};       // GB
  Range bl{1.0, 2.0};            // Mbit/s
  Range bh{3.5, 5.0};            // Mbit/s
};

enum class RewardMode { Unit, CpuWeighted };

const char* reward_mode_name(RewardMode m);
RewardMode reward_mode_from_name(const std::string& s);

// Sampling ranges for the delay-driven pipeline (delay_mode = true), where
// data unit sizes, delays and rates are drawn and the minimum throughputs
// come from the closed forms instead of being sampled directly.
struct DelayParams {
  Range link_delay{0.005, 0.05};   // s
  Range proc_delay{0.01, 0.1};     // s
  Range output_rate{0.5, 1.0};     // 1/s
  Range source_rate{50.0, 100.0};  // Mbit/s
  Range data_high{3.5, 5.0};       // Mbit
  Range data_low{1.0, 2.0};        // Mbit
};

struct ScenarioConfig {
  int K = 10;                  // regions including the cloud (region 0)
  int U = 100;                 // batch size
  double q = 0.4;              // crosslink probability
  double alpha = 0.5;          // home-region Zipf exponent
  double beta = 1.5;           // provisioning slack
  double link_bandwidth = 15.0;  // Mbit/s, cloud-links and crosslinks alike
  std::vector<ServerClass> server_classes = default_server_classes();
  DemandRanges demand_ranges;
  ResourceVector nominal_app{1.2, 3.5, 1250.0};  // u0
  RewardMode reward_mode = RewardMode::Unit;
  std::uint64_t seed = 0;

  // Overrides the number of fog regions (default K - 1, i.e. K counts the
  // cloud).
  std::optional<int> fog_region_count;

  bool delay_mode = false;
  DelayParams delay_params;

  int fog_regions() const { return fog_region_count.value_or(K - 1); }
  void validate() const;
};

// Zipf pmf over fog regions 1..F: P(k) = k^-alpha / gamma.
double home_region_pmf(const ScenarioConfig& config, int region);

// Star of cloud-links plus Erdos-Renyi crosslinks at probability q. Consumes
// exactly one uniform draw per fog region pair regardless of q, so instances
// generated with the same seed but different q share the rest of the stream
// (paired topologies). Fog regions start with no servers.
Topology gen_topology(const ScenarioConfig& config, Rng& rng);

// U applications: demands uniform in their ranges, home region Zipf over the
// fog regions, throughputs sampled directly (delays zero) unless delay_mode.
// CpuWeighted mode pins every odd-indexed app at the top of the CPU range
// and sets f = cpu / cpu_range.hi uniformly over regions.
std::vector<Application> gen_apps(const ScenarioConfig& config, Rng& rng);

// Fills each fog region with uniformly drawn server classes until the budget
// (1+beta) * (U/K) * u0 has a non-positive component; the last server may
// overshoot and every region ends with at least one.
void provision_servers(const ScenarioConfig& config, Topology& topology, Rng& rng);

// gen_topology -> gen_apps -> provision_servers off one seeded stream.
// Identical config (including seed) gives a bit-identical instance.
Instance gen_instance(const ScenarioConfig& config);

}  // namespace fogplace
