#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fogplace/exact.hpp"
#include "fogplace/model.hpp"
#include "fogplace/scenario.hpp"

namespace fogplace {

struct AuditFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Empirical CDF over [0,1]-normalized values; y_i = (i+1)/n at breakpoints.
struct EmpiricalCdf {
  std::vector<double> points;  // sorted
  bool empty() const { return points.empty(); }
};

EmpiricalCdf compute_cdf(const PlacementSolution& solution, const std::vector<Application>& apps,
                         Resource which, Range normalization);

// Kolmogorov-Smirnov distance of a CDF against the uniform law on [0,1].
double ks_distance_uniform(const EmpiricalCdf& cdf);

struct RunMetrics {
  int deployed = 0;
  int undeployable = 0;
  double objective = 0.0;
  int type1 = 0, type2 = 0, type3 = 0;
  double avg_crosslink_usage = 0.0;  // mean used/capacity over crosslinks
  double avg_cloudlink_usage = 0.0;  // mean used/capacity over cloud-links
  EmpiricalCdf cdf_memory, cdf_storage, cdf_cpu;
  double orch_delay_ms = 0.0;        // placement computation only
};

RunMetrics compute_metrics(const Instance& instance, const PlacementSolution& solution,
                           const DemandRanges& ranges, double orch_delay_ms);

struct PointOptions {
  std::uint64_t exact_node_budget = 200000;
  // Allows a budget-truncated exact run on points beyond the certified
  // search-space cap.
  bool uncertified = false;
  bool record_timing = true;
  std::string dump_dir;  // where audit-failure diagnostics land ("" = cwd)
};

struct AlgorithmRun {
  std::string algorithm;
  RunMetrics metrics;
  PlacementSolution solution;
  bool certified = true;
};

// Known algorithm names: "fpa", "fpa-r", "exact". fpa-r draws its intra-
// region server choices from the instance seed.
PlacementSolution run_algorithm(const std::string& algorithm, const Instance& instance,
                                std::uint64_t seed, const PointOptions& options,
                                bool* certified = nullptr);

// Generates the point's instance (one shared instance across algorithms),
// runs each algorithm, audits every solution (throws AuditFailure with a
// diagnostic dump on any violation) and computes metrics. Timing covers the
// placement call only.
std::vector<AlgorithmRun> run_point(const ScenarioConfig& point,
                                    const std::vector<std::string>& algorithms,
                                    const PointOptions& options = {});

struct ExperimentPlan {
  ScenarioConfig base;
  std::vector<int> sweep_u;
  std::vector<double> sweep_q;
  std::vector<double> sweep_beta;
  int instances_per_point = 10;
  std::vector<std::string> algorithms{"fpa", "fpa-r"};
  std::string output_dir = ".";
  std::uint64_t exact_node_budget = 200000;
  bool uncertified = false;
  // When false, orch_delay_ms is written as 0 so re-running a plan produces
  // byte-identical CSVs.
  bool record_timing = true;
};

ExperimentPlan plan_from_json(const std::string& text);
std::string plan_to_json(const ExperimentPlan& plan);

// Instance seed for (point, index): a splitmix64 chain over the base seed,
// the point coordinates and the index.
std::uint64_t derive_seed(std::uint64_t base, int u, double q, double beta, int instance);

struct SweepResult {
  std::string runs_csv_path;
  std::string aggregate_csv_path;
  int failures = 0;
};

inline constexpr const char* kRunsCsvHeader =
    "point_id,seed,algorithm,K,U,q,beta,reward_mode,deployed,undeployable,objective,"
    "type1,type2,type3,avg_crosslink_usage,avg_cloudlink_usage,orch_delay_ms";

// Cartesian sweep x instances_per_point. Jobs run on a worker pool (size
// from `workers`, else FOG_SWEEP_WORKERS, else the hardware count) and the
// CSVs come out in (point, instance, algorithm) order regardless of
// scheduling. A failing point is logged to failures.log and skipped.
SweepResult run_sweep(const ExperimentPlan& plan, int workers = 0);

}  // namespace fogplace
