#include "fogplace/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <sstream>
#include <thread>

#include "fogplace/fpa.hpp"
#include "fogplace/serialize.hpp"
#include "fogplace/util.hpp"
#include "json.hpp"

namespace fogplace {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

EmpiricalCdf compute_cdf(const PlacementSolution& solution, const std::vector<Application>& apps,
                         Resource which, Range normalization) {
  EmpiricalCdf cdf;
  const double span = normalization.hi - normalization.lo;
  for (const Application& a : apps) {
    if (!solution.assignments.count(a.id)) continue;
    double x = span > 0 ? (a.demand[which] - normalization.lo) / span : 0.0;
    cdf.points.push_back(std::clamp(x, 0.0, 1.0));
  }
  std::sort(cdf.points.begin(), cdf.points.end());
  return cdf;
}

double ks_distance_uniform(const EmpiricalCdf& cdf) {
  const std::size_t n = cdf.points.size();
  if (n == 0) return 1.0;
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = cdf.points[i];
    d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / n - x));
    d = std::max(d, std::abs(x - static_cast<double>(i) / n));
  }
  return d;
}

RunMetrics compute_metrics(const Instance& instance, const PlacementSolution& solution,
                           const DemandRanges& ranges, double orch_delay_ms) {
  RunMetrics m;
  m.deployed = solution.deployed_count();
  m.undeployable = static_cast<int>(solution.undeployable.size());
  m.objective = solution.objective;
  for (const auto& [app, asg] : solution.assignments) {
    switch (asg.config) {
      case ConfigType::Type1: ++m.type1; break;
      case ConfigType::Type2: ++m.type2; break;
      case ConfigType::Type3: ++m.type3; break;
    }
  }
  const auto loads = link_loads(instance.topology, instance.apps, solution);
  double cross_sum = 0.0, cloud_sum = 0.0;
  int cross_n = 0, cloud_n = 0;
  for (std::size_t i = 0; i < instance.topology.links.size(); ++i) {
    const Link& l = instance.topology.links[i];
    const double usage = l.capacity() > 0 ? loads[i] / l.capacity() : 0.0;
    if (l.is_cloud_link()) {
      cloud_sum += usage;
      ++cloud_n;
    } else {
      cross_sum += usage;
      ++cross_n;
    }
  }
  m.avg_cloudlink_usage = cloud_n ? cloud_sum / cloud_n : 0.0;
  m.avg_crosslink_usage = cross_n ? cross_sum / cross_n : 0.0;
  m.cdf_memory = compute_cdf(solution, instance.apps, Resource::Memory, ranges.memory);
  m.cdf_storage = compute_cdf(solution, instance.apps, Resource::Storage, ranges.storage);
  m.cdf_cpu = compute_cdf(solution, instance.apps, Resource::Cpu, ranges.cpu);
  m.orch_delay_ms = orch_delay_ms;
  return m;
}

// ---------------------------------------------------------------------------
// Point runner
// ---------------------------------------------------------------------------

PlacementSolution run_algorithm(const std::string& algorithm, const Instance& instance,
                                std::uint64_t seed, const PointOptions& options,
                                bool* certified) {
  if (certified) *certified = true;
  if (algorithm == "fpa") return fpa(instance.topology, instance.apps);
  if (algorithm == "fpa-r") return fpa_r(instance.topology, instance.apps, seed);
  if (algorithm == "exact") {
    std::vector<std::vector<RequirementEntry>> reqs;
    for (const Application& a : instance.apps) {
      reqs.push_back(all_requirements(a, instance.topology));
    }
    const ReducedModel model = build_model(instance.topology, instance.apps, reqs);
    ExactResult res = solve_exact(model, options.exact_node_budget);
    if (!res.certified && !options.uncertified) {
      throw std::runtime_error(
          "exact did not certify within " + std::to_string(options.exact_node_budget) +
          " nodes; pass --uncertified to accept the budgeted best-found solution");
    }
    if (certified) *certified = res.certified;
    return res.solution;
  }
  throw std::invalid_argument("unknown algorithm: " + algorithm);
}

namespace {

std::string point_id_of(const ScenarioConfig& c) {
  std::ostringstream os;
  os << "U" << c.U << "_q" << fmt_double(c.q) << "_b" << fmt_double(c.beta);
  return os.str();
}

void dump_failure(const std::string& dir, const std::string& tag, const Instance& instance,
                  const ScenarioConfig& config, const PlacementSolution& solution,
                  const std::string& algorithm) {
  const fs::path base = dir.empty() ? fs::path(".") : fs::path(dir);
  std::error_code ec;
  fs::create_directories(base, ec);
  write_file((base / (tag + ".instance.json")).string(), instance_to_json(instance, &config));
  write_file((base / (tag + ".solution.json")).string(), solution_to_json(solution, algorithm));
}

}  // namespace

std::vector<AlgorithmRun> run_point(const ScenarioConfig& point,
                                    const std::vector<std::string>& algorithms,
                                    const PointOptions& options) {
  const Instance instance = gen_instance(point);
  std::vector<AlgorithmRun> runs;
  for (const std::string& algorithm : algorithms) {
    AlgorithmRun run;
    run.algorithm = algorithm;
    const auto start = std::chrono::steady_clock::now();
    run.solution = run_algorithm(algorithm, instance, point.seed, options, &run.certified);
    const auto stop = std::chrono::steady_clock::now();
    const double ms =
        std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count() / 1e6;

    const AuditReport report = audit_solution(instance.topology, instance.apps, run.solution);
    if (!report.clean()) {
      const std::string tag = point_id_of(point) + "_s" + std::to_string(point.seed) + "_" +
                              algorithm + ".audit-failure";
      dump_failure(options.dump_dir, tag, instance, point, run.solution, algorithm);
      std::ostringstream os;
      os << algorithm << " produced " << report.violations.size() << " violation(s) at "
         << point_id_of(point) << " seed " << point.seed << "; first: "
         << family_name(report.violations[0].family) << " " << report.violations[0].entity
         << " slack " << report.violations[0].slack << " (dump: " << tag << ".*)";
      throw AuditFailure(os.str());
    }
    // Internal consistency of the solution record itself.
    double objective = 0.0;
    std::map<int, const Application*> by_id;
    for (const Application& a : instance.apps) by_id[a.id] = &a;
    for (const auto& [u, asg] : run.solution.assignments) {
      objective += by_id.at(u)->reward_for(asg.region);
    }
    if (std::abs(objective - run.solution.objective) > 1e-6 ||
        run.solution.deployed_count() + static_cast<int>(run.solution.undeployable.size()) !=
            static_cast<int>(instance.apps.size())) {
      throw AuditFailure(algorithm + " returned an inconsistent solution record");
    }

    run.metrics = compute_metrics(instance, run.solution, point.demand_ranges,
                                  options.record_timing ? ms : 0.0);
    runs.push_back(std::move(run));
  }
  return runs;
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

std::uint64_t derive_seed(std::uint64_t base, int u, double q, double beta, int instance) {
  std::uint64_t s = splitmix64(base);
  s = splitmix64(s ^ static_cast<std::uint64_t>(u));
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(double));
  std::memcpy(&bits, &q, sizeof(bits));
  s = splitmix64(s ^ bits);
  std::memcpy(&bits, &beta, sizeof(bits));
  s = splitmix64(s ^ bits);
  return splitmix64(s ^ static_cast<std::uint64_t>(instance));
}

ExperimentPlan plan_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ExperimentPlan plan;
  if (j.contains("base")) plan.base = config_from_json(j.at("base").dump());
  plan.sweep_u = j.value("sweep_u", std::vector<int>{plan.base.U});
  plan.sweep_q = j.value("sweep_q", std::vector<double>{plan.base.q});
  plan.sweep_beta = j.value("sweep_beta", std::vector<double>{plan.base.beta});
  plan.instances_per_point = j.value("instances_per_point", 10);
  plan.algorithms = j.value("algorithms", std::vector<std::string>{"fpa", "fpa-r"});
  plan.output_dir = j.value("output_dir", std::string("."));
  plan.exact_node_budget = j.value("exact_node_budget", std::uint64_t{200000});
  plan.uncertified = j.value("uncertified", false);
  plan.record_timing = j.value("record_timing", true);
  return plan;
}

std::string plan_to_json(const ExperimentPlan& plan) {
  nlohmann::json j;
  j["base"] = nlohmann::json::parse(config_to_json(plan.base));
  j["sweep_u"] = plan.sweep_u;
  j["sweep_q"] = plan.sweep_q;
  j["sweep_beta"] = plan.sweep_beta;
  j["instances_per_point"] = plan.instances_per_point;
  j["algorithms"] = plan.algorithms;
  j["output_dir"] = plan.output_dir;
  j["exact_node_budget"] = plan.exact_node_budget;
  j["uncertified"] = plan.uncertified;
  j["record_timing"] = plan.record_timing;
  return j.dump(2) + "\n";
}

namespace {

struct Job {
  ScenarioConfig config;
  std::string point_id;
  int point_index = 0;
  int instance_index = 0;
};

struct JobResult {
  bool failed = false;
  std::string error;
  std::vector<AlgorithmRun> runs;
};

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  if (const char* env = std::getenv("FOG_SWEEP_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string csv_row(const Job& job, const AlgorithmRun& run) {
  const RunMetrics& m = run.metrics;
  std::ostringstream os;
  os << job.point_id << ',' << job.config.seed << ',' << run.algorithm << ',' << job.config.K
     << ',' << job.config.U << ',' << fmt_double(job.config.q) << ','
     << fmt_double(job.config.beta) << ',' << reward_mode_name(job.config.reward_mode) << ','
     << m.deployed << ',' << m.undeployable << ',' << fmt_double(m.objective) << ',' << m.type1
     << ',' << m.type2 << ',' << m.type3 << ',' << fmt_double(m.avg_crosslink_usage) << ','
     << fmt_double(m.avg_cloudlink_usage) << ',' << fmt_double(m.orch_delay_ms);
  return os.str();
}

struct Welford {
  int n = 0;
  double sum = 0.0, sumsq = 0.0;
  void add(double x) {
    ++n;
    sum += x;
    sumsq += x * x;
  }
  double mean() const { return n ? sum / n : 0.0; }
  double stddev() const {  // sample standard deviation
    if (n < 2) return 0.0;
    const double v = (sumsq - sum * sum / n) / (n - 1);
    return v > 0 ? std::sqrt(v) : 0.0;
  }
};

}  // namespace

SweepResult run_sweep(const ExperimentPlan& plan, int workers) {
  fs::create_directories(plan.output_dir);

  std::vector<Job> jobs;
  int point_index = 0;
  for (int u : plan.sweep_u) {
    for (double q : plan.sweep_q) {
      for (double beta : plan.sweep_beta) {
        for (int i = 0; i < plan.instances_per_point; ++i) {
          Job job;
          job.config = plan.base;
          job.config.U = u;
          job.config.q = q;
          job.config.beta = beta;
          job.config.seed = derive_seed(plan.base.seed, u, q, beta, i);
          job.point_id = point_id_of(job.config);
          job.point_index = point_index;
          job.instance_index = i;
          jobs.push_back(std::move(job));
        }
        ++point_index;
      }
    }
  }

  PointOptions options;
  options.exact_node_budget = plan.exact_node_budget;
  options.uncertified = plan.uncertified;
  options.record_timing = plan.record_timing;
  options.dump_dir = plan.output_dir;

  std::vector<JobResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        results[i].runs = run_point(jobs[i].config, plan.algorithms, options);
      } catch (const std::exception& e) {
        results[i].failed = true;
        results[i].error = e.what();
      }
    }
  };
  const int n_workers = std::min(
      resolve_workers(workers), static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
  {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  // Results merge in job order, independent of completion order.
  std::ostringstream runs_csv;
  runs_csv << kRunsCsvHeader << "\n";
  std::ostringstream failures;
  int failure_count = 0;
  std::map<std::pair<int, std::string>, std::map<std::string, Welford>> agg;
  std::map<int, const Job*> point_job;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    point_job.emplace(jobs[i].point_index, &jobs[i]);
    if (results[i].failed) {
      ++failure_count;
      failures << jobs[i].point_id << ",seed=" << jobs[i].config.seed << ": " << results[i].error
               << "\n";
      continue;
    }
    for (const AlgorithmRun& run : results[i].runs) {
      runs_csv << csv_row(jobs[i], run) << "\n";
      auto& acc = agg[{jobs[i].point_index, run.algorithm}];
      acc["deployed"].add(run.metrics.deployed);
      acc["undeployable"].add(run.metrics.undeployable);
      acc["objective"].add(run.metrics.objective);
      acc["type1"].add(run.metrics.type1);
      acc["type2"].add(run.metrics.type2);
      acc["type3"].add(run.metrics.type3);
      acc["crosslink"].add(run.metrics.avg_crosslink_usage);
      acc["cloudlink"].add(run.metrics.avg_cloudlink_usage);
      acc["delay"].add(run.metrics.orch_delay_ms);
    }
  }

  std::ostringstream agg_csv;
  agg_csv << "point_id,algorithm,K,U,q,beta,reward_mode,instances,deployed_mean,deployed_std,"
             "undeployable_mean,objective_mean,objective_std,type1_mean,type2_mean,type3_mean,"
             "avg_crosslink_usage_mean,avg_cloudlink_usage_mean,orch_delay_ms_mean\n";
  for (const auto& [key, acc] : agg) {
    const Job& job = *point_job.at(key.first);
    agg_csv << job.point_id << ',' << key.second << ',' << job.config.K << ',' << job.config.U
            << ',' << fmt_double(job.config.q) << ',' << fmt_double(job.config.beta) << ','
            << reward_mode_name(job.config.reward_mode) << ',' << acc.at("deployed").n << ','
            << fmt_double(acc.at("deployed").mean()) << ','
            << fmt_double(acc.at("deployed").stddev()) << ','
            << fmt_double(acc.at("undeployable").mean()) << ','
            << fmt_double(acc.at("objective").mean()) << ','
            << fmt_double(acc.at("objective").stddev()) << ','
            << fmt_double(acc.at("type1").mean()) << ',' << fmt_double(acc.at("type2").mean())
            << ',' << fmt_double(acc.at("type3").mean()) << ','
            << fmt_double(acc.at("crosslink").mean()) << ','
            << fmt_double(acc.at("cloudlink").mean()) << ','
            << fmt_double(acc.at("delay").mean()) << "\n";
  }

  SweepResult out;
  out.failures = failure_count;
  out.runs_csv_path = (fs::path(plan.output_dir) / "runs.csv").string();
  out.aggregate_csv_path = (fs::path(plan.output_dir) / "aggregate.csv").string();
  write_file(out.runs_csv_path, runs_csv.str());
  write_file(out.aggregate_csv_path, agg_csv.str());
  if (failure_count > 0) {
    write_file((fs::path(plan.output_dir) / "failures.log").string(), failures.str());
  }
  return out;
}

}  // namespace fogplace
