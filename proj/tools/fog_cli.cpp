#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fogplace/exact.hpp"
#include "fogplace/fpa.hpp"
#include "fogplace/harness.hpp"
#include "fogplace/serialize.hpp"
#include "json.hpp"

using namespace fogplace;

namespace {

LoadedInstance load(const std::string& path) { return instance_from_json(read_file(path)); }

nlohmann::json cdf_json(const EmpiricalCdf& cdf) {
  return cdf.points;
}

nlohmann::json metrics_json(const RunMetrics& m) {
  return nlohmann::json{{"deployed", m.deployed},
                        {"undeployable", m.undeployable},
                        {"objective", m.objective},
                        {"type1", m.type1},
                        {"type2", m.type2},
                        {"type3", m.type3},
                        {"avg_crosslink_usage", m.avg_crosslink_usage},
                        {"avg_cloudlink_usage", m.avg_cloudlink_usage},
                        {"cdf_memory", cdf_json(m.cdf_memory)},
                        {"cdf_storage", cdf_json(m.cdf_storage)},
                        {"cdf_cpu", cdf_json(m.cdf_cpu)},
                        {"orch_delay_ms", m.orch_delay_ms}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Placement toolkit for two-module fog applications"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a random instance from a config file");
  std::string gen_config, gen_out = "instance.json";
  std::optional<std::uint64_t> gen_seed;
  gen->add_option("--config", gen_config, "Scenario config JSON")->required();
  gen->add_option("--out", gen_out, "Instance output path");
  gen->add_option("--seed", gen_seed, "Override the config seed");

  // solve
  auto* solve = app.add_subcommand("solve", "Place a batch with fpa, fpa-r or exact");
  std::string solve_instance, solve_algorithm = "fpa", solve_out = "solution.json";
  std::string solve_metrics;
  std::uint64_t solve_seed = 0;
  std::uint64_t solve_budget = 200000;
  bool solve_uncertified = false;
  solve->add_option("--instance", solve_instance, "Instance JSON")->required();
  solve->add_option("--algorithm", solve_algorithm, "fpa | fpa-r | exact");
  solve->add_option("--out", solve_out, "Solution output path");
  solve->add_option("--metrics", solve_metrics, "Optional metrics JSON output path");
  solve->add_option("--seed", solve_seed, "Server-choice seed for fpa-r");
  solve->add_option("--node-budget", solve_budget, "Node limit for budgeted exact runs");
  solve->add_flag("--uncertified", solve_uncertified,
                  "Allow a budget-truncated exact run on large instances");

  // audit
  auto* audit = app.add_subcommand("audit", "Check a solution against every constraint");
  std::string audit_instance, audit_solution_path;
  bool audit_literal = false;
  audit->add_option("--instance", audit_instance, "Instance JSON")->required();
  audit->add_option("--solution", audit_solution_path, "Solution JSON")->required();
  audit->add_flag("--eq3-literal", audit_literal,
                  "Charge cloud-links with the literal neighbor summation");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run an experiment plan and write CSVs");
  std::string sweep_plan, sweep_out;
  int sweep_workers = 0;
  sweep->add_option("--plan", sweep_plan, "Experiment plan JSON")->required();
  sweep->add_option("--out-dir", sweep_out, "Override the plan's output directory");
  sweep->add_option("--workers", sweep_workers, "Worker threads (default FOG_SWEEP_WORKERS)");

  // export-lp
  auto* lp = app.add_subcommand("export-lp", "Write the reduced 0/1 model in LP format");
  std::string lp_instance, lp_out = "model.lp", lp_hints;
  lp->add_option("--instance", lp_instance, "Instance JSON")->required();
  lp->add_option("--out", lp_out, "LP output path");
  lp->add_option("--hints", lp_hints, "Solution JSON emitted as hint comments");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      ScenarioConfig config = config_from_json(read_file(gen_config));
      if (gen_seed) config.seed = *gen_seed;
      const Instance instance = gen_instance(config);
      write_file(gen_out, instance_to_json(instance, &config));
      std::cout << "wrote " << gen_out << " (" << instance.topology.num_regions() << " regions, "
                << instance.apps.size() << " apps)\n";
    } else if (*solve) {
      const LoadedInstance loaded = load(solve_instance);
      PointOptions options;
      options.exact_node_budget = solve_budget;
      options.uncertified = solve_uncertified;
      bool certified = true;
      const auto start = std::chrono::steady_clock::now();
      const PlacementSolution solution =
          run_algorithm(solve_algorithm, loaded.instance, solve_seed, options, &certified);
      const auto stop = std::chrono::steady_clock::now();
      const double ms =
          std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count() / 1e6;
      const AuditReport report =
          audit_solution(loaded.instance.topology, loaded.instance.apps, solution);
      write_file(solve_out, solution_to_json(solution, solve_algorithm));
      std::cout << solve_algorithm << ": deployed " << solution.deployed_count() << "/"
                << loaded.instance.apps.size() << ", objective " << solution.objective
                << (certified ? "" : " (not certified optimal)")
                << (report.clean() ? "" : " AUDIT VIOLATIONS") << "\n";
      if (!solve_metrics.empty()) {
        const DemandRanges ranges =
            loaded.generator ? loaded.generator->demand_ranges : DemandRanges{};
        nlohmann::json mj = metrics_json(
            compute_metrics(loaded.instance, solution, ranges, ms));
        mj["certified"] = certified;
        write_file(solve_metrics, mj.dump(2) + "\n");
      }
      if (!report.clean()) return 2;
    } else if (*audit) {
      const LoadedInstance loaded = load(audit_instance);
      const PlacementSolution solution = solution_from_json(read_file(audit_solution_path));
      AuditOptions options;
      options.literal_neighbor_index = audit_literal;
      const AuditReport report =
          audit_solution(loaded.instance.topology, loaded.instance.apps, solution, options);
      if (report.clean()) {
        std::cout << "clean: all constraints satisfied ("
                  << solution.deployed_count() << " deployed)\n";
      } else {
        for (const Violation& v : report.violations) {
          std::cout << family_name(v.family) << " | " << v.entity << " | slack " << v.slack
                    << " | " << v.detail << "\n";
        }
        return 1;
      }
    } else if (*sweep) {
      ExperimentPlan plan = plan_from_json(read_file(sweep_plan));
      if (!sweep_out.empty()) plan.output_dir = sweep_out;
      const SweepResult result = run_sweep(plan, sweep_workers);
      std::cout << "wrote " << result.runs_csv_path << " and " << result.aggregate_csv_path
                << "\n";
      if (result.failures > 0) {
        std::cout << result.failures << " point(s) failed; see failures.log\n";
        return 3;
      }
    } else if (*lp) {
      const LoadedInstance loaded = load(lp_instance);
      std::vector<std::vector<RequirementEntry>> reqs;
      for (const Application& a : loaded.instance.apps) {
        reqs.push_back(all_requirements(a, loaded.instance.topology));
      }
      const ReducedModel model =
          build_model(loaded.instance.topology, loaded.instance.apps, reqs);
      std::optional<PlacementSolution> hints;
      if (!lp_hints.empty()) hints = solution_from_json(read_file(lp_hints));
      write_file(lp_out, export_lp(model, hints ? &*hints : nullptr));
      std::cout << "wrote " << lp_out << " (" << model.vars.size() << " binaries, "
                << model.counts.total() << " rows)\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
