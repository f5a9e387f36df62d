#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fogplace/model.hpp"
#include "fogplace/throughput.hpp"

namespace fogplace {

struct SearchSpaceTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One 0/1 placement variable: app u on server i of region k, with the fixed
// throughputs of the configuration that (u, k) implies.
struct ModelVar {
  int app = -1;
  int region = -1;
  int server = -1;
  ConfigType config = ConfigType::Type1;
  double bh = 0.0;
  double bl = 0.0;
  double reward = 0.0;
};

std::string var_name(const ModelVar& v);  // x_u<app>_k<region>_i<server>

// Row: sum of coeff * x over terms <= rhs.
struct LpRow {
  std::string name;
  std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
  double rhs = 0.0;
};

struct RowCounts {
  int capacity = 0;    // 3 per server (one per resource)
  int cloud_link = 0;  // one per fog region
  int crosslink = 0;   // one per fog-to-fog link
  int uniqueness = 0;  // one per app
  int locality = 0;    // one per app; vacuous because illegal variables are
                       // never created, kept for the dimensionality count
  int total() const { return capacity + cloud_link + crosslink + uniqueness + locality; }
};

// The reduced pure placement problem with throughputs fixed per (app,
// region). Row order: capacity (region, server, resource), cloud-link,
// crosslink, uniqueness, locality. Variables in (app, region, server) order.
struct ReducedModel {
  std::vector<ModelVar> vars;
  std::vector<LpRow> rows;  // vacuous locality rows have empty term lists
  RowCounts counts;
  int num_apps = 0;
  // False for models reconstructed from LP text, whose variables carry only
  // what the format encodes (triple, reward, row coefficients).
  bool has_placement_metadata = true;
};

// Builds the model from precomputed requirement entries (one vector per app,
// aligned with `apps`). Infeasible-deadline options produce no variables. A
// 0/1 assignment with at most one variable per app satisfies the rows iff
// the corresponding placement audits clean.
ReducedModel build_model(const Topology& topology, const std::vector<Application>& apps,
                         const std::vector<std::vector<RequirementEntry>>& reqs);

struct ExactResult {
  PlacementSolution solution;       // meaningful when placement metadata exists
  std::vector<int> chosen_vars;     // indexes into model.vars
  double objective = 0.0;
  bool certified = true;            // false when a node limit cut the search
  std::uint64_t nodes = 0;
};

// Depth-first branch and bound over the rows; the bound is the sum of each
// undecided app's best reward. Optimal (and certified) without a node limit;
// with one, best-found and flagged. Objective ties prefer fewer placed apps,
// then the lexicographically smallest assignment vector.
ExactResult solve_exact(const ReducedModel& model,
                        std::optional<std::uint64_t> node_limit = std::nullopt);

// Independent oracle: walks every per-app choice combination (unplaced
// first, then options in variable order), using only audit_solution for
// feasibility, and returns the maximum-objective feasible placement; ties
// keep the lexicographically first assignment vector. Refuses when the
// combination count prod(options_u + 1) exceeds `cap`.
PlacementSolution solve_exhaustive(const Topology& topology, const std::vector<Application>& apps,
                                   std::uint64_t cap = 10'000'000);

// Search-space size of the exhaustive walk (saturating at 2^63).
std::uint64_t exhaustive_space(const Topology& topology, const std::vector<Application>& apps);

// LP interchange text: Maximize / Subject To / Binary / End, deterministic
// order, shortest round-trip number formatting. Optional hints are emitted
// as comments. Vacuous rows are not representable in the format and are
// skipped.
std::string export_lp(const ReducedModel& model, const PlacementSolution* hints = nullptr);

// Parses text produced by export_lp back into a model (without placement
// metadata).
ReducedModel import_lp(const std::string& text);

// Equality over the LP-visible content: variable triples, rewards, and
// non-vacuous rows.
bool same_model(const ReducedModel& a, const ReducedModel& b);

}  // namespace fogplace
