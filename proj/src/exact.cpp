#include "fogplace/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "fogplace/util.hpp"

namespace fogplace {

namespace {

constexpr double kObjTol = 1e-9;

std::string res_tag(Resource r) {
  switch (r) {
    case Resource::Memory: return "mem";
    case Resource::Storage: return "stor";
    case Resource::Cpu: return "cpu";
  }
  return "?";
}

}  // namespace

std::string var_name(const ModelVar& v) {
  std::ostringstream os;
  os << "x_u" << v.app << "_k" << v.region << "_i" << v.server;
  return os.str();
}

ReducedModel build_model(const Topology& topology, const std::vector<Application>& apps,
                         const std::vector<std::vector<RequirementEntry>>& reqs) {
  ReducedModel model;
  model.num_apps = static_cast<int>(apps.size());

  // Variables in (app, region, server) ascending order.
  for (std::size_t ai = 0; ai < apps.size(); ++ai) {
    const Application& app = apps[ai];
    std::map<int, const RequirementEntry*> by_region;
    for (const RequirementEntry& e : reqs[ai]) {
      if (e.feasible) by_region[e.region] = &e;
    }
    for (const auto& [region, entry] : by_region) {
      for (const ServerUnit& s : topology.regions[region].servers) {
        ModelVar v;
        v.app = app.id;
        v.region = region;
        v.server = s.id();
        v.config = entry->config;
        v.bh = entry->req.bh;
        v.bl = entry->req.bl;
        v.reward = app.reward_for(region);
        model.vars.push_back(v);
      }
    }
  }

  const int n = static_cast<int>(model.vars.size());
  auto vars_where = [&](auto&& pred) {
    std::vector<int> out;
    for (int i = 0; i < n; ++i) {
      if (pred(model.vars[i])) out.push_back(i);
    }
    return out;
  };

  std::map<int, const Application*> app_by_id;
  for (const Application& a : apps) app_by_id[a.id] = &a;

  // Capacity rows: one per (region, server, resource).
  for (const Region& reg : topology.regions) {
    for (const ServerUnit& s : reg.servers) {
      for (Resource r : kAllResources) {
        LpRow row;
        row.name = "cap_" + res_tag(r) + "_k" + std::to_string(reg.id) + "_i" +
                   std::to_string(s.id());
        row.rhs = s.capacity()[r];
        for (int i : vars_where([&](const ModelVar& v) {
               return v.region == reg.id && v.server == s.id();
             })) {
          const double coeff = app_by_id.at(model.vars[i].app)->demand[r];
          if (coeff > 0) row.terms.push_back({i, coeff});
        }
        model.rows.push_back(std::move(row));
        ++model.counts.capacity;
      }
    }
  }

  // Cloud-link rows, one per fog region k: bl of k's apps placed at home,
  // bh of k's apps placed on the cloud, bl of neighbor apps hosted in k.
  for (int k = 1; k < topology.num_regions(); ++k) {
    LpRow row;
    row.name = "cloud_k" + std::to_string(k);
    row.rhs = topology.link_between(k, 0).capacity();
    for (int i = 0; i < n; ++i) {
      const ModelVar& v = model.vars[i];
      const int home = app_by_id.at(v.app)->home_region;
      double coeff = 0.0;
      if (home == k && v.region == k) coeff = v.bl;
      else if (home == k && v.region == 0) coeff = v.bh;
      else if (home != k && v.region == k && v.config == ConfigType::Type3) coeff = v.bl;
      if (coeff > 0) row.terms.push_back({i, coeff});
    }
    model.rows.push_back(std::move(row));
    ++model.counts.cloud_link;
  }

  // Crosslink rows.
  for (const Link& l : topology.links) {
    if (l.is_cloud_link()) continue;
    LpRow row;
    row.name = "cross_k" + std::to_string(l.a()) + "_k" + std::to_string(l.b());
    row.rhs = l.capacity();
    for (int i = 0; i < n; ++i) {
      const ModelVar& v = model.vars[i];
      if (v.config != ConfigType::Type3) continue;
      const int home = app_by_id.at(v.app)->home_region;
      const bool uses = (home == l.a() && v.region == l.b()) ||
                        (home == l.b() && v.region == l.a());
      if (uses && v.bh > 0) row.terms.push_back({i, v.bh});
    }
    model.rows.push_back(std::move(row));
    ++model.counts.crosslink;
  }

  // Uniqueness rows.
  for (const Application& a : apps) {
    LpRow row;
    row.name = "uniq_u" + std::to_string(a.id);
    row.rhs = 1.0;
    for (int i : vars_where([&](const ModelVar& v) { return v.app == a.id; })) {
      row.terms.push_back({i, 1.0});
    }
    model.rows.push_back(std::move(row));
    ++model.counts.uniqueness;
  }

  // Locality rows. Variables outside {home, neighbors, cloud} are never
  // created, so these rows carry no terms; they exist for the row count.
  for (const Application& a : apps) {
    LpRow row;
    row.name = "loc_u" + std::to_string(a.id);
    row.rhs = 0.0;
    model.rows.push_back(std::move(row));
    ++model.counts.locality;
  }

  return model;
}

// ---------------------------------------------------------------------------
// Branch and bound
// ---------------------------------------------------------------------------

namespace {

struct AppOptions {
  int app = -1;
  std::vector<int> vars;  // model variable indexes, ascending
  double best_reward = 0.0;
};

std::vector<AppOptions> group_by_app(const ReducedModel& model) {
  std::map<int, AppOptions> grouped;
  for (int i = 0; i < static_cast<int>(model.vars.size()); ++i) {
    const ModelVar& v = model.vars[i];
    AppOptions& g = grouped[v.app];
    g.app = v.app;
    g.vars.push_back(i);
    g.best_reward = std::max(g.best_reward, std::max(v.reward, 0.0));
  }
  std::vector<AppOptions> out;
  out.reserve(grouped.size());
  for (auto& [id, g] : grouped) out.push_back(std::move(g));
  return out;
}

struct BnbState {
  const ReducedModel& model;
  std::vector<AppOptions> apps;
  std::vector<double> suffix_bound;  // best achievable reward from app i on
  std::vector<double> row_used;
  std::vector<double> row_rhs;
  std::vector<std::vector<std::pair<int, double>>> var_terms;  // per var: (row, coeff)

  std::vector<int> choice;  // per app: 0 = unplaced, 1.. = option ordinal
  double objective = 0.0;
  int placed = 0;

  bool have_best = false;
  std::vector<int> best_choice;
  double best_objective = 0.0;
  int best_placed = 0;

  std::uint64_t nodes = 0;
  std::uint64_t node_limit = std::numeric_limits<std::uint64_t>::max();
  bool truncated = false;
  bool proved_optimal = false;
  bool all_rewards_positive = true;

  explicit BnbState(const ReducedModel& m) : model(m), apps(group_by_app(m)) {
    for (const ModelVar& v : m.vars) all_rewards_positive &= v.reward > 0;
    suffix_bound.assign(apps.size() + 1, 0.0);
    for (int i = static_cast<int>(apps.size()) - 1; i >= 0; --i) {
      suffix_bound[i] = suffix_bound[i + 1] + apps[i].best_reward;
    }
    var_terms.assign(model.vars.size(), {});
    row_used.assign(model.rows.size(), 0.0);
    row_rhs.reserve(model.rows.size());
    for (std::size_t r = 0; r < model.rows.size(); ++r) {
      row_rhs.push_back(model.rows[r].rhs);
      for (const auto& [vi, coeff] : model.rows[r].terms) {
        var_terms[vi].push_back({static_cast<int>(r), coeff});
      }
    }
    choice.assign(apps.size(), 0);
  }

  bool fits_var(int vi) const {
    for (const auto& [r, coeff] : var_terms[vi]) {
      if (row_used[r] + coeff > row_rhs[r] + kResidualTol) return false;
    }
    return true;
  }

  void push_var(int vi, double sign) {
    for (const auto& [r, coeff] : var_terms[vi]) row_used[r] += sign * coeff;
  }

  // Candidate improves on the incumbent: higher objective, or equal with
  // fewer placements, or equal again with a smaller assignment vector.
  bool improves() const {
    if (!have_best) return true;
    if (objective > best_objective + kObjTol) return true;
    if (objective < best_objective - kObjTol) return false;
    if (placed != best_placed) return placed < best_placed;
    return choice < best_choice;
  }

  void dfs(std::size_t depth) {
    if (truncated || proved_optimal) return;
    ++nodes;
    if (nodes > node_limit) {
      truncated = true;
      return;
    }
    if (depth == apps.size()) {
      if (improves()) {
        have_best = true;
        best_choice = choice;
        best_objective = objective;
        best_placed = placed;
        // With strictly positive rewards, matching the global bound forces
        // every app onto a max-reward option, and depth-first order makes
        // this the tie-preferred solution: the search is over.
        if (all_rewards_positive && best_objective >= suffix_bound[0] - kObjTol) {
          proved_optimal = true;
        }
      }
      return;
    }
    if (objective + suffix_bound[depth] < best_objective - kObjTol) return;

    const AppOptions& g = apps[depth];
    for (std::size_t o = 0; o < g.vars.size(); ++o) {
      const int vi = g.vars[o];
      if (!fits_var(vi)) continue;
      push_var(vi, +1.0);
      choice[depth] = static_cast<int>(o) + 1;
      objective += model.vars[vi].reward;
      ++placed;
      dfs(depth + 1);
      --placed;
      objective -= model.vars[vi].reward;
      choice[depth] = 0;
      push_var(vi, -1.0);
    }
    dfs(depth + 1);  // leave the app unplaced
  }
};

}  // namespace

ExactResult solve_exact(const ReducedModel& model, std::optional<std::uint64_t> node_limit) {
  BnbState state(model);
  if (node_limit) state.node_limit = *node_limit;
  state.dfs(0);

  ExactResult result;
  result.nodes = state.nodes;
  result.certified = !state.truncated;
  if (state.have_best) {
    double objective = 0.0;
    for (std::size_t d = 0; d < state.apps.size(); ++d) {
      if (state.best_choice[d] == 0) continue;
      const int vi = state.apps[d].vars[state.best_choice[d] - 1];
      result.chosen_vars.push_back(vi);
      objective += model.vars[vi].reward;
    }
    result.objective = objective;
  }

  if (model.has_placement_metadata) {
    std::set<int> placed_apps;
    for (int vi : result.chosen_vars) {
      const ModelVar& v = model.vars[vi];
      result.solution.assignments[v.app] = {v.region, v.server, v.config, v.bh, v.bl};
      placed_apps.insert(v.app);
    }
    result.solution.objective = result.objective;
    for (const AppOptions& g : state.apps) {
      if (!placed_apps.count(g.app)) result.solution.undeployable.insert(g.app);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Exhaustive oracle
// ---------------------------------------------------------------------------

namespace {

struct ExhaustiveOption {
  int region, server;
  ConfigType config;
  double bh, bl;
};

std::vector<std::vector<ExhaustiveOption>> exhaustive_options(
    const Topology& topology, const std::vector<Application>& apps) {
  std::vector<std::vector<ExhaustiveOption>> all;
  for (const Application& app : apps) {
    std::vector<ExhaustiveOption> opts;
    const std::vector<RequirementEntry> entries = all_requirements(app, topology);
    std::map<int, const RequirementEntry*> by_region;
    for (const RequirementEntry& e : entries) {
      if (e.feasible) by_region[e.region] = &e;
    }
    for (const auto& [region, e] : by_region) {
      for (const ServerUnit& s : topology.regions[region].servers) {
        opts.push_back({region, s.id(), e->config, e->req.bh, e->req.bl});
      }
    }
    all.push_back(std::move(opts));
  }
  return all;
}

std::uint64_t space_of(const std::vector<std::vector<ExhaustiveOption>>& options) {
  std::uint64_t space = 1;
  for (const auto& opts : options) {
    const std::uint64_t branch = opts.size() + 1;
    if (space > (std::uint64_t{1} << 63) / branch) return std::uint64_t{1} << 63;
    space *= branch;
  }
  return space;
}

struct ExhaustiveSearch {
  const Topology& topology;
  const std::vector<Application>& apps;
  const std::vector<std::vector<ExhaustiveOption>>& options;

  PlacementSolution current;
  bool have_best = false;
  PlacementSolution best;

  // Walks choices in lexicographic order (unplaced first), so on objective
  // ties the first solution found is the lexicographically smallest. A
  // partial placement that already violates a constraint can only get worse
  // by placing more, so its subtree is skipped.
  void dfs(std::size_t depth) {
    if (!audit_solution(topology, apps, current).clean()) return;
    if (depth == apps.size()) {
      if (!have_best || current.objective > best.objective + kObjTol) {
        have_best = true;
        best = current;
      }
      return;
    }
    dfs(depth + 1);  // unplaced
    const Application& app = apps[depth];
    for (const ExhaustiveOption& o : options[depth]) {
      current.assignments[app.id] = {o.region, o.server, o.config, o.bh, o.bl};
      current.objective += app.reward_for(o.region);
      dfs(depth + 1);
      current.objective -= app.reward_for(o.region);
      current.assignments.erase(app.id);
    }
  }
};

}  // namespace

std::uint64_t exhaustive_space(const Topology& topology, const std::vector<Application>& apps) {
  return space_of(exhaustive_options(topology, apps));
}

PlacementSolution solve_exhaustive(const Topology& topology, const std::vector<Application>& apps,
                                   std::uint64_t cap) {
  const auto options = exhaustive_options(topology, apps);
  const std::uint64_t space = space_of(options);
  if (space > cap) {
    throw SearchSpaceTooLarge("exhaustive search space " + std::to_string(space) +
                              " exceeds cap " + std::to_string(cap));
  }
  ExhaustiveSearch search{topology, apps, options, {}, false, {}};
  search.dfs(0);
  PlacementSolution result = search.have_best ? search.best : PlacementSolution{};
  // Objective recomputed in app order for a reproducible floating point sum.
  result.objective = 0.0;
  for (const Application& app : apps) {
    auto it = result.assignments.find(app.id);
    if (it != result.assignments.end()) {
      result.objective += app.reward_for(it->second.region);
    } else {
      result.undeployable.insert(app.id);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// LP text export / import
// ---------------------------------------------------------------------------

namespace {

void emit_wrapped(std::ostringstream& os, const std::vector<std::string>& tokens) {
  std::size_t col = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (col > 0 && col + tokens[i].size() + 1 > 180) {
      os << "\n  ";
      col = 2;
    } else if (col > 0) {
      os << ' ';
      ++col;
    }
    os << tokens[i];
    col += tokens[i].size();
  }
  os << '\n';
}

}  // namespace

std::string export_lp(const ReducedModel& model, const PlacementSolution* hints) {
  std::ostringstream os;
  os << "\\ fog placement reduced model\n";
  os << "\\ variables " << model.vars.size() << "\n";
  if (hints) {
    for (const auto& [app, asg] : hints->assignments) {
      ModelVar v;
      v.app = app;
      v.region = asg.region;
      v.server = asg.server;
      os << "\\ hint " << var_name(v) << " 1\n";
    }
  }

  os << "Maximize\n";
  {
    std::vector<std::string> tokens{"obj:"};
    bool first = true;
    for (const ModelVar& v : model.vars) {
      if (!first) tokens.push_back("+");
      first = false;
      tokens.push_back(fmt_double(v.reward));
      tokens.push_back(var_name(v));
    }
    emit_wrapped(os, tokens);
  }

  os << "Subject To\n";
  for (const LpRow& row : model.rows) {
    if (row.terms.empty()) continue;  // not expressible in the format
    std::vector<std::string> tokens{row.name + ":"};
    bool first = true;
    for (const auto& [vi, coeff] : row.terms) {
      if (!first) tokens.push_back("+");
      first = false;
      tokens.push_back(fmt_double(coeff));
      tokens.push_back(var_name(model.vars[vi]));
    }
    tokens.push_back("<=");
    tokens.push_back(fmt_double(row.rhs));
    emit_wrapped(os, tokens);
  }

  os << "Binary\n";
  for (const ModelVar& v : model.vars) os << "  " << var_name(v) << "\n";
  os << "End\n";
  return os.str();
}

namespace {

ModelVar parse_var_name(const std::string& name) {
  // x_u<app>_k<region>_i<server>
  ModelVar v;
  if (name.rfind("x_u", 0) != 0) throw StructuralError("bad variable name: " + name);
  const auto kpos = name.find("_k");
  const auto ipos = name.find("_i", kpos + 1);
  if (kpos == std::string::npos || ipos == std::string::npos) {
    throw StructuralError("bad variable name: " + name);
  }
  v.app = std::stoi(name.substr(3, kpos - 3));
  v.region = std::stoi(name.substr(kpos + 2, ipos - kpos - 2));
  v.server = std::stoi(name.substr(ipos + 2));
  return v;
}

std::vector<std::string> tokenize_section(const std::string& text, const std::string& begin,
                                          const std::vector<std::string>& enders) {
  std::istringstream is(text);
  std::string line;
  std::vector<std::string> tokens;
  bool in_section = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] == '\\') continue;  // comment
    std::istringstream ls(line);
    std::string word;
    std::vector<std::string> words;
    while (ls >> word) words.push_back(word);
    std::string joined;
    for (const auto& w : words) joined += (joined.empty() ? "" : " ") + w;
    if (joined == begin) {
      in_section = true;
      continue;
    }
    if (std::find(enders.begin(), enders.end(), joined) != enders.end()) {
      if (in_section) break;
      continue;
    }
    if (in_section) {
      for (const auto& w : words) tokens.push_back(w);
    }
  }
  return tokens;
}

}  // namespace

ReducedModel import_lp(const std::string& text) {
  ReducedModel model;
  model.has_placement_metadata = false;

  // Variables come from the Binary section; their order is the model order.
  std::map<std::string, int> index;
  for (const std::string& name : tokenize_section(text, "Binary", {"End"})) {
    ModelVar v = parse_var_name(name);
    index[name] = static_cast<int>(model.vars.size());
    model.vars.push_back(v);
  }

  // Objective: "obj: c x + c x ...".
  {
    auto tokens = tokenize_section(text, "Maximize", {"Subject To"});
    std::size_t i = 0;
    if (!tokens.empty() && tokens[0] == "obj:") i = 1;
    while (i < tokens.size()) {
      if (tokens[i] == "+") {
        ++i;
        continue;
      }
      if (i + 1 >= tokens.size()) throw StructuralError("truncated objective");
      const double coeff = parse_double(tokens[i]);
      model.vars.at(index.at(tokens[i + 1])).reward = coeff;
      i += 2;
    }
  }

  // Rows: "<name>: c x + c x ... <= rhs".
  {
    auto tokens = tokenize_section(text, "Subject To", {"Binary", "Bounds", "End"});
    std::size_t i = 0;
    while (i < tokens.size()) {
      if (tokens[i].empty() || tokens[i].back() != ':') {
        throw StructuralError("expected a row name, got '" + tokens[i] + "'");
      }
      LpRow row;
      row.name = tokens[i].substr(0, tokens[i].size() - 1);
      ++i;
      while (i < tokens.size() && tokens[i] != "<=") {
        if (tokens[i] == "+") {
          ++i;
          continue;
        }
        if (i + 1 >= tokens.size()) throw StructuralError("truncated row " + row.name);
        row.terms.push_back({index.at(tokens[i + 1]), parse_double(tokens[i])});
        i += 2;
      }
      if (i + 1 >= tokens.size()) throw StructuralError("row " + row.name + " lacks a bound");
      row.rhs = parse_double(tokens[i + 1]);
      i += 2;
      model.rows.push_back(std::move(row));
    }
  }

  std::set<int> apps;
  for (const ModelVar& v : model.vars) apps.insert(v.app);
  model.num_apps = static_cast<int>(apps.size());
  for (const LpRow& row : model.rows) {
    if (row.name.rfind("cap_", 0) == 0) ++model.counts.capacity;
    else if (row.name.rfind("cloud_", 0) == 0) ++model.counts.cloud_link;
    else if (row.name.rfind("cross_", 0) == 0) ++model.counts.crosslink;
    else if (row.name.rfind("uniq_", 0) == 0) ++model.counts.uniqueness;
    else if (row.name.rfind("loc_", 0) == 0) ++model.counts.locality;
  }
  return model;
}

bool same_model(const ReducedModel& a, const ReducedModel& b) {
  if (a.vars.size() != b.vars.size()) return false;
  for (std::size_t i = 0; i < a.vars.size(); ++i) {
    const ModelVar& x = a.vars[i];
    const ModelVar& y = b.vars[i];
    if (x.app != y.app || x.region != y.region || x.server != y.server || x.reward != y.reward) {
      return false;
    }
  }
  auto effective = [](const ReducedModel& m) {
    std::vector<const LpRow*> rows;
    for (const LpRow& r : m.rows) {
      if (!r.terms.empty()) rows.push_back(&r);
    }
    return rows;
  };
  const auto ra = effective(a);
  const auto rb = effective(b);
  if (ra.size() != rb.size()) return false;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    if (ra[i]->name != rb[i]->name || ra[i]->rhs != rb[i]->rhs || ra[i]->terms != rb[i]->terms) {
      return false;
    }
  }
  return true;
}

}  // namespace fogplace
