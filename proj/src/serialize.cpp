#include "fogplace/serialize.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fogplace {

using nlohmann::json;

namespace {

json to_json(const ResourceVector& v) {
  return json{{"memory", v.memory}, {"storage", v.storage}, {"cpu", v.cpu}};
}

ResourceVector resource_from(const json& j) {
  return {j.at("memory").get<double>(), j.at("storage").get<double>(), j.at("cpu").get<double>()};
}

json to_json(const Range& r) { return json::array({r.lo, r.hi}); }

Range range_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

// ---------------------------------------------------------------------------
// Scenario configuration
// ---------------------------------------------------------------------------

std::string config_to_json(const ScenarioConfig& c) {
  json j;
  j["K"] = c.K;
  j["U"] = c.U;
  j["q"] = c.q;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["link_bandwidth"] = c.link_bandwidth;
  json classes = json::array();
  for (const ServerClass& sc : c.server_classes) {
    classes.push_back({{"name", sc.name},
                       {"memory", sc.capacity.memory},
                       {"storage", sc.capacity.storage},
                       {"cpu", sc.capacity.cpu}});
  }
  j["server_classes"] = classes;
  j["demand_ranges"] = {{"cpu", to_json(c.demand_ranges.cpu)},
                        {"memory", to_json(c.demand_ranges.memory)},
                        {"storage", to_json(c.demand_ranges.storage)},
                        {"bl", to_json(c.demand_ranges.bl)},
                        {"bh", to_json(c.demand_ranges.bh)}};
  j["nominal_app"] = to_json(c.nominal_app);
  j["reward_mode"] = reward_mode_name(c.reward_mode);
  j["seed"] = c.seed;
  if (c.fog_region_count) j["fog_region_count"] = *c.fog_region_count;
  if (c.delay_mode) {
    j["delay_mode"] = true;
    j["delay_params"] = {{"link_delay", to_json(c.delay_params.link_delay)},
                         {"proc_delay", to_json(c.delay_params.proc_delay)},
                         {"output_rate", to_json(c.delay_params.output_rate)},
                         {"source_rate", to_json(c.delay_params.source_rate)},
                         {"data_high", to_json(c.delay_params.data_high)},
                         {"data_low", to_json(c.delay_params.data_low)}};
  }
  return j.dump(2) + "\n";
}

namespace {

ScenarioConfig config_from(const json& j) {
  ScenarioConfig c;
  if (j.contains("K")) c.K = j.at("K").get<int>();
  if (j.contains("U")) c.U = j.at("U").get<int>();
  if (j.contains("q")) c.q = j.at("q").get<double>();
  if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
  if (j.contains("beta")) c.beta = j.at("beta").get<double>();
  if (j.contains("link_bandwidth")) c.link_bandwidth = j.at("link_bandwidth").get<double>();
  if (j.contains("server_classes")) {
    c.server_classes.clear();
    for (const json& s : j.at("server_classes")) {
      c.server_classes.push_back({s.at("name").get<std::string>(),
                                  {s.at("memory").get<double>(), s.at("storage").get<double>(),
                                   s.at("cpu").get<double>()}});
    }
  }
  if (j.contains("demand_ranges")) {
    const json& d = j.at("demand_ranges");
    if (d.contains("cpu")) c.demand_ranges.cpu = range_from(d.at("cpu"));
    if (d.contains("memory")) c.demand_ranges.memory = range_from(d.at("memory"));
    if (d.contains("storage")) c.demand_ranges.storage = range_from(d.at("storage"));
    if (d.contains("bl")) c.demand_ranges.bl = range_from(d.at("bl"));
    if (d.contains("bh")) c.demand_ranges.bh = range_from(d.at("bh"));
  }
  if (j.contains("nominal_app")) c.nominal_app = resource_from(j.at("nominal_app"));
  if (j.contains("reward_mode")) {
    c.reward_mode = reward_mode_from_name(j.at("reward_mode").get<std::string>());
  }
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("fog_region_count")) c.fog_region_count = j.at("fog_region_count").get<int>();
  if (j.contains("delay_mode")) c.delay_mode = j.at("delay_mode").get<bool>();
  if (j.contains("delay_params")) {
    const json& d = j.at("delay_params");
    if (d.contains("link_delay")) c.delay_params.link_delay = range_from(d.at("link_delay"));
    if (d.contains("proc_delay")) c.delay_params.proc_delay = range_from(d.at("proc_delay"));
    if (d.contains("output_rate")) c.delay_params.output_rate = range_from(d.at("output_rate"));
    if (d.contains("source_rate")) c.delay_params.source_rate = range_from(d.at("source_rate"));
    if (d.contains("data_high")) c.delay_params.data_high = range_from(d.at("data_high"));
    if (d.contains("data_low")) c.delay_params.data_low = range_from(d.at("data_low"));
  }
  return c;
}

}  // namespace

ScenarioConfig config_from_json(const std::string& text) {
  return config_from(json::parse(text));
}

// ---------------------------------------------------------------------------
// Instance
// ---------------------------------------------------------------------------

std::string instance_to_json(const Instance& instance, const ScenarioConfig* generator) {
  json j;
  j["schema"] = "fog-instance-v1";
  json regions = json::array();
  for (const Region& r : instance.topology.regions) {
    json servers = json::array();
    for (const ServerUnit& s : r.servers) {
      servers.push_back({{"id", s.id()}, {"capacity", to_json(s.capacity())}});
    }
    regions.push_back({{"id", r.id}, {"servers", servers}});
  }
  j["regions"] = regions;
  json links = json::array();
  for (const Link& l : instance.topology.links) {
    links.push_back(
        {{"a", l.a()}, {"b", l.b()}, {"capacity", l.capacity()}, {"delay", l.delay()}});
  }
  j["links"] = links;
  json apps = json::array();
  for (const Application& a : instance.apps) {
    json app{{"id", a.id},
             {"home_region", a.home_region},
             {"demand", to_json(a.demand)},
             {"data_high", a.data_high},
             {"data_low", a.data_low},
             {"output_rate", a.output_rate},
             {"proc_delay", a.proc_delay},
             {"source_rate", a.source_rate},
             {"reward_default", a.reward_default}};
    if (a.fixed_bh) {
      app["fixed_bh"] = *a.fixed_bh;
      app["fixed_bl"] = *a.fixed_bl;
    }
    if (!a.rewards.empty()) {
      json rewards;
      for (const auto& [region, f] : a.rewards) rewards[std::to_string(region)] = f;
      app["rewards"] = rewards;
    }
    apps.push_back(app);
  }
  j["apps"] = apps;
  if (generator) j["generator"] = json::parse(config_to_json(*generator));
  return j.dump(2) + "\n";
}

LoadedInstance instance_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.value("schema", "") != "fog-instance-v1") {
    throw StructuralError("unknown instance schema");
  }
  LoadedInstance out;
  Topology& topo = out.instance.topology;
  for (const json& r : j.at("regions")) {
    Region region;
    region.id = r.at("id").get<int>();
    for (const json& s : r.at("servers")) {
      region.servers.emplace_back(s.at("id").get<int>(), region.id,
                                  resource_from(s.at("capacity")));
    }
    topo.regions.push_back(std::move(region));
  }
  for (const json& l : j.at("links")) {
    topo.links.emplace_back(l.at("a").get<int>(), l.at("b").get<int>(),
                            l.at("capacity").get<double>(), l.at("delay").get<double>());
  }
  topo.rebuild_index();
  for (const json& a : j.at("apps")) {
    Application app;
    app.id = a.at("id").get<int>();
    app.home_region = a.at("home_region").get<int>();
    app.demand = resource_from(a.at("demand"));
    app.data_high = a.at("data_high").get<double>();
    app.data_low = a.at("data_low").get<double>();
    app.output_rate = a.at("output_rate").get<double>();
    app.proc_delay = a.at("proc_delay").get<double>();
    app.source_rate = a.at("source_rate").get<double>();
    app.reward_default = a.at("reward_default").get<double>();
    if (a.contains("fixed_bh")) {
      app.fixed_bh = a.at("fixed_bh").get<double>();
      app.fixed_bl = a.at("fixed_bl").get<double>();
    }
    if (a.contains("rewards")) {
      for (auto it = a.at("rewards").begin(); it != a.at("rewards").end(); ++it) {
        app.rewards[std::stoi(it.key())] = it.value().get<double>();
      }
    }
    out.instance.apps.push_back(std::move(app));
  }
  if (j.contains("generator")) out.generator = config_from(j.at("generator"));
  out.instance.rebuild_home_apps();
  out.instance.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Solution
// ---------------------------------------------------------------------------

std::string solution_to_json(const PlacementSolution& solution, const std::string& algorithm) {
  json j;
  j["schema"] = "fog-solution-v1";
  j["algorithm"] = algorithm;
  json assignments = json::array();
  for (const auto& [app, asg] : solution.assignments) {
    assignments.push_back({{"app", app},
                           {"region", asg.region},
                           {"server", asg.server},
                           {"config", config_name(asg.config)},
                           {"bh", asg.bh},
                           {"bl", asg.bl}});
  }
  j["assignments"] = assignments;
  j["objective"] = solution.objective;
  j["undeployable"] = json(solution.undeployable);
  return j.dump(2) + "\n";
}

PlacementSolution solution_from_json(const std::string& text, std::string* algorithm) {
  const json j = json::parse(text);
  if (j.value("schema", "") != "fog-solution-v1") {
    throw StructuralError("unknown solution schema");
  }
  if (algorithm) *algorithm = j.value("algorithm", "");
  PlacementSolution s;
  for (const json& a : j.at("assignments")) {
    Assignment asg;
    asg.region = a.at("region").get<int>();
    asg.server = a.at("server").get<int>();
    asg.config = config_from_name(a.at("config").get<std::string>());
    asg.bh = a.at("bh").get<double>();
    asg.bl = a.at("bl").get<double>();
    s.assignments[a.at("app").get<int>()] = asg;
  }
  s.objective = j.at("objective").get<double>();
  for (const json& u : j.at("undeployable")) s.undeployable.insert(u.get<int>());
  return s;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("short write to " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace fogplace
