#pragma once

#include <optional>
#include <string>

#include "fogplace/model.hpp"
#include "fogplace/scenario.hpp"

namespace fogplace {

// JSON documents with sorted keys and shortest round-trip numbers, so the
// same in-memory object always produces the same bytes and write -> read is
// exact. Instance files carry regions[] (servers with capacity triples),
// links[] and apps[]; the generating configuration travels along when known.

struct LoadedInstance {
  Instance instance;
  std::optional<ScenarioConfig> generator;
};

std::string instance_to_json(const Instance& instance,
                             const ScenarioConfig* generator = nullptr);
LoadedInstance instance_from_json(const std::string& text);

std::string solution_to_json(const PlacementSolution& solution, const std::string& algorithm);
PlacementSolution solution_from_json(const std::string& text, std::string* algorithm = nullptr);

std::string config_to_json(const ScenarioConfig& config);
ScenarioConfig config_from_json(const std::string& text);

// Whole-file helpers.
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace fogplace
