#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "passnet/coupling.hpp"
#include "passnet/errors.hpp"
#include "passnet/graph.hpp"
#include "passnet/lti.hpp"
#include "passnet/sim.hpp"

namespace passnet::cli {

// Schema violation; `path()` is a JSON pointer into the offending document.
class SchemaError : public InputError {
 public:
  SchemaError(std::string path, const std::string& what)
      : InputError(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class IoError : public InputError {
 public:
  using InputError::InputError;
};

struct AgentSpec {
  int id = 0;
  std::optional<lti::RationalTransfer> tf;
  std::optional<double> ifp_index;
};

struct NetworkSpecDoc {
  std::size_t nodes = 0;
  std::vector<AgentSpec> agents;  // agents[i].id == i + 1
  graph::Graph graph;
  coupling::CouplingBank bank;
  sim::SimConfig sim;
  bool has_sim_block = false;
  bool use_computed_indices = false;

  bool simulatable() const;
  bool has_declared_indices() const;
  std::vector<lti::RationalTransfer> transfer_functions() const;
  std::vector<double> declared_indices() const;
};

NetworkSpecDoc parse_spec(const nlohmann::json& doc);
NetworkSpecDoc load_spec(const std::filesystem::path& path);

}  // namespace passnet::cli
