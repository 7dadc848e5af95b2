#include "passnet/cli/spec_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace passnet::cli {

namespace {

using nlohmann::json;

std::string at(const std::string& base, const std::string& key) { return base + "/" + key; }
std::string at(const std::string& base, std::size_t index) { return base + "/" + std::to_string(index); }

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(at(path, key), "missing required key");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  return v.get<double>();
}

long long integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
  return v.get<long long>();
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw SchemaError(path, "expected a nonempty array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(number(v[k], at(path, k)));
  return out;
}

lti::RationalTransfer parse_tf(const json& v, const std::string& path) {
  auto num = numbers(require(v, "num", path), at(path, "num"));
  auto den = numbers(require(v, "den", path), at(path, "den"));
  try {
    return lti::tf_new(std::move(num), std::move(den));
  } catch (const lti::LtiError& e) {
    throw SchemaError(path, e.what());
  }
}

coupling::SectorCoupling parse_coupling(const json& v, const std::string& path) {
  const auto& kind_v = require(v, "kind", path);
  if (!kind_v.is_string()) throw SchemaError(at(path, "kind"), "expected a string");
  const auto kind = kind_v.get<std::string>();
  const std::string params_path = at(path, "params");
  const auto& params = require(v, "params", path);
  const double lo = number(require(v, "alpha_lo", path), at(path, "alpha_lo"));
  const double hi = number(require(v, "alpha_hi", path), at(path, "alpha_hi"));

  coupling::CouplingKind parsed;
  if (kind == "linear_gain") {
    parsed = coupling::LinearGain{number(require(params, "a", params_path), at(params_path, "a"))};
  } else if (kind == "saturated_sine") {
    parsed = coupling::SaturatedSine{number(require(params, "a", params_path), at(params_path, "a"))};
  } else if (kind == "custom_table") {
    const std::string bp_path = at(params_path, "breakpoints");
    const auto& bp = require(params, "breakpoints", params_path);
    if (!bp.is_array() || bp.empty()) throw SchemaError(bp_path, "expected a nonempty array of [x, y] pairs");
    coupling::CustomTable table;
    for (std::size_t k = 0; k < bp.size(); ++k) {
      const auto& pt = bp[k];
      if (!pt.is_array() || pt.size() != 2) throw SchemaError(at(bp_path, k), "expected an [x, y] pair");
      table.breakpoints.emplace_back(number(pt[0], at(at(bp_path, k), 0)), number(pt[1], at(at(bp_path, k), 1)));
    }
    parsed = std::move(table);
  } else {
    throw SchemaError(at(path, "kind"), "unknown coupling kind '" + kind + "'");
  }
  try {
    return coupling::SectorCoupling(std::move(parsed), lo, hi);
  } catch (const coupling::CouplingError& e) {
    throw SchemaError(path, e.what());
  }
}

sim::SimConfig parse_sim(const json& v, std::size_t n) {
  const std::string path = "/sim";
  if (!v.is_object()) throw SchemaError(path, "expected an object");
  sim::SimConfig cfg;
  cfg.y0.assign(n, 0.0);
  if (v.contains("dt")) cfg.dt = number(v["dt"], at(path, "dt"));
  if (v.contains("t_final")) cfg.t_final = number(v["t_final"], at(path, "t_final"));
  if (v.contains("record_stride")) cfg.record_stride = static_cast<int>(integer(v["record_stride"], at(path, "record_stride")));
  if (v.contains("y0")) {
    cfg.y0 = numbers(v["y0"], at(path, "y0"));
    if (cfg.y0.size() != n) throw SchemaError(at(path, "y0"), "expected " + std::to_string(n) + " entries");
  }
  if (v.contains("noise")) {
    const std::string np = at(path, "noise");
    const auto& noise = v["noise"];
    const auto& kind = require(noise, "kind", np);
    if (kind == "none") {
      cfg.noise.kind = sim::NoiseKind::None;
    } else if (kind == "gaussian_zoh") {
      cfg.noise.kind = sim::NoiseKind::GaussianZoh;
    } else {
      throw SchemaError(at(np, "kind"), "expected 'none' or 'gaussian_zoh'");
    }
    if (noise.contains("amplitude")) cfg.noise.amplitude = number(noise["amplitude"], at(np, "amplitude"));
    if (noise.contains("seed")) {
      const auto seed = integer(noise["seed"], at(np, "seed"));
      if (seed < 0) throw SchemaError(at(np, "seed"), "seed must be non-negative");
      cfg.noise.seed = static_cast<std::uint64_t>(seed);
    }
  }
  try {
    cfg.validate(n);
  } catch (const InputError& e) {
    throw SchemaError(path, e.what());
  }
  return cfg;
}

}  // namespace

bool NetworkSpecDoc::simulatable() const {
  return std::all_of(agents.begin(), agents.end(), [](const AgentSpec& a) { return a.tf.has_value(); });
}

bool NetworkSpecDoc::has_declared_indices() const {
  return std::all_of(agents.begin(), agents.end(), [](const AgentSpec& a) { return a.ifp_index.has_value(); });
}

std::vector<lti::RationalTransfer> NetworkSpecDoc::transfer_functions() const {
  std::vector<lti::RationalTransfer> out;
  for (const auto& a : agents) {
    if (!a.tf) throw SchemaError("/agents/" + std::to_string(a.id - 1) + "/tf", "agent has no transfer function");
    out.push_back(*a.tf);
  }
  return out;
}

std::vector<double> NetworkSpecDoc::declared_indices() const {
  std::vector<double> out;
  for (const auto& a : agents) {
    if (!a.ifp_index)
      throw SchemaError("/agents/" + std::to_string(a.id - 1) + "/ifp_index", "agent has no declared index");
    out.push_back(*a.ifp_index);
  }
  return out;
}

NetworkSpecDoc parse_spec(const json& doc) {
  if (!doc.is_object()) throw SchemaError("", "document must be a JSON object");
  const auto n_ll = integer(require(doc, "nodes", ""), "/nodes");
  if (n_ll < 2) throw SchemaError("/nodes", "need at least 2 nodes");
  const auto n = static_cast<std::size_t>(n_ll);

  const auto& agents_v = require(doc, "agents", "");
  if (!agents_v.is_array()) throw SchemaError("/agents", "expected an array");
  std::vector<std::optional<AgentSpec>> slots(n);
  for (std::size_t k = 0; k < agents_v.size(); ++k) {
    const std::string path = at("/agents", k);
    const auto& a = agents_v[k];
    const auto id = integer(require(a, "id", path), at(path, "id"));
    if (id < 1 || static_cast<std::size_t>(id) > n)
      throw SchemaError(at(path, "id"), "id must lie in 1.." + std::to_string(n));
    if (slots[id - 1]) throw SchemaError(at(path, "id"), "duplicate agent id " + std::to_string(id));
    AgentSpec spec;
    spec.id = static_cast<int>(id);
    if (a.contains("tf")) spec.tf = parse_tf(a["tf"], at(path, "tf"));
    if (a.contains("ifp_index")) spec.ifp_index = number(a["ifp_index"], at(path, "ifp_index"));
    if (!spec.tf && !spec.ifp_index) throw SchemaError(path, "agent needs 'tf' or 'ifp_index'");
    slots[id - 1] = std::move(spec);
  }
  std::vector<AgentSpec> agents;
  for (std::size_t i = 0; i < n; ++i) {
    if (!slots[i]) throw SchemaError("/agents", "agent id " + std::to_string(i + 1) + " is missing");
    agents.push_back(std::move(*slots[i]));
  }

  const auto& edges_v = require(doc, "edges", "");
  if (!edges_v.is_array() || edges_v.empty()) throw SchemaError("/edges", "expected a nonempty array");
  std::vector<std::pair<int, int>> pairs;
  std::vector<coupling::SectorCoupling> couplings;
  for (std::size_t k = 0; k < edges_v.size(); ++k) {
    const std::string path = at("/edges", k);
    const auto& e = edges_v[k];
    pairs.emplace_back(static_cast<int>(integer(require(e, "i", path), at(path, "i"))),
                       static_cast<int>(integer(require(e, "j", path), at(path, "j"))));
    couplings.push_back(parse_coupling(require(e, "coupling", path), at(path, "coupling")));
  }
  auto g = [&] {
    try {
      return graph::Graph::from_edge_list(n, pairs);
    } catch (const graph::GraphError& e) {
      throw SchemaError(e.edge() ? at("/edges", *e.edge() - 1) : std::string("/edges"), e.what());
    }
  }();

  sim::SimConfig cfg;
  cfg.y0.assign(n, 0.0);
  const bool has_sim = doc.contains("sim");
  if (has_sim) cfg = parse_sim(doc["sim"], n);

  bool use_computed = false;
  if (doc.contains("certify")) {
    const auto& c = doc["certify"];
    if (!c.is_object()) throw SchemaError("/certify", "expected an object");
    if (c.contains("use_computed_indices")) {
      if (!c["use_computed_indices"].is_boolean())
        throw SchemaError("/certify/use_computed_indices", "expected a boolean");
      use_computed = c["use_computed_indices"].get<bool>();
    }
  }

  return NetworkSpecDoc{n,   std::move(agents), std::move(g), coupling::CouplingBank(std::move(couplings)),
                        cfg, has_sim,           use_computed};
}

NetworkSpecDoc load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open network spec '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_spec(doc);
}

}  // namespace passnet::cli
