#include "passnet/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

namespace passnet::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json number_or_null(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

std::string text_or_none(std::optional<double> v) { return v ? format_number(*v) : std::string("none"); }

void write_file(const fs::path& path, const std::string& content, RunArtifacts& out) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  f << content;
  if (!f) throw IoError("failed writing '" + path.string() + "'");
  out.files.push_back(path);
}

void write_report(const fs::path& dir, const std::string& stem, RunArtifacts& out) {
  write_file(dir / (stem + ".txt"), out.text, out);
  write_file(dir / (stem + ".json"), out.report.dump(2) + "\n", out);
}

std::string join_csv(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += fields[i];
  }
  return line + '\n';
}

double max_abs_row(const linalg::Matrix& m, std::size_t r) {
  double best = 0.0;
  for (double v : m.row(r)) best = std::max(best, std::abs(v));
  return best;
}

std::size_t first_agent_without_tf(const NetworkSpecDoc& doc) {
  for (std::size_t i = 0; i < doc.agents.size(); ++i)
    if (!doc.agents[i].tf) return i;
  return doc.agents.size();
}

void require_transfer_functions(const NetworkSpecDoc& doc, const std::string& why) {
  const auto missing = first_agent_without_tf(doc);
  if (missing < doc.agents.size())
    throw SchemaError("/agents/" + std::to_string(missing) + "/tf",
                      "agent " + std::to_string(missing + 1) + " has no transfer function; " + why);
}

std::vector<IndexComparison> compare_indices_impl(const NetworkSpecDoc& doc, bool strict) {
  std::vector<IndexComparison> out;
  for (std::size_t i = 0; i < doc.agents.size(); ++i) {
    const auto& a = doc.agents[i];
    IndexComparison c;
    c.agent = i;
    c.declared = a.ifp_index;
    if (a.tf) {
      try {
        c.computed = lti::ifp_index_estimate(*a.tf);
      } catch (const lti::LtiError&) {
        if (strict) throw;
      }
    }
    if (c.declared && c.computed) {
      const double diff = *c.declared - c.computed->nu;
      if (std::abs(diff) <= index_flag_tolerance)
        c.flag = "consistent";
      else if (diff > 0)
        c.flag = "declared_exceeds_infimum";
      else
        c.flag = "declared_conservative";
    } else if (c.declared) {
      c.flag = "declared_only";
    } else if (c.computed) {
      c.flag = "computed_only";
    } else {
      c.flag = "unavailable";
    }
    out.push_back(std::move(c));
  }
  return out;
}

json indices_json(const std::vector<IndexComparison>& cmp, const std::vector<double>* used) {
  json rows = json::array();
  for (const auto& c : cmp) {
    json row{{"agent", c.agent + 1},
             {"declared", number_or_null(c.declared)},
             {"computed", c.computed ? json(c.computed->nu) : json(nullptr)},
             {"argmin_omega", c.computed ? json(c.computed->argmin_omega) : json(nullptr)},
             {"flag", c.flag}};
    if (used) row["used"] = (*used)[c.agent];
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::string> index_notes(const std::vector<IndexComparison>& cmp) {
  std::vector<std::string> notes;
  for (const auto& c : cmp) {
    if (c.flag == "declared_exceeds_infimum")
      notes.push_back("agent " + std::to_string(c.agent + 1) + ": declared index " + format_number(*c.declared) +
                      " exceeds inf Re H(jw) = " + format_number(c.computed->nu) +
                      "; an input-feedforward passivity index cannot exceed this infimum, so the declared value "
                      "is inconsistent with the transfer function");
    else if (c.flag == "declared_conservative")
      notes.push_back("agent " + std::to_string(c.agent + 1) + ": declared index " + format_number(*c.declared) +
                      " is below inf Re H(jw) = " + format_number(c.computed->nu) + " (conservative)");
  }
  return notes;
}

void append_index_table(std::ostringstream& os, const std::vector<IndexComparison>& cmp,
                        const std::vector<double>* used) {
  os << "agent,declared,computed,argmin_omega,flag" << (used ? ",used" : "") << '\n';
  for (const auto& c : cmp) {
    os << c.agent + 1 << ',' << text_or_none(c.declared) << ','
       << (c.computed ? format_number(c.computed->nu) : "none") << ','
       << (c.computed ? format_number(c.computed->argmin_omega) : "none") << ',' << c.flag;
    if (used) os << ',' << format_number((*used)[c.agent]);
    os << '\n';
  }
}

json edge_certificate_json(const graph::Graph& g, const coupling::CouplingBank& bank,
                           const certificates::EdgeCertificate& cert) {
  json edges = json::array();
  for (std::size_t k = 0; k < g.edge_count(); ++k)
    edges.push_back({{"edge", k + 1},
                     {"i", g.edge(k).pos + 1},
                     {"j", g.edge(k).neg + 1},
                     {"alpha_hi", bank[k].alpha_hi()},
                     {"margin", cert.margins[k]}});
  return {{"edges", edges},
          {"all_positive", cert.all_positive},
          {"min_margin", *std::min_element(cert.margins.begin(), cert.margins.end())},
          {"kappa", cert.kappa},
          {"rho", number_or_null(cert.rho)},
          {"sigma", number_or_null(cert.sigma)},
          {"alpha_lo_min", cert.alpha_lo_min},
          {"beta_bar", cert.beta_bar}};
}

void append_edge_certificate(std::ostringstream& os, const graph::Graph& g, const coupling::CouplingBank& bank,
                             const certificates::EdgeCertificate& cert) {
  os << "edge,i,j,alpha_hi,margin\n";
  for (std::size_t k = 0; k < g.edge_count(); ++k)
    os << k + 1 << ',' << g.edge(k).pos + 1 << ',' << g.edge(k).neg + 1 << ',' << format_number(bank[k].alpha_hi())
       << ',' << format_number(cert.margins[k]) << '\n';
  os << "all_positive: " << (cert.all_positive ? "true" : "false") << '\n'
     << "kappa: " << format_number(cert.kappa) << '\n'
     << "rho: " << text_or_none(cert.rho) << '\n'
     << "sigma: " << text_or_none(cert.sigma) << '\n'
     << "alpha_lo_min: " << format_number(cert.alpha_lo_min) << '\n'
     << "beta_bar: " << format_number(cert.beta_bar) << '\n';
}

std::vector<coupling::SectorCheck> verify_sectors(const NetworkSpecDoc& doc) {
  std::vector<coupling::SectorCheck> checks;
  for (std::size_t k = 0; k < doc.bank.size(); ++k) {
    const auto& c = doc.bank[k];
    auto check = coupling::sector_verify(c);
    if (!check.pass)
      throw SchemaError("/edges/" + std::to_string(k) + "/coupling",
                        "declared sector [" + format_number(c.alpha_lo()) + ", " + format_number(c.alpha_hi()) +
                            "] does not contain the sampled ratios [" + format_number(check.alpha_lo_observed) +
                            ", " + format_number(check.alpha_hi_observed) + "]" +
                            (check.odd ? "" : " or the map is not odd"));
    checks.push_back(check);
  }
  return checks;
}

std::optional<certificates::EdgeCertificate> try_certificate(const NetworkSpecDoc& doc, bool use_computed,
                                                             std::string& source) {
  try {
    const auto sel = select_indices(doc, use_computed);
    source = sel.source;
    return certificates::edge_certificate(doc.graph, sel.indices, doc.bank);
  } catch (const InputError&) {
    return std::nullopt;
  }
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<IndexComparison> compare_indices(const NetworkSpecDoc& doc) { return compare_indices_impl(doc, true); }

IndexSelection select_indices(const NetworkSpecDoc& doc, bool use_computed) {
  IndexSelection sel;
  const bool want_computed = use_computed || doc.use_computed_indices;
  if (want_computed || !doc.has_declared_indices()) {
    if (!want_computed && !doc.simulatable())
      throw SchemaError("/agents", "every agent needs either a declared 'ifp_index' or a 'tf'");
    require_transfer_functions(doc, "computed indices need one");
    sel.comparison = compare_indices_impl(doc, true);
    sel.source = "computed";
    for (const auto& c : sel.comparison) sel.indices.nu.push_back(c.computed->nu);
  } else {
    sel.comparison = compare_indices_impl(doc, false);
    sel.source = "declared";
    sel.indices.nu = doc.declared_indices();
  }
  return sel;
}

RunArtifacts cmd_indices(const NetworkSpecDoc& doc, const CommandOptions& opts) {
  require_transfer_functions(doc, "index estimation needs one");
  const auto cmp = compare_indices(doc);

  RunArtifacts out;
  std::string csv = join_csv({"agent", "nu", "argmin_omega", "grid_points", "refined", "declared_nu", "flag"});
  for (const auto& c : cmp)
    csv += join_csv({std::to_string(c.agent + 1), format_number(c.computed->nu),
                     format_number(c.computed->argmin_omega), std::to_string(c.computed->grid_points),
                     c.computed->refined ? "true" : "false", c.declared ? format_number(*c.declared) : "",
                     c.flag});
  write_file(opts.out_dir / "indices.csv", csv, out);

  const auto notes = index_notes(cmp);
  out.report = {{"command", "indices"},
                {"estimator", "infimum of Re H(jw) over a log grid on [1e-4, 1e4] rad/s (2048 points), "
                              "w -> 0+ probes and golden-section refinement"},
                {"indices", indices_json(cmp, nullptr)},
                {"notes", notes},
                {"exit_code", exit_code::ok}};
  std::ostringstream os;
  os << "passnet indices\n\n[indices]\n";
  append_index_table(os, cmp, nullptr);
  if (!notes.empty()) {
    os << "\n[notes]\n";
    for (const auto& n : notes) os << "- " << n << '\n';
  }
  out.text = os.str();
  write_report(opts.out_dir, "indices_report", out);
  return out;
}

RunArtifacts cmd_certify(const NetworkSpecDoc& doc, const CommandOptions& opts) {
  const auto sectors = verify_sectors(doc);
  const auto sel = select_indices(doc, opts.use_computed_indices);
  const auto report = certificates::certify(doc.graph, sel.indices, doc.bank);

  // The other index source, when available, is certified too and shown alongside.
  std::optional<std::pair<std::string, certificates::EdgeCertificate>> alternate;
  const bool have_computed =
      std::all_of(sel.comparison.begin(), sel.comparison.end(), [](const auto& c) { return c.computed.has_value(); });
  if (sel.source == "declared" && have_computed) {
    certificates::IndexVector v;
    for (const auto& c : sel.comparison) v.nu.push_back(c.computed->nu);
    alternate.emplace("computed", certificates::edge_certificate(doc.graph, v, doc.bank));
  } else if (sel.source == "computed" && doc.has_declared_indices()) {
    alternate.emplace("declared", certificates::edge_certificate(
                                      doc.graph, certificates::IndexVector{doc.declared_indices(), 0.0}, doc.bank));
  }

  RunArtifacts out;
  out.exit_code = report.edges.all_positive ? exit_code::ok : exit_code::certificate_negative;

  std::vector<std::string> notes = index_notes(sel.comparison);
  const bool has_sine = std::any_of(doc.bank.couplings().begin(), doc.bank.couplings().end(), [](const auto& c) {
    return std::holds_alternative<coupling::SaturatedSine>(c.kind());
  });
  if (has_sine)
    notes.push_back(
        "saturated_sine couplings: alpha_hi = a (slope at the origin and beyond |x| = pi/2); the tight lower bound "
        "is a*2/pi, the infimum of a*sin(x)/x approached as |x| -> pi/2");
  notes.push_back(
      "shortage verdict concerns the open loop D^T diag(H) D built from the agent indices alone; it does not "
      "predict closed-loop divergence");

  const auto& comp = report.compensation;
  json weights = json::array();
  for (std::size_t k = 0; k < comp.weights.size(); ++k)
    weights.push_back({{"agent", comp.agents[k] + 1}, {"weight", comp.weights[k]}});
  json sectors_json = json::array();
  for (std::size_t k = 0; k < sectors.size(); ++k)
    sectors_json.push_back({{"edge", k + 1},
                            {"kind", doc.bank[k].kind_name()},
                            {"alpha_lo", doc.bank[k].alpha_lo()},
                            {"alpha_hi", doc.bank[k].alpha_hi()},
                            {"observed_lo", sectors[k].alpha_lo_observed},
                            {"observed_hi", sectors[k].alpha_hi_observed},
                            {"odd", sectors[k].odd},
                            {"pass", sectors[k].pass}});

  out.report = {
      {"command", "certify"},
      {"index_source", sel.source},
      {"indices", indices_json(sel.comparison, &sel.indices.nu)},
      {"shortage",
       {{"negative_count", report.shortage.negative_count},
        {"compensation_possible", report.shortage.compensation_possible}}},
      {"open_loop_gram", {{"psd", report.open_loop.verdict}, {"min_eig", report.open_loop.min_eig}}},
      {"single_shortage_compensation",
       {{"feasible", comp.feasible},
        {"reason", certificates::to_string(comp.reason)},
        {"shortage_agent", comp.shortage_agent ? json(*comp.shortage_agent + 1) : json(nullptr)},
        {"demand", comp.shortage_agent ? number_or_null(comp.demand) : json(nullptr)},
        {"weights", weights}}},
      {"edge_certificate", edge_certificate_json(doc.graph, doc.bank, report.edges)},
      {"sectors", sectors_json},
      {"notes", notes},
      {"certified", report.edges.all_positive},
      {"exit_code", out.exit_code}};
  if (alternate) {
    auto alt = edge_certificate_json(doc.graph, doc.bank, alternate->second);
    alt["index_source"] = alternate->first;
    out.report["alternate_edge_certificate"] = alt;
  }

  std::ostringstream os;
  os << "passnet certificate report\n"
     << "index_source: " << sel.source << "\n\n[indices]\n";
  append_index_table(os, sel.comparison, &sel.indices.nu);
  os << "\n[shortage]\n"
     << "negative_count: " << report.shortage.negative_count << '\n'
     << "compensation_possible: " << (report.shortage.compensation_possible ? "true" : "false") << '\n'
     << "\n[open_loop_gram]\n"
     << "psd: " << (report.open_loop.verdict ? "true" : "false") << '\n'
     << "min_eig: " << format_number(report.open_loop.min_eig) << '\n'
     << "\n[single_shortage_compensation]\n"
     << "feasible: " << (comp.feasible ? "true" : "false") << '\n'
     << "reason: " << certificates::to_string(comp.reason) << '\n';
  if (comp.shortage_agent) os << "shortage_agent: " << *comp.shortage_agent + 1 << '\n';
  for (std::size_t k = 0; k < comp.weights.size(); ++k)
    os << "weight agent " << comp.agents[k] + 1 << ": " << format_number(comp.weights[k]) << '\n';
  os << "\n[edge_certificate]\n";
  append_edge_certificate(os, doc.graph, doc.bank, report.edges);
  if (alternate) {
    os << "\n[alternate_edge_certificate]\nindex_source: " << alternate->first << '\n';
    append_edge_certificate(os, doc.graph, doc.bank, alternate->second);
  }
  os << "\n[sectors]\nedge,kind,alpha_lo,alpha_hi,observed_lo,observed_hi,pass\n";
  for (std::size_t k = 0; k < sectors.size(); ++k)
    os << k + 1 << ',' << doc.bank[k].kind_name() << ',' << format_number(doc.bank[k].alpha_lo()) << ','
       << format_number(doc.bank[k].alpha_hi()) << ',' << format_number(sectors[k].alpha_lo_observed) << ','
       << format_number(sectors[k].alpha_hi_observed) << ',' << (sectors[k].pass ? "true" : "false") << '\n';
  os << "\n[notes]\n";
  for (const auto& n : notes) os << "- " << n << '\n';
  os << "\nverdict: " << (report.edges.all_positive ? "input-output consensus certified" : "not certified") << '\n';
  out.text = os.str();
  write_report(opts.out_dir, "certify_report", out);
  return out;
}

RunArtifacts cmd_simulate(const NetworkSpecDoc& doc, const CommandOptions& opts) {
  require_transfer_functions(doc, "simulation needs one");
  sim::SimConfig cfg = doc.sim;
  if (opts.seed) cfg.noise.seed = *opts.seed;
  if (opts.t_final) cfg.t_final = *opts.t_final;
  cfg.validate(doc.nodes);
  const auto tfs = doc.transfer_functions();
  const auto model = sim::assemble(doc.graph, tfs, doc.bank);

  RunArtifacts out;
  const json run_info{{"seed", cfg.noise.seed},
                      {"dt", cfg.dt},
                      {"t_final", cfg.t_final},
                      {"steps", cfg.steps()},
                      {"record_stride", cfg.record_stride},
                      {"noise",
                       {{"kind", cfg.noise.kind == sim::NoiseKind::None ? "none" : "gaussian_zoh"},
                        {"amplitude", cfg.noise.amplitude}}}};

  sim::SimulationResult res;
  try {
    res = sim::run(model, cfg);
  } catch (const NonFinite& e) {
    out.exit_code = exit_code::numerical_failure;
    out.report = {{"command", "simulate"},         {"run", run_info},
                  {"status", "failed"},            {"failure_time", e.time()},
                  {"error", e.what()},             {"exit_code", out.exit_code}};
    out.text = "passnet simulation report\nstatus: failed\nfailure_time: " + format_number(e.time()) +
               "\nerror: " + e.what() + "\n";
    write_report(opts.out_dir, "simulate_report", out);
    return out;
  }

  const std::size_t n = model.agent_count();
  const std::size_t p = model.edge_count();
  std::vector<std::string> header{"t"};
  for (const char* prefix : {"y_", "u_", "w_"})
    for (std::size_t i = 0; i < n; ++i) header.push_back(prefix + std::to_string(i + 1));
  for (std::size_t k = 0; k < p; ++k) header.push_back("dY_" + std::to_string(k + 1));
  std::string traj = join_csv(header);
  std::string metrics = join_csv({"T", "norm_DY", "norm_DW", "norm_V", "rho_hat"});
  for (std::size_t r = 0; r < res.t.size(); ++r) {
    std::vector<std::string> row{format_number(res.t[r])};
    for (const auto* m : {&res.y, &res.u, &res.w})
      for (double v : m->row(r)) row.push_back(format_number(v));
    for (double v : res.dy.row(r)) row.push_back(format_number(v));
    traj += join_csv(row);
    metrics += join_csv({format_number(res.t[r]), format_number(res.norm_dy[r]), format_number(res.norm_dw[r]),
                         format_number(res.norm_v[r]),
                         res.norm_dw[r] > 0.0 ? format_number(res.norm_dy[r] / res.norm_dw[r]) : ""});
  }
  write_file(opts.out_dir / "trajectory.csv", traj, out);
  write_file(opts.out_dir / "metrics.csv", metrics, out);

  std::string source;
  const auto cert = try_certificate(doc, opts.use_computed_indices, source);
  json consensus = nullptr;
  std::optional<sim::ConsensusMetrics> cm;
  if (cert && cert->rho) {
    cm = sim::consensus_metrics(res, *cert->rho);
    consensus = {{"index_source", source},
                 {"certificate_all_positive", cert->all_positive},
                 {"rho_cert", *cert->rho},
                 {"sigma_hat", number_or_null(cm->sigma_hat)},
                 {"bound_ok", cm->bound_ok}};
  }

  const double d0 = max_abs_row(res.dy, 0);
  const double d1 = max_abs_row(res.dy, res.t.size() - 1);
  const std::size_t last = res.t.size() - 1;
  out.report = {{"command", "simulate"},
                {"run", run_info},
                {"status", "ok"},
                {"records", res.t.size()},
                {"initial_dispersion", d0},
                {"final_dispersion", d1},
                {"dispersion_ratio", d0 > 0.0 ? json(d1 / d0) : json(nullptr)},
                {"norm_DY", res.norm_dy[last]},
                {"norm_DW", res.norm_dw[last]},
                {"norm_V", res.norm_v[last]},
                {"rho_hat", number_or_null(res.rho_hat)},
                {"coupling_energy",
                 {{"supply", res.coupling_supply},
                  {"sector_bound", res.coupling_bound},
                  {"holds", res.coupling_supply >= res.coupling_bound - 1e-6 * (1.0 + res.norm_v[last] * res.norm_v[last])}}},
                {"consensus", consensus},
                {"exit_code", out.exit_code}};

  std::ostringstream os;
  os << "passnet simulation report\nstatus: ok\n"
     << "seed: " << cfg.noise.seed << "\ndt: " << format_number(cfg.dt) << "\nt_final: " << format_number(cfg.t_final)
     << "\nnoise: " << (cfg.noise.kind == sim::NoiseKind::None ? "none" : "gaussian_zoh")
     << " amplitude " << format_number(cfg.noise.amplitude) << '\n'
     << "\n[dispersion]\nmax|D^T Y| at t=0: " << format_number(d0) << "\nmax|D^T Y| at t=T: " << format_number(d1)
     << "\n\n[truncated_norms]\nnorm_DY: " << format_number(res.norm_dy[last])
     << "\nnorm_DW: " << format_number(res.norm_dw[last]) << "\nnorm_V: " << format_number(res.norm_v[last])
     << "\nrho_hat: " << text_or_none(res.rho_hat) << "\n\n[consensus]\n";
  if (cm)
    os << "index_source: " << source << "\nrho_cert: " << format_number(*cert->rho)
       << "\nsigma_hat: " << format_number(cm->sigma_hat) << "\nbound_ok: " << (cm->bound_ok ? "true" : "false")
       << '\n';
  else
    os << "no certificate gain available; bound not evaluated\n";
  out.text = os.str();
  write_report(opts.out_dir, "simulate_report", out);
  return out;
}

RunArtifacts cmd_report(const NetworkSpecDoc& doc, const CommandOptions& opts) {
  auto certify = cmd_certify(doc, opts);
  auto simulate = cmd_simulate(doc, opts);
  RunArtifacts out;
  out.exit_code = simulate.exit_code == exit_code::numerical_failure ? simulate.exit_code : certify.exit_code;
  out.files = certify.files;
  out.files.insert(out.files.end(), simulate.files.begin(), simulate.files.end());
  out.report = {{"command", "report"},
                {"certify", certify.report},
                {"simulate", simulate.report},
                {"exit_code", out.exit_code}};
  out.text = certify.text + "\n" + simulate.text;
  write_report(opts.out_dir, "summary_report", out);
  return out;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Passivity certificates and simulation for diffusively coupled LTI networks", "passnet"};
  app.require_subcommand(1);

  std::string spec_path;
  CommandOptions opts;
  std::string out_dir;
  std::uint64_t seed = 0;
  double t_final = 0.0;

  auto* indices = app.add_subcommand("indices", "estimate per-agent passivity indices");
  auto* certify = app.add_subcommand("certify", "evaluate the passivity certificates");
  auto* simulate = app.add_subcommand("simulate", "simulate the closed loop");
  auto* report = app.add_subcommand("report", "certify + simulate + combined summary");
  for (auto* sub : {indices, certify, simulate, report}) {
    sub->add_option("spec", spec_path, "network-spec JSON document")->required();
    sub->add_option("--out", out_dir, "output directory (default: $PASSNET_OUT or ./passnet_out)");
  }
  for (auto* sub : {certify, simulate, report})
    sub->add_flag("--use-computed-indices", opts.use_computed_indices, "certify with frequency-sweep indices");
  for (auto* sub : {simulate, report}) {
    sub->add_option("--seed", seed, "noise seed override");
    sub->add_option("--t-final", t_final, "horizon override in seconds");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_code::ok : exit_code::input_error;
  }

  const CLI::App* active = app.get_subcommands().front();
  if (const auto* o = active->get_option_no_throw("--seed"); o && o->count()) opts.seed = seed;
  if (const auto* o = active->get_option_no_throw("--t-final"); o && o->count()) opts.t_final = t_final;
  if (!out_dir.empty())
    opts.out_dir = out_dir;
  else if (const char* env = std::getenv("PASSNET_OUT"); env && *env)
    opts.out_dir = env;

  try {
    const auto doc = load_spec(spec_path);
    RunArtifacts out;
    if (active == indices)
      out = cmd_indices(doc, opts);
    else if (active == certify)
      out = cmd_certify(doc, opts);
    else if (active == simulate)
      out = cmd_simulate(doc, opts);
    else
      out = cmd_report(doc, opts);
    std::cout << out.text;
    return out.exit_code;
  } catch (const InputError& e) {
    std::cerr << "passnet: input error: " << e.what() << '\n';
    return exit_code::input_error;
  } catch (const NumericalError& e) {
    std::cerr << "passnet: numerical failure: " << e.what() << '\n';
    return exit_code::numerical_failure;
  } catch (const std::exception& e) {
    std::cerr << "passnet: " << e.what() << '\n';
    return exit_code::numerical_failure;
  }
}

}  // namespace passnet::cli
