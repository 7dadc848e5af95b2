#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "passnet/certificates.hpp"
#include "passnet/cli/spec_io.hpp"
#include "passnet/lti.hpp"
#include "passnet/sim.hpp"

namespace passnet::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int certificate_negative = 2;
inline constexpr int input_error = 3;
inline constexpr int numerical_failure = 4;
}  // namespace exit_code

struct CommandOptions {
  std::filesystem::path out_dir = "passnet_out";
  bool use_computed_indices = false;
  std::optional<std::uint64_t> seed;
  std::optional<double> t_final;
};

struct RunArtifacts {
  int exit_code = exit_code::ok;
  std::vector<std::filesystem::path> files;
  nlohmann::json report;  // JSON twin of the text report
  std::string text;       // plain structured text report
};

// Declared vs frequency-sweep index for one agent.
struct IndexComparison {
  std::size_t agent = 0;  // 0-based
  std::optional<double> declared;
  std::optional<lti::IfpEstimate> computed;
  // consistent | declared_exceeds_infimum | declared_conservative | declared_only | computed_only
  std::string flag;
};

// Declared and computed indices differing by more than this are flagged.
inline constexpr double index_flag_tolerance = 0.01;

std::vector<IndexComparison> compare_indices(const NetworkSpecDoc& doc);

// Indices used for certification plus where they came from.
struct IndexSelection {
  certificates::IndexVector indices;
  std::string source;  // "declared" or "computed"
  std::vector<IndexComparison> comparison;
};
IndexSelection select_indices(const NetworkSpecDoc& doc, bool use_computed);

// Fixed CSV formatting: 17 significant digits.
std::string format_number(double v);

RunArtifacts cmd_indices(const NetworkSpecDoc& doc, const CommandOptions& opts);
RunArtifacts cmd_certify(const NetworkSpecDoc& doc, const CommandOptions& opts);
RunArtifacts cmd_simulate(const NetworkSpecDoc& doc, const CommandOptions& opts);
// certify + simulate + combined summary; exit code follows the certificate.
RunArtifacts cmd_report(const NetworkSpecDoc& doc, const CommandOptions& opts);

// Parses argv, dispatches, and maps every outcome onto {0, 2, 3, 4}.
int run_cli(int argc, char** argv);

}  // namespace passnet::cli
