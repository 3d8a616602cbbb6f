#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "resolvent/bath.hpp"
#include "resolvent/dressed.hpp"

namespace resolvent::cli {

/// Validated run configuration. Every key is checked before any computation.
struct RunConfig {
    std::string source;
    BathSpec bath{std::vector<double>{0.0}, {}};
    /// Energy unit label for output headers: "J" for builder baths, "E" otherwise.
    std::string energy_unit = "E";
    std::vector<EmitterSpec> emitters;
    double gap_factor = kDefaultGapFactor;
    std::optional<double> delta;
    double tolerance = 1e-9;
    std::vector<double> g_sweep;
    std::uint64_t seed = 7;
    std::string suite = "default";
    double corrupt_f = 0.0;
    int n_z = 20;
};

/// Parses a YAML or JSON run config. `base_dir` resolves relative `bath.file` paths.
/// Throws ParseError with the offending line.
RunConfig parse_run_config(std::string_view text, const std::string& source,
                           const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigError = 2 };

// Each command writes its files into `out_dir` and returns an exit code; config
// problems surface as exceptions that `run` maps to kConfigError.
int cmd_spectrum(const RunConfig& cfg, const std::filesystem::path& out_dir);
int cmd_bound_states(const RunConfig& cfg, const std::filesystem::path& out_dir);
int cmd_scattering(const RunConfig& cfg, const std::filesystem::path& out_dir);
int cmd_effective(const RunConfig& cfg, const std::filesystem::path& out_dir);
int cmd_compare(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// Full command line: `resolvent <subcommand> --config <path> [--out <dir>] [--delta x] [--tol x]`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace resolvent::cli
