#pragma once

#include "config.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace slung::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitSimulation = 3,
    kExitIo = 4,
};

/// Command-line values that replace config file entries.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> dt;
    std::optional<double> horizon;
    /// Also switches noise on.
    std::optional<double> snr;
    std::optional<int> runs;
    std::optional<std::string> out;
    std::optional<std::string> integrator;
    bool no_noise = false;
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "SLUNG_OUT_DIR";

/// Config file (or Nominal parameters for an empty path) with overrides applied and validated.
/// Output directory precedence: --out, then $SLUNG_OUT_DIR, then output.dir.
RunConfig resolve_config(const std::string& config_path, const Overrides& o);

int cmd_run(const std::string& config_path, const Overrides& o, std::ostream& out, std::ostream& err);
/// Noise is on unless --no-noise is given.
int cmd_montecarlo(const std::string& config_path, const Overrides& o, std::ostream& out, std::ostream& err);
int cmd_plots(const std::string& bundle, std::ostream& out, std::ostream& err);
/// Writes the nominal config to path, or to out when path is empty.
int cmd_default_config(const std::string& path, std::ostream& out, std::ostream& err);

} // namespace slung::cli
