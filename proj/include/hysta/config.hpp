#pragma once

#include <string>

#include "hysta/issta.hpp"
#include "hysta/sim.hpp"
#include "hysta/synthesis.hpp"
#include "hysta/trajectory.hpp"

namespace hysta {

/// Reference profile selection; `build()` materializes the segment list.
struct ProfileSpec {
    std::string kind = "paper"; ///< paper | step | zero
    double ramp_target = 0.1;   ///< final ramp level of the paper profile
    double horizon = 14.0;
    double amplitude = 0.1;     ///< step profile amplitude
    double t_step = 1.0;        ///< step profile switch time

    ReferenceProfile build() const;
};

struct SynthesisSettings {
    double Psi = 0.5;
    double h_slow = 1.0;
    double h_fast = 5.0;
    double theta = 0.15707963267948966; ///< pi/20
    double margin = 1e-8;
    bool auto_theta = false;
    bool auto_psi = false; ///< derive Psi from the friction slope bound
};

struct StaConfig {
    double k1 = 1.1;
    double k2 = 2.028;
    double rho = 10.0;
    double L = 1.347;
};

/// Complete run description: everything a subcommand needs, round-trippable
/// through JSON with a canonical hash.
struct AppConfig {
    PlantParams plant{};
    SynthesisSettings synthesis{};
    StaConfig sta{};
    ScenarioConfig scenario{};
    ProfileSpec profile{};

    SynthesisInput synthesis_input() const;
};

/// Built-in presets: paper-nominal, paper-vgsta, step, stabilization.
/// Throws std::invalid_argument on an unknown name.
AppConfig preset(const std::string& name);

AppConfig load_config(const std::string& path);
void save_config(const AppConfig& config, const std::string& path);

std::string config_to_json(const AppConfig& config);
AppConfig config_from_json(const std::string& text);

/// FNV-1a 64-bit hash of the canonical (key-sorted) JSON serialization,
/// rendered as 16 hex digits.
std::string canonical_hash(const AppConfig& config);

/// Process exit codes shared by the CLI subcommands.
enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kInfeasible = 3,
    kBlowup = 4,
};

} // namespace hysta
