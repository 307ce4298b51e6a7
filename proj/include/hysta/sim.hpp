#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hysta/issta.hpp"
#include "hysta/plant.hpp"
#include "hysta/trajectory.hpp"
#include "hysta/vgsta.hpp"

namespace hysta {

enum class PlantModel { Linear, Nonlinear };
enum class ControllerKind { Issta, Vgsta, RelayReach };

struct NoiseConfig {
    bool enabled = true;
    double power = 1e-9;        ///< band-limited white noise power
    double sample_time = 5e-6;  ///< nominal noise sample time [s]
    bool on_q = true;
    bool on_P = true;
    /// Optional per-channel scale factors applied to the drawn sequence, for
    /// studies that interpret the per-sample deviation in sensor display
    /// units instead of SI. Both default to 1 (deviation applied as-is).
    double scale_q = 1.0;
    double scale_P = 1.0;
    std::uint64_t seed = 1;
};

/// Piecewise-constant schedule: value of the last entry with t_start <= t.
struct Schedule {
    std::vector<std::pair<double, double>> steps; // (t_start, value)
    double at(double t) const {
        double v = 0.0;
        for (const auto& [t0, val] : steps)
            if (t >= t0) v = val;
        return v;
    }
};

struct ScenarioConfig {
    PlantModel plant_model = PlantModel::Nonlinear;
    bool valve_dynamics = true;
    ControllerKind controller = ControllerKind::Issta;
    double dt_control = 5e-4;  ///< 2 kHz control rate
    double dt_plant = 5e-5;
    double horizon = 14.0;
    NoiseConfig noise{};
    Schedule F_L{};
    Schedule delta_P{};
    PlantState initial_state{};
    IsstaOptions issta_options{};
    VgstaOptions vgsta_options{};
    double relay_K_s = 0.5;    ///< relay gain of the reachability scenario

    void validate() const;
};

struct SimTrace {
    std::vector<double> t, r, r_dot, q_meas, q_true, qdot_true, P_meas, P_true,
        e1, s, u, u_tilde, g, noise_q, noise_P, v_integral, w_integral;
    // run metadata
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string rng_name;
    std::string controller;
    std::size_t size() const { return t.size(); }
};

struct SimulationBlowup : std::runtime_error {
    SimulationBlowup(const std::string& what, double time)
        : std::runtime_error(what), t(time) {}
    double t;
};

/// Runs one closed-loop scenario: fixed-step RK4 plant integration at
/// dt_plant, controller executed at dt_control with zero-order hold,
/// Gaussian measurement noise held over each control interval. Reproducible
/// from the seed. Throws SimulationBlowup on a non-finite state.
SimTrace run(const ScenarioConfig& scenario, const PlantParams& params,
             const SurfaceDesign& design, const StaGains& gains,
             const ReferenceProfile& profile);

struct ReducedStaTrace {
    std::vector<double> t, s, z, delta_z;
};

/// Standalone reduced super-twisting dynamics for the finite-time
/// convergence checks: s' = -k1 rho |s|^{1/2} sign(s) + z,
/// z' = -k2 rho^2 sign(s) + delta_z(t), explicit Euler.
ReducedStaTrace run_reduced_sta(double rho, double k1, double k2,
                                const std::function<double(double)>& delta_z,
                                double dt, double horizon, double s0 = 1.0,
                                double z0 = 0.0);

} // namespace hysta
