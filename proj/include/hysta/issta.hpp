#pragma once

#include <Eigen/Dense>

#include "hysta/plant.hpp"
#include "hysta/synthesis.hpp"

namespace hysta {

/// Super-twisting gains with their Lyapunov certificate.
struct StaGains {
    double k1 = 1.1;
    double k2 = 2.028;
    double rho = 10.0;
    double L = 1.347;           ///< perturbation-derivative bound
    Eigen::Matrix2d M_k;        ///< solution of A_k^T M + M A_k = -I
    double lambda_max_Mk = 0.0;
};

/// Closed-form 2x2 Lyapunov solve for A_k = [[-k1, 1], [-k2, 0]] and strict
/// verification of the scaling condition rho > 2 L lambda_max(M_k).
/// Throws std::invalid_argument for a non-Hurwitz A_k or an insufficient rho.
/// require_threshold = false skips the rho check for sweep experiments that
/// deliberately run below the certified scaling.
StaGains design_sta_gains(double k1, double k2, double L, double rho,
                          bool require_threshold = true);

/// Mutable per-loop controller memory; zero-initialized at t = 0.
struct ControllerState {
    double v_integral = 0.0;  ///< integral of the virtual control v(e1, eta)
    double w_integral = 0.0;  ///< STA integral term (control-bracket units)
    double prefilter1 = 0.0;  ///< first lag section state
    double prefilter2 = 0.0;  ///< second lag section state
    double q_filt = 0.0;      ///< measurement low-pass state, position
    double P_filt = 0.0;      ///< measurement low-pass state, load pressure
    bool meas_init = false;   ///< filters latch onto the first sample
    double last_u = 0.0;
};

struct ErrorCoordinates {
    double e1 = 0.0;   ///< position error [m]
    double eta = 0.0;  ///< scaled load pressure tau*P
    double s = 0.0;    ///< sliding variable
};

/// Error coordinates from the two measured channels only; the sliding
/// variable uses the stored virtual-control integral. No velocity input
/// exists anywhere on this path.
ErrorCoordinates error_coordinates(double q, double P, double r,
                                   const PlantParams& params,
                                   const SurfaceDesign& design,
                                   const ControllerState& state);

/// One STA control update at the control rate: continuous control value plus
/// explicit-Euler advance of the virtual-control and STA integrals. The STA
/// integral freezes while the commanded value exceeds the +/-1 valve range.
double control_step(const ErrorCoordinates& coords, const SurfaceDesign& design,
                    const StaGains& gains, const PlantParams& params, double dt,
                    ControllerState& state);

/// Feed-forward dead-zone compensation; sign(0) = 0 so zero maps to zero.
double deadzone_inverse(double u, double D_s);

/// Critically damped second-order low-pass (two cascaded first-order lags,
/// exact zero-order-hold discretization, unity static gain).
double prefilter_step(double u_tilde, double mu_c, double dt,
                      ControllerState& state);

/// Implementation options mirroring the deployed control chain.
struct IsstaOptions {
    double D_s = 0.2;          ///< dead-zone inverse size
    double mu_c = 0.003;       ///< prefilter time constant [s]
    bool deadzone_inverse = true;
    bool prefilter = true;
    /// First-order low-pass on both measured channels before the control law
    /// (0 disables). A relay-type integral acting on a raw noisy sliding
    /// variable random-walks; a short measurement lag restores the sign
    /// information without touching the velocity-free structure. Kept well
    /// above the hydraulic mode so it does not add phase there.
    double meas_tau = 0.005;
};

/// Convenience wrapper tying the whole velocity-free control chain together
/// for the simulation engine: measurement in, valve command out.
class IsstaController {
public:
    IsstaController(const PlantParams& params, const SurfaceDesign& design,
                    const StaGains& gains, const IsstaOptions& options = {})
        : params_(params), design_(design), gains_(gains), options_(options) {}

    struct Output {
        double u;      ///< raw STA control value
        double u_tilde;///< after dead-zone compensation
        double g_cmd;  ///< valve command after prefilter, clamped to [-1, 1]
        double s;
        double e1;
        double eta;
        double v_integral;
        double w_integral;
    };

    // The entire input surface is (q, P, r): velocity-freedom is enforced by
    // this signature.
    Output step(double q_meas, double P_meas, double r, double dt);

    void reset() { state_ = ControllerState{}; }
    const ControllerState& state() const { return state_; }

private:
    PlantParams params_;
    SurfaceDesign design_;
    StaGains gains_;
    IsstaOptions options_;
    ControllerState state_;
};

} // namespace hysta
