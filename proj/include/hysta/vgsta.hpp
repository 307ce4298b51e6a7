#pragma once

#include "hysta/plant.hpp"

namespace hysta {

/// Internal memory of the output-feedback variable-gain STA baseline.
struct VgstaState {
    // reference model (critically damped pair at -25)
    double ym = 0.0;
    double ym_dot = 0.0;
    // state-variable filters 1/(s+5)^2, cascaded first-order realizations
    double wu_a = 0.0, wu = 0.0;
    double wy_a = 0.0, wy = 0.0;
    // variable-gain differentiator estimates of e1 .. d^3 e1
    double e1h = 0.0, e2h = 0.0, e3h = 0.0, e4h = 0.0;
    // norm observer, started at its quiescent equilibrium 10/0.8
    double xhat = 12.5;
    // integral of k2~ * phi2
    double integral = 0.0;
    // position-measurement low-pass
    double q_filt = 0.0;
    bool q_filt_init = false;
    double last_u = 0.0;     ///< raw control value of the previous step
    double last_u_sat = 0.0; ///< previous value saturated to the valve range
    double last_u_for_L = 0.0; ///< previous value as seen by the gain L
};

/// One explicit-Euler step of y_m = 25^2/(s+25)^2 r; returns y_m.
double reference_model_step(double r, double dt, VgstaState& state);

/// One step of both input/output filters w_u = u/(s+5)^2, w_y = q/(s+5)^2.
void io_filters_step(double u, double q, double dt, VgstaState& state);

struct NormObserverOutput {
    double xhat;
    double L_vgst;
};

/// Norm observer driving the variable gains.
NormObserverOutput norm_observer_step(double dt, VgstaState& state);

/// Fourth-order variable-gain differentiator tracking e1 and its first three
/// derivatives.
void vg_differentiator_step(double e1_meas, double L_vgst, double dt,
                            VgstaState& state);

struct VgstaControlConstants {
    double delta_k = 0.01;
    double eps_k = 1e-3;
};

/// Variable-gain STA control value from the estimated surface
/// sigma = e3h + 2*25*e2h + 25^2*e1.
double vgsta_control_step(double e1_meas, double dt, VgstaState& state,
                          const VgstaControlConstants& constants = {},
                          bool anti_windup = true);

struct VgstaOptions {
    /// Track the reference-model output (model-reference configuration);
    /// false tracks the raw reference.
    bool error_vs_reference_model = true;
    bool anti_windup = true;
    VgstaControlConstants constants{};
    /// First-order low-pass on the measured position (0 disables). The law
    /// saturates on any realistic noise level, so the loop behaves as a
    /// dithered relay; this filter sets the dither amplitude seen by the
    /// relay and by the differentiator.
    double meas_tau = 0.01;
    /// Valve-command prefilter time constant used by the simulation loop for
    /// this controller: it averages the sign dither of the saturated law
    /// into a realizable duty cycle instead of letting uncorrelated +/-1
    /// pulses random-walk the load pressure.
    double mu_c = 0.01;
    /// Dead-zone compensation at the valve input, applied after the
    /// prefilter so the averaged duty cycle of the saturated law is mapped
    /// past the valve dead band (before the averaging it would be undone).
    /// Off by default: it does not measurably change the tracking error.
    bool deadzone_inverse = false;
    double D_s = 0.1;
    /// Saturation applied to the |u| term inside the differentiator gain
    /// L = 1.2|x_hat| + 2|u| + 7. With the raw high-gain value the discrete
    /// differentiator is unstable (the per-step corrections scale with L and
    /// feed back into u through the variable gains), so the default reflects
    /// the excitation the +/-1 valve can actually receive.
    double L_u_cap = 1.0;
};

/// Full baseline loop: reference model, differentiator, filters, norm
/// observer and the variable-gain STA law, stepped at the control rate.
class VgstaController {
public:
    explicit VgstaController(const VgstaOptions& options = {}) : options_(options) {}

    struct Output {
        double u;
        double e1;
        double sigma_hat;
        double ym;
        double xhat;
        double L_vgst;
    };

    Output step(double q_meas, double r, double dt);

    void reset() { state_ = VgstaState{}; }
    const VgstaState& state() const { return state_; }

private:
    VgstaOptions options_;
    VgstaState state_;
};

} // namespace hysta
