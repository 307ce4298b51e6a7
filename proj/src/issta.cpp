#include "hysta/issta.hpp"

#include <algorithm>
#include <cmath>

namespace hysta {

namespace {
double sgn(double x) { return (x > 0.0) - (x < 0.0); }
double sqrt_signed(double s) { return std::sqrt(std::abs(s)) * sgn(s); }
} // namespace

StaGains design_sta_gains(double k1, double k2, double L, double rho,
                          bool require_threshold) {
    if (!(k1 > 0.0 && k2 > 0.0))
        throw std::invalid_argument("design_sta_gains: A_k Hurwitz requires k1 > 0 and k2 > 0");
    if (L < 0.0) throw std::invalid_argument("design_sta_gains: L must be >= 0");
    StaGains g;
    g.k1 = k1;
    g.k2 = k2;
    g.L = L;
    g.rho = rho;
    // A_k^T M + M A_k = -I expands to three scalar equations:
    //   -2 k1 a - 2 k2 b = -1,  a - k1 b - k2 c = 0,  2 b = -1
    const double b = -0.5;
    const double a = (1.0 + k2) / (2.0 * k1);
    const double c = (a + k1 / 2.0) / k2;
    g.M_k << a, b, b, c;
    const double mean = 0.5 * (a + c);
    const double disc = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    g.lambda_max_Mk = mean + disc;
    if (require_threshold && !(rho > 2.0 * L * g.lambda_max_Mk))
        throw std::invalid_argument("design_sta_gains: rho violates rho > 2*L*lambda_max(M_k)");
    return g;
}

ErrorCoordinates error_coordinates(double q, double P, double r,
                                   const PlantParams& params,
                                   const SurfaceDesign& design,
                                   const ControllerState& state) {
    ErrorCoordinates c;
    c.e1 = q - r;
    c.eta = params.tau * P;
    c.s = c.eta - state.v_integral + design.kappa * c.e1 + design.alpha * c.e1;
    return c;
}

double control_step(const ErrorCoordinates& coords, const SurfaceDesign& design,
                    const StaGains& gains, const PlantParams& params, double dt,
                    ControllerState& state) {
    if (!(dt > 0.0)) throw std::invalid_argument("control_step: dt must be > 0");
    const double front = params.V_t / (4.0 * params.tau * params.E * params.C_q);
    const double eta_coeff =
        design.gamma2 - 4.0 * params.E * params.C_qp / params.V_t;

    const double bracket = gains.k1 * gains.rho * sqrt_signed(coords.s) +
                           design.gamma1 * coords.e1 + eta_coeff * coords.eta +
                           state.w_integral;
    const double u = -front * bracket;

    // conditional anti-windup: while the command is outside the valve range,
    // hold the discontinuous integral only if it would drive the command
    // further into saturation (u depends on w through -front * w, so dw with
    // the opposite sign of u deepens the saturation)
    const bool deepens = std::abs(u) > 1.0 && sgn(coords.s) * sgn(u) <= 0.0;
    if (!deepens)
        state.w_integral += gains.k2 * gains.rho * gains.rho * sgn(coords.s) * dt;

    const double v = -design.gamma1 * coords.e1 - design.gamma2 * coords.eta;
    state.v_integral += v * dt;
    state.last_u = u;
    return u;
}

double deadzone_inverse(double u, double D_s) {
    if (D_s < 0.0) throw std::invalid_argument("deadzone_inverse: D_s must be >= 0");
    return 0.5 * D_s * sgn(u) + u;
}

double prefilter_step(double u_tilde, double mu_c, double dt,
                      ControllerState& state) {
    if (!(mu_c > 0.0 && dt > 0.0))
        throw std::invalid_argument("prefilter_step: mu_c and dt must be > 0");
    const double a = std::exp(-dt / mu_c);
    state.prefilter1 = a * state.prefilter1 + (1.0 - a) * u_tilde;
    state.prefilter2 = a * state.prefilter2 + (1.0 - a) * state.prefilter1;
    return state.prefilter2;
}

IsstaController::Output IsstaController::step(double q_meas, double P_meas,
                                              double r, double dt) {
    if (options_.meas_tau > 0.0) {
        if (!state_.meas_init) {
            state_.q_filt = q_meas;
            state_.P_filt = P_meas;
            state_.meas_init = true;
        }
        const double a = std::exp(-dt / options_.meas_tau);
        state_.q_filt = a * state_.q_filt + (1.0 - a) * q_meas;
        state_.P_filt = a * state_.P_filt + (1.0 - a) * P_meas;
        q_meas = state_.q_filt;
        P_meas = state_.P_filt;
    }
    const ErrorCoordinates coords =
        error_coordinates(q_meas, P_meas, r, params_, design_, state_);
    Output out{};
    out.e1 = coords.e1;
    out.eta = coords.eta;
    out.s = coords.s;
    out.v_integral = state_.v_integral;
    out.u = control_step(coords, design_, gains_, params_, dt, state_);
    out.w_integral = state_.w_integral;
    out.u_tilde =
        options_.deadzone_inverse ? deadzone_inverse(out.u, options_.D_s) : out.u;
    double g = options_.prefilter
                   ? prefilter_step(out.u_tilde, options_.mu_c, dt, state_)
                   : out.u_tilde;
    out.g_cmd = std::clamp(g, -1.0, 1.0);
    return out;
}

} // namespace hysta
