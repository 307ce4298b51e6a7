#include "hysta/vgsta.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hysta {

namespace {
double sgn(double x) { return (x > 0.0) - (x < 0.0); }
double pow_signed(double x, double p) { return std::pow(std::abs(x), p) * sgn(x); }
} // namespace

double reference_model_step(double r, double dt, VgstaState& state) {
    if (!(dt > 0.0)) throw std::invalid_argument("reference_model_step: dt must be > 0");
    const double wn = 25.0;
    const double ym_ddot = wn * wn * (r - state.ym) - 2.0 * wn * state.ym_dot;
    state.ym += state.ym_dot * dt;
    state.ym_dot += ym_ddot * dt;
    return state.ym;
}

void io_filters_step(double u, double q, double dt, VgstaState& state) {
    if (!(dt > 0.0)) throw std::invalid_argument("io_filters_step: dt must be > 0");
    const double p = 5.0;
    state.wu_a += (-p * state.wu_a + u) * dt;
    state.wu += (-p * state.wu + state.wu_a) * dt;
    state.wy_a += (-p * state.wy_a + q) * dt;
    state.wy += (-p * state.wy + state.wy_a) * dt;
}

NormObserverOutput norm_observer_step(double dt, VgstaState& state) {
    if (!(dt > 0.0)) throw std::invalid_argument("norm_observer_step: dt must be > 0");
    const double filter_norm = std::hypot(state.wu, state.wy);
    state.xhat += (-0.8 * state.xhat + 10.0 + 1.5 * filter_norm) * dt;
    NormObserverOutput out;
    out.xhat = state.xhat;
    // |u| enters through last_u_for_L, by default the valve-saturated value:
    // the raw high-gain value makes the discrete differentiator unstable
    // (its per-step corrections scale with L and feed back into u)
    out.L_vgst = 1.2 * std::abs(state.xhat) + 2.0 * std::abs(state.last_u_for_L) + 7.0;
    return out;
}

void vg_differentiator_step(double e1_meas, double L_vgst, double dt,
                            VgstaState& state) {
    if (!(dt > 0.0 && L_vgst > 0.0))
        throw std::invalid_argument("vg_differentiator_step: dt and L_vgst must be > 0");
    const double err = state.e1h - e1_meas;
    const double d1 = -3.0 * std::pow(L_vgst, 0.25) * pow_signed(err, 0.75) - 2.0 * err + state.e2h;
    const double d2 = -2.5 * std::pow(L_vgst, 1.0 / 3.0) * pow_signed(err, 2.0 / 3.0) - 3.0 * err + state.e3h;
    const double d3 = -1.5 * std::sqrt(L_vgst) * pow_signed(err, 0.5) - 2.0 * err + state.e4h;
    const double d4 = -1.1 * L_vgst * sgn(err) - err;
    state.e1h += d1 * dt;
    state.e2h += d2 * dt;
    state.e3h += d3 * dt;
    state.e4h += d4 * dt;
}

double vgsta_control_step(double e1_meas, double dt, VgstaState& state,
                          const VgstaControlConstants& constants,
                          bool anti_windup) {
    if (!(dt > 0.0)) throw std::invalid_argument("vgsta_control_step: dt must be > 0");
    const double sigma = state.e3h + 2.0 * 25.0 * state.e2h + 25.0 * 25.0 * e1_meas;
    const double phi1 = pow_signed(sigma, 0.5) + sigma;
    const double phi2 = 0.5 * sgn(sigma) + 1.5 * pow_signed(sigma, 0.5) + sigma;
    const double rho2 =
        10.0 * std::abs(state.e2h) + 5.0 * std::abs(e1_meas) + state.xhat + 1.0;
    const double ek = constants.eps_k;
    const double k1t = constants.delta_k + rho2 * rho2 / (4.0 * ek) + 2.0 * ek * rho2 +
                       ek + 2.0 * ek * (1.0 + 4.0 * ek * ek);
    const double k2t = 1.0 + 4.0 * ek * ek + 2.0 * ek * k1t;
    const double u = -k1t * phi1 - state.integral;
    if (!anti_windup || std::abs(u) <= 1.0) state.integral += k2t * phi2 * dt;
    return u;
}

VgstaController::Output VgstaController::step(double q_meas, double r, double dt) {
    if (options_.meas_tau > 0.0) {
        if (!state_.q_filt_init) {
            state_.q_filt = q_meas;
            state_.q_filt_init = true;
        }
        const double a = std::exp(-dt / options_.meas_tau);
        state_.q_filt = a * state_.q_filt + (1.0 - a) * q_meas;
        q_meas = state_.q_filt;
    }
    Output out{};
    out.ym = reference_model_step(r, dt, state_);
    out.e1 = q_meas - (options_.error_vs_reference_model ? state_.ym : r);

    const NormObserverOutput obs = norm_observer_step(dt, state_);
    out.xhat = obs.xhat;
    out.L_vgst = obs.L_vgst;

    vg_differentiator_step(out.e1, obs.L_vgst, dt, state_);
    // the input filter sees the input the plant actually receives (the valve
    // cannot realize more than +/-1); filtering the raw value would close a
    // multiplicative loop u -> w_u -> xhat -> rho2 -> k1~ -> u that diverges
    io_filters_step(state_.last_u_sat, q_meas, dt, state_);

    out.sigma_hat =
        state_.e3h + 2.0 * 25.0 * state_.e2h + 25.0 * 25.0 * out.e1;
    out.u = vgsta_control_step(out.e1, dt, state_, options_.constants,
                               options_.anti_windup);
    state_.last_u = out.u;
    state_.last_u_sat = std::clamp(out.u, -1.0, 1.0);
    state_.last_u_for_L = std::clamp(out.u, -options_.L_u_cap, options_.L_u_cap);
    return out;
}

} // namespace hysta
