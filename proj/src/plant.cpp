#include "hysta/plant.hpp"

#include <cmath>

namespace hysta {

namespace {
// sign(0) = 0: the plant evaluator must be a deterministic function.
double sgn(double x) { return (x > 0.0) - (x < 0.0); }
} // namespace

void PlantParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw std::invalid_argument(std::string("PlantParams: ") + name + " must be > 0");
    };
    positive(m, "m");
    positive(sigma, "sigma");
    positive(A, "A");
    positive(E, "E");
    positive(V_t, "V_t");
    positive(K_f, "K_f");
    positive(P_S, "P_S");
    positive(vartheta, "vartheta");
    positive(chi, "chi");
    positive(omega_0, "omega_0");
    positive(tau, "tau");
    positive(stroke, "stroke");
    if (!(F_s > F_c) || F_c < 0.0)
        throw std::invalid_argument("PlantParams: need F_s > F_c >= 0");
    if (!(c_d >= 0.0 && c_d < c_s && c_s <= 1.0))
        throw std::invalid_argument("PlantParams: need 0 <= c_d < c_s <= 1");
    if (zeta_v < 0.0) throw std::invalid_argument("PlantParams: zeta_v must be >= 0");
    if (iota == 0.0) throw std::invalid_argument("PlantParams: iota must be nonzero");
    if (!(C_q > 0.0)) throw std::invalid_argument("PlantParams: C_q must be > 0");
    if (C_L < 0.0) throw std::invalid_argument("PlantParams: C_L must be >= 0");
    if (C_relief < 0.0)
        throw std::invalid_argument("PlantParams: C_relief must be >= 0");
    if (!(relief_frac > 0.0 && relief_frac <= 1.0))
        throw std::invalid_argument("PlantParams: need 0 < relief_frac <= 1");
}

double valve_opening(double nu, const PlantParams& params) {
    const double a = std::abs(nu);
    if (a >= params.c_s + params.c_d) return params.c_s * sgn(nu);
    if (a < params.c_d) return 0.0;
    return nu - params.c_d * sgn(nu);
}

double orifice_flow(double g, double P, const PlantParams& params) {
    if (std::abs(P) > params.P_S)
        throw std::domain_error("orifice_flow: |P| exceeds supply pressure (non-physical load pressure)");
    const double radicand = 0.5 * (params.P_S - sgn(g) * P);
    return g * params.K_f * std::sqrt(radicand);
}

double friction_force(double q_dot, const PlantParams& params) {
    const double stribeck =
        params.F_c + (params.F_s - params.F_c) *
                         std::exp(-std::pow(std::abs(q_dot), params.iota) *
                                  std::pow(params.chi, -params.iota));
    return std::tanh(params.vartheta * q_dot) * stribeck + params.sigma * q_dot;
}

PlantState nonlinear_derivative(const PlantState& state, double U,
                                const PlantParams& params,
                                const PlantDisturbances& dist,
                                bool valve_dynamics) {
    PlantState d;
    double spool = U;
    if (valve_dynamics) {
        spool = state.nu;
        d.nu = state.nu_dot;
        d.nu_dot = params.omega_0 * params.omega_0 * (U - state.nu) -
                   2.0 * params.zeta_v * params.omega_0 * state.nu_dot;
    }
    const double g = valve_opening(spool, params);
    const double Q = orifice_flow(g, state.P, params);

    d.q = state.q_dot;
    d.q_dot = (params.A * state.P - friction_force(state.q_dot, params) - dist.F_L) / params.m;
    // relief bypass flow, zero until |P| crosses the cracking pressure
    const double P_crack = params.relief_frac * params.P_S;
    const double Q_relief =
        params.C_relief * std::max(0.0, std::abs(state.P) - P_crack) * sgn(state.P);
    d.P = (4.0 * params.E / params.V_t) *
              (Q - params.A * state.q_dot - params.C_L * state.P - Q_relief) +
          dist.delta_P;
    return d;
}

LinearState linear_derivative(const LinearState& x, double u,
                              const PlantParams& params,
                              const LinearDisturbances& dist) {
    LinearState d;
    d.x1 = x.x2;
    d.x2 = (params.A * x.x3 - params.sigma * x.x2 - dist.F_L) / params.m +
           dist.delta_2;
    d.x3 = -(4.0 * params.E * params.A / params.V_t) * x.x2 -
           (4.0 * params.E * params.C_qp / params.V_t) * x.x3 +
           (4.0 * params.E * params.C_q / params.V_t) * u + dist.delta_3;
    return d;
}

LinearCoeffs linearize(const PlantParams& params, double g0, double P0) {
    if (std::abs(P0) >= params.P_S)
        throw std::domain_error("linearize: |P0| must be strictly below supply pressure");
    const double omega = std::sqrt(params.P_S - P0 * sgn(g0));
    LinearCoeffs c;
    c.C_q = params.K_f * omega / std::sqrt(2.0);
    // -dQ/dP at (g0, P0); zero opening carries no pressure sensitivity.
    c.C_qp = (g0 == 0.0) ? 0.0 : std::abs(g0) * params.K_f / (2.0 * std::sqrt(2.0) * omega);
    return c;
}

} // namespace hysta
