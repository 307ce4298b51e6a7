#include "hysta/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace hysta {

namespace {

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

PlantState axpy(const PlantState& x, double h, const PlantState& d) {
    PlantState r;
    r.q = x.q + h * d.q;
    r.q_dot = x.q_dot + h * d.q_dot;
    r.P = x.P + h * d.P;
    r.nu = x.nu + h * d.nu;
    r.nu_dot = x.nu_dot + h * d.nu_dot;
    return r;
}

bool finite(const PlantState& x) {
    return std::isfinite(x.q) && std::isfinite(x.q_dot) && std::isfinite(x.P) &&
           std::isfinite(x.nu) && std::isfinite(x.nu_dot);
}

/// One RK4 step of the selected plant model under a held command U.
PlantState rk4_step(const PlantState& x, double U, double t, double h,
                    const ScenarioConfig& sc, const PlantParams& params) {
    const auto deriv = [&](const PlantState& y, double ts) -> PlantState {
        if (sc.plant_model == PlantModel::Linear) {
            LinearState lx{y.q, y.q_dot, y.P};
            LinearDisturbances ld;
            ld.F_L = sc.F_L.at(ts);
            ld.delta_3 = sc.delta_P.at(ts);
            const LinearState dx = linear_derivative(lx, U, params, ld);
            PlantState d;
            d.q = dx.x1;
            d.q_dot = dx.x2;
            d.P = dx.x3;
            return d;
        }
        PlantDisturbances pd;
        pd.F_L = sc.F_L.at(ts);
        pd.delta_P = sc.delta_P.at(ts);
        return nonlinear_derivative(y, U, params, pd, sc.valve_dynamics);
    };
    const PlantState k1 = deriv(x, t);
    const PlantState k2 = deriv(axpy(x, 0.5 * h, k1), t + 0.5 * h);
    const PlantState k3 = deriv(axpy(x, 0.5 * h, k2), t + 0.5 * h);
    const PlantState k4 = deriv(axpy(x, h, k3), t + h);
    PlantState out = x;
    out.q += h / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
    out.q_dot += h / 6.0 * (k1.q_dot + 2.0 * k2.q_dot + 2.0 * k3.q_dot + k4.q_dot);
    out.P += h / 6.0 * (k1.P + 2.0 * k2.P + 2.0 * k3.P + k4.P);
    out.nu += h / 6.0 * (k1.nu + 2.0 * k2.nu + 2.0 * k3.nu + k4.nu);
    out.nu_dot += h / 6.0 * (k1.nu_dot + 2.0 * k2.nu_dot + 2.0 * k3.nu_dot + k4.nu_dot);
    return out;
}

const char* controller_name(ControllerKind k) {
    switch (k) {
    case ControllerKind::Issta: return "issta";
    case ControllerKind::Vgsta: return "vgsta";
    case ControllerKind::RelayReach: return "relay";
    }
    return "?";
}

} // namespace

void ScenarioConfig::validate() const {
    if (!(dt_control > 0.0 && dt_plant > 0.0 && horizon > 0.0))
        throw std::invalid_argument("scenario: time steps and horizon must be > 0");
    if (dt_plant > dt_control)
        throw std::invalid_argument("scenario: dt_plant must not exceed dt_control");
    const double ratio = dt_control / dt_plant;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
        throw std::invalid_argument("scenario: dt_control must be an integer multiple of dt_plant");
    if (noise.enabled && !(noise.power >= 0.0 && noise.sample_time > 0.0))
        throw std::invalid_argument("scenario: noise power must be >= 0 and sample time > 0");
    if (plant_model == PlantModel::Linear && valve_dynamics)
        throw std::invalid_argument("scenario: the linear model has no valve dynamics");
}

SimTrace run(const ScenarioConfig& scenario, const PlantParams& params,
             const SurfaceDesign& design, const StaGains& gains,
             const ReferenceProfile& profile) {
    scenario.validate();
    params.validate();

    const std::size_t n_sub =
        static_cast<std::size_t>(std::llround(scenario.dt_control / scenario.dt_plant));
    const std::size_t n_steps =
        static_cast<std::size_t>(std::llround(scenario.horizon / scenario.dt_control));

    std::mt19937_64 rng(scenario.noise.seed);
    std::normal_distribution<double> gauss(
        0.0, std::sqrt(scenario.noise.power / scenario.noise.sample_time));

    IsstaController issta(params, design, gains, scenario.issta_options);
    VgstaController vgsta(scenario.vgsta_options);
    ControllerState relay_state;       // virtual-control integral of relay mode
    ControllerState actuation_state;   // prefilter memory shared by vgsta/relay

    SimTrace trace;
    trace.seed = scenario.noise.seed;
    trace.rng_name = "mt19937_64/normal";
    trace.controller = controller_name(scenario.controller);
    const auto reserve = [&](std::size_t n) {
        for (auto* col : {&trace.t, &trace.r, &trace.r_dot, &trace.q_meas,
                          &trace.q_true, &trace.qdot_true, &trace.P_meas,
                          &trace.P_true, &trace.e1, &trace.s, &trace.u,
                          &trace.u_tilde, &trace.g, &trace.noise_q,
                          &trace.noise_P, &trace.v_integral, &trace.w_integral})
            col->reserve(n);
    };
    reserve(n_steps);

    PlantState x = scenario.initial_state;

    for (std::size_t k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * scenario.dt_control;
        double n_q = 0.0, n_P = 0.0;
        if (scenario.noise.enabled && scenario.noise.on_q)
            n_q = scenario.noise.scale_q * gauss(rng);
        if (scenario.noise.enabled && scenario.noise.on_P)
            n_P = scenario.noise.scale_P * gauss(rng);
        const double q_meas = x.q + n_q;
        const double P_meas = x.P + n_P;
        const double r = profile.sample(t, 0);
        const double r_dot = profile.sample(t, 1);

        double u = 0.0, u_tilde = 0.0, g_cmd = 0.0, s = 0.0;
        double v_int = 0.0, w_int = 0.0;
        switch (scenario.controller) {
        case ControllerKind::Issta: {
            const IsstaController::Output o = issta.step(q_meas, P_meas, r, scenario.dt_control);
            u = o.u; u_tilde = o.u_tilde; g_cmd = o.g_cmd; s = o.s;
            v_int = o.v_integral; w_int = o.w_integral;
            break;
        }
        case ControllerKind::Vgsta: {
            // deliberately unfiltered: the white measurement noise dithers the
            // saturated high-gain law at the full control rate, and the
            // prefilter averages that dither into a smooth valve command;
            // low-pass filtering first would correlate the dither and let the
            // load pressure random-walk
            const VgstaController::Output o = vgsta.step(q_meas, r, scenario.dt_control);
            u = o.u;
            s = o.sigma_hat;
            // the vgsta run reuses the v/w columns for its observer and
            // integral states so the trace schema stays fixed
            v_int = o.xhat;
            w_int = vgsta.state().integral;
            // the valve can only realize [-1, 1]; saturate before the
            // prefilter so the lag memory cannot wind up to the raw
            // high-gain command. No dead-zone inverse here: the valve's
            // natural dead band absorbs the prefiltered sign dither of the
            // saturated law, which otherwise random-walks the load pressure
            u_tilde = std::clamp(u, -1.0, 1.0);
            g_cmd = scenario.vgsta_options.mu_c > 0.0
                        ? prefilter_step(u_tilde, scenario.vgsta_options.mu_c,
                                         scenario.dt_control, actuation_state)
                        : u_tilde;
            if (scenario.vgsta_options.deadzone_inverse)
                g_cmd = deadzone_inverse(g_cmd, scenario.vgsta_options.D_s);
            g_cmd = std::clamp(g_cmd, -1.0, 1.0);
            break;
        }
        case ControllerKind::RelayReach: {
            const ErrorCoordinates c =
                error_coordinates(q_meas, P_meas, r, params, design, relay_state);
            const double front = params.V_t / (4.0 * params.tau * params.E * params.C_q);
            const double eta_coeff =
                design.gamma2 - 4.0 * params.E * params.C_qp / params.V_t;
            u = -front * (scenario.relay_K_s * sgn(c.s) + design.gamma1 * c.e1 +
                          eta_coeff * c.eta);
            s = c.s;
            v_int = relay_state.v_integral;
            relay_state.v_integral +=
                (-design.gamma1 * c.e1 - design.gamma2 * c.eta) * scenario.dt_control;
            u_tilde = scenario.issta_options.deadzone_inverse
                          ? deadzone_inverse(u, scenario.issta_options.D_s)
                          : u;
            g_cmd = scenario.issta_options.prefilter
                        ? prefilter_step(u_tilde, scenario.issta_options.mu_c,
                                         scenario.dt_control, actuation_state)
                        : u_tilde;
            g_cmd = std::clamp(g_cmd, -1.0, 1.0);
            break;
        }
        }

        trace.t.push_back(t);
        trace.r.push_back(r);
        trace.r_dot.push_back(r_dot);
        trace.q_meas.push_back(q_meas);
        trace.q_true.push_back(x.q);
        trace.qdot_true.push_back(x.q_dot);
        trace.P_meas.push_back(P_meas);
        trace.P_true.push_back(x.P);
        trace.e1.push_back(x.q - r);
        trace.s.push_back(s);
        trace.u.push_back(u);
        trace.u_tilde.push_back(u_tilde);
        trace.g.push_back(g_cmd);
        trace.noise_q.push_back(n_q);
        trace.noise_P.push_back(n_P);
        trace.v_integral.push_back(v_int);
        trace.w_integral.push_back(w_int);

        const double U = scenario.plant_model == PlantModel::Linear ? u : g_cmd;
        for (std::size_t j = 0; j < n_sub; ++j) {
            const double ts = t + static_cast<double>(j) * scenario.dt_plant;
            try {
                x = rk4_step(x, U, ts, scenario.dt_plant, scenario, params);
            } catch (const std::domain_error& e) {
                throw SimulationBlowup(
                    std::string("simulation left the physical domain at t = ") +
                        std::to_string(ts) + ": " + e.what(),
                    ts);
            }
            // plastic end stops: the piston cannot leave the cylinder
            if (x.q < params.q_min) {
                x.q = params.q_min;
                if (x.q_dot < 0.0) x.q_dot = 0.0;
            } else if (x.q > params.q_min + params.stroke) {
                x.q = params.q_min + params.stroke;
                if (x.q_dot > 0.0) x.q_dot = 0.0;
            }
            if (!finite(x)) {
                char buf[128];
                std::snprintf(buf, sizeof(buf),
                              "simulation state became non-finite at t = %.6f s", ts);
                throw SimulationBlowup(buf, ts);
            }
        }
    }
    return trace;
}

ReducedStaTrace run_reduced_sta(double rho, double k1, double k2,
                                const std::function<double(double)>& delta_z,
                                double dt, double horizon, double s0, double z0) {
    if (!(dt > 0.0 && horizon > 0.0))
        throw std::invalid_argument("run_reduced_sta: dt and horizon must be > 0");
    const std::size_t n = static_cast<std::size_t>(std::llround(horizon / dt));
    ReducedStaTrace tr;
    tr.t.reserve(n + 1);
    tr.s.reserve(n + 1);
    tr.z.reserve(n + 1);
    tr.delta_z.reserve(n + 1);
    double s = s0, z = z0;
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double d = delta_z ? delta_z(t) : 0.0;
        tr.t.push_back(t);
        tr.s.push_back(s);
        tr.z.push_back(z);
        tr.delta_z.push_back(d);
        const double ds = -k1 * rho * std::sqrt(std::abs(s)) * sgn(s) + z;
        const double dz = -k2 * rho * rho * sgn(s) + d;
        s += ds * dt;
        z += dz * dt;
    }
    return tr;
}

} // namespace hysta
