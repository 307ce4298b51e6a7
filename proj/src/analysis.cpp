#include "hysta/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hysta {

namespace {
double sgn(double x) { return (x > 0.0) - (x < 0.0); }
} // namespace

PerformanceReport performance_indices(const SimTrace& trace, double t_start,
                                      double t_end, double stroke) {
    if (!(stroke > 0.0))
        throw std::invalid_argument("performance_indices: stroke must be > 0");
    PerformanceReport rep;
    rep.t_start = t_start;
    rep.t_end = t_end;
    double sum_abs = 0.0, sum_sq = 0.0, max_abs = 0.0;
    std::vector<double> window_abs;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (trace.t[i] < t_start || trace.t[i] > t_end) continue;
        const double a = std::abs(trace.e1[i]);
        window_abs.push_back(a);
        sum_abs += a;
        sum_sq += a * a;
        max_abs = std::max(max_abs, a);
    }
    if (window_abs.empty())
        throw std::invalid_argument("performance_indices: window contains no samples");
    const double n = static_cast<double>(window_abs.size());
    rep.samples = window_abs.size();
    rep.M_e = max_abs;
    rep.mu_e = sum_abs / n;
    double var = 0.0;
    for (double a : window_abs) var += (a - rep.mu_e) * (a - rep.mu_e);
    rep.sigma_e = std::sqrt(var / n);
    rep.ISE = sum_sq;
    rep.steady_state_pct = 100.0 * rep.mu_e / stroke;
    return rep;
}

LyapunovReport lyapunov_check(const SimTrace& trace, const SurfaceDesign& design,
                              const PlantParams& params, double beta_M,
                              double theta_V) {
    if (trace.size() < 3)
        throw std::invalid_argument("lyapunov_check: trace too short");
    if (!(theta_V > 0.0 && theta_V < 1.0))
        throw std::invalid_argument("lyapunov_check: theta_V must lie in (0, 1)");

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(design.M);
    const double lam_max = es.eigenvalues().maxCoeff();
    const double scale = params.A / (params.tau * params.m);

    LyapunovReport rep;
    rep.ball_radius = design.mu_M > 0.0
                          ? 2.0 * lam_max * beta_M / (theta_V * design.mu_M)
                          : 0.0;

    const std::size_t n = trace.size();
    std::vector<double> V(n), norm_e(n);
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::Vector3d e;
        e(0) = trace.e1[i];
        e(1) = trace.qdot_true[i] - trace.r_dot[i];
        e(2) = scale * (trace.v_integral[i] - design.kappa * trace.e1[i] -
                        design.alpha * trace.e1[i]);
        V[i] = e.dot(design.M * e);
        norm_e[i] = e.norm();
    }
    rep.max_V = *std::max_element(V.begin(), V.end());
    rep.final_norm_e = norm_e.back();
    const double tol = 1e-9 * rep.max_V;
    // The sampled controller superimposes an O(dt) dither on V; the decrease
    // claim is about the trend, so the slope is taken over a short window
    // (~50 ms) rather than adjacent samples, and samples below the numerical
    // floor of the decay are not checked.
    const double dt = (trace.t.back() - trace.t.front()) / static_cast<double>(n - 1);
    const std::size_t W = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.05 / dt)));
    const double floor_V = 1e-4 * rep.max_V;

    bool floored = false;
    for (std::size_t i = W; i + W < n; ++i) {
        if (norm_e[i] < rep.ball_radius) continue;
        if (V[i] <= floor_V) floored = true; // latched: the decay has ended
        if (floored) continue;
        ++rep.samples_checked;
        const double dV = (V[i + W] - V[i - W]) / (trace.t[i + W] - trace.t[i - W]);
        if (dV > tol) {
            ++rep.violations;
            if (rep.violation_times.size() < 64) rep.violation_times.push_back(trace.t[i]);
        }
    }
    rep.fraction_ok =
        rep.samples_checked == 0
            ? 1.0
            : 1.0 - static_cast<double>(rep.violations) /
                        static_cast<double>(rep.samples_checked);
    return rep;
}

ReachabilityReport reachability_check(const SimTrace& trace, double K_s,
                                      double L3, double kappa, double C_e2,
                                      double band) {
    ReachabilityReport rep;
    rep.K_bar_s = K_s - L3 - kappa * C_e2;
    rep.band = band;
    if (!(rep.K_bar_s > 0.0))
        throw std::invalid_argument(
            "reachability_check: K_s - L3 - kappa*C_e2 must be > 0");
    if (trace.size() < 3)
        throw std::invalid_argument("reachability_check: trace too short");

    for (std::size_t i = 1; i + 1 < trace.size(); ++i) {
        const double s = trace.s[i];
        if (std::abs(s) <= band) continue;
        ++rep.samples_checked;
        const double ds = (trace.s[i + 1] - trace.s[i - 1]) /
                          (trace.t[i + 1] - trace.t[i - 1]);
        if (s * ds > -rep.K_bar_s * std::abs(s)) {
            ++rep.violations;
            if (rep.violation_times.size() < 64) rep.violation_times.push_back(trace.t[i]);
        }
    }
    rep.fraction_ok =
        rep.samples_checked == 0
            ? 1.0
            : 1.0 - static_cast<double>(rep.violations) /
                        static_cast<double>(rep.samples_checked);
    return rep;
}

ChatterPrediction chatter_predict(double k1, double k2, double rho, double L,
                                  double T_s, double omega) {
    if (!(k1 > 0.0 && k2 > 0.0 && rho > 0.0 && L > 0.0 && T_s > 0.0 && omega > 0.0))
        throw std::invalid_argument("chatter_predict: all inputs must be > 0");
    constexpr double pi = std::numbers::pi;
    ChatterPrediction p;
    p.T_s = T_s;
    p.omega = omega;
    p.gamma_a = 2.0 * k1 * L * std::tgamma(1.25) / (std::sqrt(pi) * std::tgamma(1.75));
    p.a1 = 4.0 * k2 * L * L / (pi * omega);
    // positive root of (omega^2/T_s^2) a^2 + gamma_a^2 a - a1^2 = 0
    const double c2 = omega * omega / (T_s * T_s);
    const double g2 = p.gamma_a * p.gamma_a;
    p.a_y = (-g2 + std::sqrt(g2 * g2 + 4.0 * c2 * p.a1 * p.a1)) / (2.0 * c2);
    const double g4 = g2 * g2;
    const double inner =
        std::sqrt(1.0 + 64.0 * k2 * k2 * rho * rho /
                            (T_s * T_s * T_s * T_s * pi * pi * g4));
    p.phi_d = pi / 2.0 - std::atan(std::sqrt((inner - 1.0) / 2.0));
    return p;
}

std::vector<double> red_velocity(const std::vector<double>& q, double dt,
                                 const RedOptions& options) {
    if (!(dt > 0.0 && options.L > 0.0))
        throw std::invalid_argument("red_velocity: dt and L must be > 0");
    std::vector<double> out(q.size(), 0.0);
    if (q.empty()) return out;
    double z0 = q.front(), z1 = 0.0, z2 = 0.0;
    const double L = options.L;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double e0 = z0 - q[i];
        const double v0 =
            -options.lambda2 * std::cbrt(L) * std::pow(std::abs(e0), 2.0 / 3.0) * sgn(e0) + z1;
        const double e1 = z1 - v0;
        const double v1 =
            -options.lambda1 * std::sqrt(L) * std::sqrt(std::abs(e1)) * sgn(e1) + z2;
        const double e2 = z2 - v1;
        const double d2 = -options.lambda0 * L * sgn(e2);
        out[i] = z1;
        z0 += v0 * dt;
        z1 += v1 * dt;
        z2 += d2 * dt;
    }
    return out;
}

} // namespace hysta
