#pragma once

#include <vector>

#include "hysta/issta.hpp"
#include "hysta/sim.hpp"
#include "hysta/synthesis.hpp"

namespace hysta {

struct PerformanceReport {
    double M_e = 0.0;       ///< max |e1| over the window [m]
    double mu_e = 0.0;      ///< mean |e1| [m]
    double sigma_e = 0.0;   ///< standard deviation of |e1| [m]
    double ISE = 0.0;       ///< sum of squared errors over the window samples
    double steady_state_pct = 0.0; ///< 100 * mu_e / stroke
    double t_start = 0.0, t_end = 0.0;
    std::size_t samples = 0;
};

/// Tracking-error indices over [t_start, t_end]. Throws std::invalid_argument
/// when the window contains no samples.
PerformanceReport performance_indices(const SimTrace& trace, double t_start,
                                      double t_end, double stroke);

struct LyapunovReport {
    std::size_t samples_checked = 0;   ///< samples outside the ultimate-bound ball
    std::size_t violations = 0;        ///< V increasing outside the ball
    std::vector<double> violation_times;
    double ball_radius = 0.0;
    double max_V = 0.0;
    double final_norm_e = 0.0;
    double fraction_ok = 1.0;
    bool ok(double required_fraction = 0.99) const {
        return fraction_ok >= required_fraction;
    }
};

/// Evaluates V = e' M e along an IS-STA trace and checks the decrease
/// condition outside the ultimate-bound ball of radius
/// 2 lambda_max(M) beta_M / (theta_V mu(M)). e2 comes from the true velocity
/// minus the reference rate; e3 is reconstructed from the logged
/// virtual-control integral.
LyapunovReport lyapunov_check(const SimTrace& trace, const SurfaceDesign& design,
                              const PlantParams& params, double beta_M,
                              double theta_V = 0.5);

struct ReachabilityReport {
    double K_bar_s = 0.0;      ///< effective reaching gain K_s - L3 - kappa*C_e2
    std::size_t samples_checked = 0;
    std::size_t violations = 0;
    std::vector<double> violation_times;
    double band = 0.0;         ///< |s| band excluded around the surface
    double fraction_ok = 1.0;
};

/// Sample-wise s*ds/dt <= -K_bar_s |s| check on a relay-mode trace, outside a
/// band around s = 0. Throws std::invalid_argument when the precondition
/// K_bar_s > 0 fails.
ReachabilityReport reachability_check(const SimTrace& trace, double K_s,
                                      double L3, double kappa, double C_e2,
                                      double band);

struct ChatterPrediction {
    double gamma_a = 0.0;  ///< describing-function coefficient
    double a_y = 0.0;      ///< predicted oscillation amplitude
    double a1 = 0.0;       ///< forcing amplitude
    double phi_d = 0.0;    ///< phase deficit [rad]
    double omega = 0.0;    ///< analysis frequency [rad/s]
    double T_s = 0.0;      ///< parasitic loop time constant [s]
};

/// Describing-function chattering prediction:
///   gamma_a = 2 k1 L Gamma(1.25) / (sqrt(pi) Gamma(1.75)),
///   a1 = 4 k2 L^2 / (pi omega),
///   a_y = positive root of (omega^2/T_s^2) a^2 + gamma_a^2 a - a1^2 = 0,
///   phi_d = pi/2 - atan((1/sqrt2) sqrt(-1 + sqrt(1 + 64 k2^2 rho^2 /
///           (T_s^4 pi^2 gamma_a^4)))).
/// Throws std::invalid_argument on non-positive inputs.
ChatterPrediction chatter_predict(double k1, double k2, double rho, double L,
                                  double T_s, double omega);

struct RedOptions {
    double L = 5.0;        ///< Lipschitz bound on the second derivative
    double lambda0 = 1.1;
    double lambda1 = 1.5;
    double lambda2 = 2.0;
};

/// Second-order robust exact differentiator applied offline to a uniformly
/// sampled position column; returns the velocity estimate column. Used only
/// for reporting — never fed back into a controller.
std::vector<double> red_velocity(const std::vector<double>& q, double dt,
                                 const RedOptions& options = {});

} // namespace hysta
