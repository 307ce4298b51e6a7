#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

#include "hysta/plant.hpp"

namespace hysta {

struct SynthesisInput {
    PlantParams params;
    double Psi = 0.5;      ///< slope bound on the vanishing mechanical perturbation
    double h_slow = 1.0;   ///< slow strip edge magnitude: Re(lambda) <= -h_slow
    double h_fast = 5.0;   ///< fast strip edge magnitude: Re(lambda) >= -h_fast
    double theta = 0.0;    ///< cone half-angle [rad], |Im| <= tan(theta)|Re|
    double margin = 1e-8;  ///< strictness of the matrix inequality, relative to ||A_n||

    void validate() const;
};

/// Synthesized sliding-surface design with its feasibility certificate.
struct SurfaceDesign {
    Eigen::Matrix3d M;     ///< Lyapunov matrix, symmetric positive definite
    Eigen::Matrix3d Y;     ///< M^{-1}
    Eigen::RowVector3d K;  ///< state-feedback row (the paper's R)
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double kappa = 0.0;
    double alpha = 0.0;    ///< coupling constant 4*tau*E*A/V_t
    double mu_M = 0.0;     ///< decrease rate: lambda_min of the negated inequality LHS
    std::array<std::complex<double>, 3> closed_loop_eigs{};

    // region the design was certified against
    double h_slow = 0.0, h_fast = 0.0, theta = 0.0, Psi = 0.0;
};

struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};
struct ConditioningError : std::runtime_error {
    explicit ConditioningError(const std::string& what) : std::runtime_error(what) {}
};

struct SystemMatrices {
    Eigen::Matrix3d A_n;
    Eigen::Vector3d B;
    Eigen::Matrix3d H;
};

/// Nominal error-dynamics matrices: integrator chain with viscous damping,
/// input on the third state, perturbation slope entering the velocity row.
SystemMatrices build_matrices(const PlantParams& params, double Psi);

/// Fast strip edge from a desired first-order step response: T_h2 from the
/// 63.2% amplitude construction, h2 = 1/T_h2. Throws on a non-positive
/// radicand.
double assign_h2(double y_d, double y_bar2);

struct H1Assignment {
    double sigma_h;
    double h1;           ///< equals -1/T_h1
    bool slower_than_open_loop; ///< set when sigma_h came out negative
};

/// Slow strip edge from the critically damped virtual pressure loop.
H1Assignment assign_h1(const PlantParams& params, double T_h1);

/// Slope bound of the friction perturbation: the x2 -> 0 limit of
/// tanh(vartheta*x2)*[F_c + (F_s-F_c)exp(-(|x2|/chi)^iota)] / x2, normalized
/// by the mass like the model's velocity equation.
double bound_psi(const PlantParams& params);

/// Perturbation-derivative bound for the STA scaling condition.
double compute_L(double L3, double kappa, double q_ddot_bar);

/// Ultimate bound on ||e|| under a bounded unmatched perturbation.
double ultimate_bound(const Eigen::Matrix3d& M, double mu_M, double beta_M,
                      double theta_V = 0.5);

/// Solves the strip-and-cone region feasibility problem and recovers the
/// surface gains. Throws InfeasibleError (reporting the most violated
/// constraint) or ConditioningError (cond(Y) > 1e10).
SurfaceDesign solve_region_lmi(const SynthesisInput& input);

/// Region search per the design procedure: theta grows from 0 in pi/40 steps
/// until feasible, capped at pi/4.
SurfaceDesign solve_region_lmi_auto_theta(SynthesisInput input);

/// Independent post-hoc certificate: recomputes every check from scratch
/// (no solver state). Used by the synthesis exit check and the test suites.
struct Certificate {
    bool Y_positive_definite = false;
    bool inequality_strict = false; ///< lambda_max(LHS) <= -margin*||A_n||
    bool eigs_in_region = false;    ///< strip and cone, tolerance 1e-6
    double lambda_min_Y = 0.0;
    double lambda_max_lhs = 0.0;
    double mu_M = 0.0;
    bool ok() const { return Y_positive_definite && inequality_strict && eigs_in_region; }
};

Certificate certify(const SurfaceDesign& design, const SynthesisInput& input,
                    double region_tol = 1e-6);

/// Dense-matrix continuous Lyapunov solve A X + X A^T = Q via Kronecker
/// vectorization (fixed 3x3 problem size).
Eigen::Matrix3d lyapunov_solve(const Eigen::Matrix3d& A, const Eigen::Matrix3d& Q);

} // namespace hysta
