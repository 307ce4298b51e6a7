#include "hysta/synthesis.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace hysta {

void SynthesisInput::validate() const {
    params.validate();
    if (Psi < 0.0) throw std::invalid_argument("SynthesisInput: Psi must be >= 0");
    if (!(h_slow > 0.0 && h_fast > h_slow))
        throw std::invalid_argument("SynthesisInput: strip must satisfy 0 < h_slow < h_fast");
    if (!(theta >= 0.0 && theta < M_PI / 2.0))
        throw std::invalid_argument("SynthesisInput: theta must be in [0, pi/2)");
    if (!(margin > 0.0)) throw std::invalid_argument("SynthesisInput: margin must be > 0");
}

SystemMatrices build_matrices(const PlantParams& params, double /*Psi*/) {
    SystemMatrices m;
    m.A_n << 0.0, 1.0, 0.0,
             0.0, -params.sigma / params.m, 1.0,
             0.0, 0.0, 0.0;
    m.B << 0.0, 0.0, 1.0;
    m.H = Eigen::Matrix3d::Zero();
    m.H(1, 1) = 1.0;
    return m;
}

double assign_h2(double y_d, double y_bar2) {
    const double radicand = 0.632 * y_d * 0.632 * y_d - y_bar2 * y_bar2;
    if (!(radicand > 0.0))
        throw std::invalid_argument("assign_h2: need 0.632*y_d > y_bar2 >= 0");
    return 1.0 / std::sqrt(radicand);
}

H1Assignment assign_h1(const PlantParams& params, double T_h1) {
    if (!(T_h1 > 0.0)) throw std::invalid_argument("assign_h1: T_h1 must be > 0");
    H1Assignment a;
    a.sigma_h = 2.0 * params.m * params.tau / T_h1 - params.sigma * params.tau;
    a.h1 = -(params.sigma * params.tau + a.sigma_h) / (2.0 * params.tau * params.m);
    a.slower_than_open_loop = a.sigma_h < 0.0;
    return a;
}

double bound_psi(const PlantParams& params) {
    // tanh(vartheta*x)/x -> vartheta and the Stribeck bracket -> F_s as x -> 0
    return params.vartheta * params.F_s / params.m;
}

double compute_L(double L3, double kappa, double q_ddot_bar) {
    if (L3 < 0.0 || kappa < 0.0 || q_ddot_bar < 0.0)
        throw std::invalid_argument("compute_L: arguments must be >= 0");
    return L3 + kappa * q_ddot_bar;
}

double ultimate_bound(const Eigen::Matrix3d& M, double mu_M, double beta_M,
                      double theta_V) {
    if (!(mu_M > 0.0)) throw std::invalid_argument("ultimate_bound: mu_M must be > 0");
    if (!(theta_V > 0.0 && theta_V < 1.0))
        throw std::invalid_argument("ultimate_bound: theta_V must be in (0,1)");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (!(lmin > 0.0)) throw std::invalid_argument("ultimate_bound: M must be positive definite");
    return 2.0 * std::pow(lmax, 1.5) * beta_M / (theta_V * mu_M * std::sqrt(lmin));
}

Eigen::Matrix3d lyapunov_solve(const Eigen::Matrix3d& A, const Eigen::Matrix3d& Q) {
    // vec(A X + X A^T) = (I (x) A + A (x) I) vec(X)
    Eigen::Matrix<double, 9, 9> k = Eigen::Matrix<double, 9, 9>::Zero();
    const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 3; ++q)
                    k(3 * j + i, 3 * q + p) += I(j, q) * A(i, p) + A(j, q) * I(i, p);
    Eigen::Matrix<double, 9, 1> vq;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) vq(3 * j + i) = Q(i, j);
    Eigen::Matrix<double, 9, 1> vx = k.fullPivLu().solve(vq);
    Eigen::Matrix3d X;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) X(i, j) = vx(3 * j + i);
    return 0.5 * (X + X.transpose().eval());
}

namespace {

double lambda_max_sym(const Eigen::MatrixXd& S) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose().eval()));
    return es.eigenvalues().maxCoeff();
}

Eigen::Matrix3d eq21_lhs(const Eigen::Matrix3d& M, const SystemMatrices& sys,
                         const Eigen::RowVector3d& K, double Psi) {
    const Eigen::Matrix3d MBK = M * sys.B * K;
    return M * sys.A_n + sys.A_n.transpose() * M - MBK.transpose() - MBK +
           Psi * (sys.H.transpose() * M + M * sys.H);
}

bool eigs_in_region(const Eigen::Matrix3d& A_cl, double h_slow, double h_fast,
                    double theta, double tol,
                    std::array<std::complex<double>, 3>* out = nullptr) {
    Eigen::EigenSolver<Eigen::Matrix3d> es(A_cl);
    bool ok = true;
    for (int i = 0; i < 3; ++i) {
        const std::complex<double> lam = es.eigenvalues()(i);
        if (out) (*out)[std::size_t(i)] = lam;
        const double re = lam.real(), im = std::abs(lam.imag());
        if (re > -h_slow + tol || re < -h_fast - tol) ok = false;
        if (im > std::tan(theta) * std::abs(re) + tol) ok = false;
    }
    return ok;
}

// feedback row placing the char polynomial roots at p1,p2,p3 (Ackermann)
Eigen::RowVector3d place_poles(const SystemMatrices& sys, double p1, double p2,
                               double p3) {
    const Eigen::Matrix3d& A = sys.A_n;
    Eigen::Matrix3d ctrb;
    ctrb.col(0) = sys.B;
    ctrb.col(1) = A * sys.B;
    ctrb.col(2) = A * A * sys.B;
    // desired polynomial (s-p1)(s-p2)(s-p3) = s^3 + c2 s^2 + c1 s + c0
    const double c2 = -(p1 + p2 + p3);
    const double c1 = p1 * p2 + p1 * p3 + p2 * p3;
    const double c0 = -p1 * p2 * p3;
    const Eigen::Matrix3d pA =
        A * A * A + c2 * A * A + c1 * A + c0 * Eigen::Matrix3d::Identity();
    Eigen::RowVector3d e3;
    e3 << 0.0, 0.0, 1.0;
    return e3 * ctrb.fullPivLu().solve(pA);
}

struct RegionCheck {
    bool ok = false;
    double worst = 0.0;     // most positive lambda_max across the "< 0" blocks
    std::string worst_name;
};

// The three region inequalities, evaluated for a concrete (Y, K) pair.
RegionCheck check_region_lmis(const Eigen::Matrix3d& Y, const Eigen::Matrix3d& A_cl,
                              double h_slow, double h_fast, double theta) {
    const Eigen::Matrix3d Z = A_cl * Y;
    const Eigen::Matrix3d sym = Z + Z.transpose().eval();
    const double scale = Y.norm();
    RegionCheck r;
    r.ok = true;
    auto require_negative = [&](const Eigen::MatrixXd& S, const char* name) {
        const double lm = lambda_max_sym(S);
        if (lm > r.worst) { r.worst = lm; r.worst_name = name; }
        if (lm >= -1e-12 * scale) r.ok = false;
    };
    require_negative(sym + 2.0 * h_slow * Y, "strip (slow edge)");
    require_negative(-(sym + 2.0 * h_fast * Y), "strip (fast edge)");
    if (theta > 0.0) {
        Eigen::MatrixXd cone(6, 6);
        const Eigen::Matrix3d skew = Z - Z.transpose().eval();
        cone.topLeftCorner(3, 3) = std::sin(theta) * sym;
        cone.topRightCorner(3, 3) = std::cos(theta) * skew;
        cone.bottomLeftCorner(3, 3) = -std::cos(theta) * skew;
        cone.bottomRightCorner(3, 3) = std::sin(theta) * sym;
        require_negative(cone, "cone");
    } else {
        // theta = 0 collapses the cone onto the real axis; the eigenvalue
        // check is the meaningful test there.
        const Eigen::Matrix3d skew = Z - Z.transpose().eval();
        if (skew.norm() > 1e-9 * scale) {
            r.ok = false;
            if (r.worst_name.empty()) r.worst_name = "cone (theta = 0)";
        }
    }
    return r;
}

// Ellipsoid-method search for one Y satisfying all four matrix inequalities
// simultaneously. The free variables are the 6 entries of symmetric Y (or,
// with theta = 0, the 3 diagonal weights of Y = V D V^T, which keeps
// A_cl Y exactly symmetric so the degenerate cone holds). Every constraint
// is convex in the variables, so the central-cut ellipsoid method either
// finds a strictly feasible point or exhausts its budget. Deterministic.
bool find_common_Y(const Eigen::Matrix3d& A_cl, const Eigen::Matrix3d& A_psi,
                   double h_slow, double h_fast, double theta,
                   const Eigen::Matrix3d& V_real, Eigen::Matrix3d& Y_out) {
    const bool diag_mode = theta <= 0.0;
    const int n = diag_mode ? 3 : 6;
    constexpr double eps_pd = 1e-3; // conditioning floor on Y
    constexpr double eps_m = 1e-4;  // strictness of the "< 0" blocks

    const auto unpack = [&](const Eigen::VectorXd& y) -> Eigen::Matrix3d {
        if (diag_mode)
            return V_real * y.head<3>().asDiagonal() * V_real.transpose();
        Eigen::Matrix3d S;
        S << y(0), y(3), y(4),
             y(3), y(1), y(5),
             y(4), y(5), y(2);
        return S;
    };
    const auto constraint = [&](int i, const Eigen::VectorXd& y) -> double {
        const Eigen::Matrix3d Y = unpack(y);
        const Eigen::Matrix3d Z = A_cl * Y;
        const Eigen::Matrix3d sym = Z + Z.transpose().eval();
        switch (i) {
        case 0:
            return lambda_max_sym(eps_pd * Eigen::Matrix3d::Identity() - Y);
        case 1:
            return lambda_max_sym(sym + 2.0 * h_slow * Y) + eps_m;
        case 2:
            return lambda_max_sym(-(sym + 2.0 * h_fast * Y)) + eps_m;
        case 3: {
            if (theta <= 0.0) return -1.0; // handled by the parameterization
            const Eigen::Matrix3d skew = Z - Z.transpose().eval();
            Eigen::MatrixXd cone(6, 6);
            cone.topLeftCorner(3, 3) = std::sin(theta) * sym;
            cone.topRightCorner(3, 3) = std::cos(theta) * skew;
            cone.bottomLeftCorner(3, 3) = -std::cos(theta) * skew;
            cone.bottomRightCorner(3, 3) = std::sin(theta) * sym;
            return lambda_max_sym(cone) + eps_m;
        }
        case 4: {
            const Eigen::Matrix3d Zp = A_psi * Y;
            return lambda_max_sym(Zp + Zp.transpose().eval()) + eps_m;
        }
        default:
            return y.squaredNorm() - 100.0; // trust ball
        }
    };

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    if (diag_mode) x.setOnes();
    else x(0) = x(1) = x(2) = 1.0; // Y = I
    Eigen::MatrixXd P = 100.0 * Eigen::MatrixXd::Identity(n, n);

    const double nd = static_cast<double>(n);
    for (int k = 0; k < 20000; ++k) {
        int worst = -1;
        double wv = 0.0;
        for (int i = 0; i < 6; ++i) {
            const double v = constraint(i, x);
            if (v > wv) { wv = v; worst = i; }
        }
        if (worst < 0) {
            Y_out = unpack(x);
            return true;
        }
        Eigen::VectorXd g(n);
        const double f0 = constraint(worst, x);
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd xp = x;
            xp(i) += 1e-7;
            g(i) = (constraint(worst, xp) - f0) / 1e-7;
        }
        const double s = g.dot(P * g);
        if (!(s > 0.0)) return false;
        const Eigen::VectorXd Pg = P * g / std::sqrt(s);
        x -= Pg / (nd + 1.0);
        P = nd * nd / (nd * nd - 1.0) *
            (P - 2.0 / (nd + 1.0) * Pg * Pg.transpose());
        P = 0.5 * (P + P.transpose().eval());
    }
    return false;
}

} // namespace

SurfaceDesign solve_region_lmi(const SynthesisInput& input) {
    input.validate();
    const SystemMatrices sys = build_matrices(input.params, input.Psi);
    const double margin_abs = input.margin * sys.A_n.norm();
    const double band = input.h_fast - input.h_slow;

    // deterministic candidate pole triples as strip fractions; well-spread
    // placements lead, since clustered poles leave no room for a common Y
    // between the cone blocks and the robustness inequality
    static const double fractions[][3] = {
        {0.95, 0.65, 0.30},  {0.90, 0.625, 0.25},  {0.875, 0.55, 0.20},
        {0.875, 0.675, 0.1125}, {0.875, 0.55, 0.10}, {0.75, 0.425, 0.0625},
        {0.625, 0.30, 0.025},  {0.50, 0.30, 0.10},  {0.94, 0.82, 0.70},
        {0.80, 0.65, 0.50},    {0.60, 0.40, 0.20},  {0.30, 0.20, 0.10},
    };

    std::string worst_report = "no candidate evaluated";
    double worst_violation = std::numeric_limits<double>::infinity();

    for (const auto& f : fractions) {
        const double p1 = -(input.h_slow + f[0] * band);
        const double p2 = -(input.h_slow + f[1] * band);
        const double p3 = -(input.h_slow + f[2] * band);
        const Eigen::RowVector3d K = place_poles(sys, p1, p2, p3);
        const Eigen::Matrix3d A_cl = sys.A_n - sys.B * K;
        const Eigen::Matrix3d A_psi = A_cl + input.Psi * sys.H;

        // robust closed loop must be Hurwitz, otherwise Eq. (21) cannot hold
        Eigen::EigenSolver<Eigen::Matrix3d> es(A_psi);
        if (es.eigenvalues().real().maxCoeff() >= 0.0) {
            std::ostringstream os;
            os << "quadratic-stability inequality: A_n - BK + Psi*H not Hurwitz at poles ("
               << p1 << ", " << p2 << ", " << p3 << ")";
            const double v = es.eigenvalues().real().maxCoeff();
            if (v < worst_violation) { worst_violation = v; worst_report = os.str(); }
            continue;
        }

        Eigen::EigenSolver<Eigen::Matrix3d> ecl(A_cl);
        Eigen::Matrix3d V = ecl.pseudoEigenvectors(); // real: the poles are placed real
        for (int c = 0; c < 3; ++c) V.col(c).normalize();

        Eigen::Matrix3d Y;
        if (!find_common_Y(A_cl, A_psi, input.h_slow, input.h_fast, input.theta,
                           V, Y)) {
            // record the most violated block at the region-exact candidate
            // Y = V V^T for the infeasibility report
            const Eigen::Matrix3d Y_reg = V * V.transpose() / (V * V.transpose()).norm();
            const RegionCheck rc = check_region_lmis(Y_reg, A_cl, input.h_slow,
                                                     input.h_fast, input.theta);
            const double lhs = lambda_max_sym(
                eq21_lhs(Y_reg.inverse(), sys, K, input.Psi));
            const double v = std::max(rc.ok ? 0.0 : rc.worst, lhs);
            if (v < worst_violation) {
                worst_violation = v;
                worst_report = (!rc.ok && rc.worst >= lhs)
                                   ? "region constraint: " + rc.worst_name
                                   : "quadratic-stability inequality (Eq. LHS not negative)";
            }
            continue;
        }

        {
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> ys(Y);
            const double ymin = ys.eigenvalues().minCoeff();
            const double ymax = ys.eigenvalues().maxCoeff();
            if (!(ymin > 0.0)) continue;
            if (ymax / ymin > 1e10)
                throw ConditioningError("solve_region_lmi: candidate Y condition number exceeds 1e10");

            const RegionCheck region =
                check_region_lmis(Y, A_cl, input.h_slow, input.h_fast, input.theta);
            Eigen::Matrix3d M = Y.inverse();
            M = 0.5 * (M + M.transpose().eval());
            const double lhs_max = lambda_max_sym(eq21_lhs(M, sys, K, input.Psi));

            if (!region.ok || lhs_max >= 0.0) {
                const double v = std::max(region.ok ? 0.0 : region.worst, lhs_max);
                if (v < worst_violation) {
                    worst_violation = v;
                    worst_report = region.ok
                                       ? "quadratic-stability inequality (Eq. LHS not negative)"
                                       : "region constraint: " + region.worst_name;
                }
                continue;
            }

            // scale M so the inequality holds with the requested absolute
            // margin (the LHS is linear in M; region checks are homogeneous)
            double scale = 1.0;
            if (-lhs_max < 2.0 * margin_abs) scale = 2.0 * margin_abs / (-lhs_max);
            M *= scale;

            SurfaceDesign d;
            d.M = M;
            d.Y = Y / scale;
            d.K = K;
            d.alpha = 4.0 * input.params.tau * input.params.E * input.params.A /
                      input.params.V_t;
            const double tm_over_A = input.params.tau * input.params.m / input.params.A;
            d.gamma1 = tm_over_A * K(0);
            d.kappa = tm_over_A * K(1) - d.alpha;
            d.gamma2 = K(2);
            {
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> ls(
                    -eq21_lhs(M, sys, K, input.Psi));
                d.mu_M = ls.eigenvalues().minCoeff();
            }
            d.h_slow = input.h_slow;
            d.h_fast = input.h_fast;
            d.theta = input.theta;
            d.Psi = input.Psi;
            eigs_in_region(A_cl, input.h_slow, input.h_fast, input.theta, 1e-6,
                           &d.closed_loop_eigs);

            const Certificate cert = certify(d, input);
            if (!cert.ok()) continue; // self-check failed, try next candidate
            return d;
        }
    }

    throw InfeasibleError("solve_region_lmi: no feasible design; most violated constraint: " +
                          worst_report);
}

SurfaceDesign solve_region_lmi_auto_theta(SynthesisInput input) {
    input.validate();
    const double step = M_PI / 40.0;
    for (double theta = 0.0; theta <= M_PI / 4.0 + 1e-12; theta += step) {
        input.theta = theta;
        try {
            return solve_region_lmi(input);
        } catch (const InfeasibleError&) {
            // enlarge the cone and retry
        }
    }
    throw InfeasibleError("solve_region_lmi_auto_theta: infeasible for all theta up to pi/4");
}

Certificate certify(const SurfaceDesign& design, const SynthesisInput& input,
                    double region_tol) {
    const SystemMatrices sys = build_matrices(input.params, input.Psi);
    Certificate c;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> ys(design.Y);
    c.lambda_min_Y = ys.eigenvalues().minCoeff();
    c.Y_positive_definite = c.lambda_min_Y > 0.0;

    const Eigen::Matrix3d lhs = eq21_lhs(design.M, sys, design.K, input.Psi);
    c.lambda_max_lhs = lambda_max_sym(lhs);
    c.inequality_strict = c.lambda_max_lhs <= -input.margin * sys.A_n.norm();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> ms(-lhs);
    c.mu_M = ms.eigenvalues().minCoeff();

    const Eigen::Matrix3d A_cl = sys.A_n - sys.B * design.K;
    c.eigs_in_region =
        eigs_in_region(A_cl, input.h_slow, input.h_fast, input.theta, region_tol);
    return c;
}

} // namespace hysta
