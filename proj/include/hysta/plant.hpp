#pragma once

#include <stdexcept>

namespace hysta {

/// Physical constants of the hydraulic cylinder, servo-valve and friction model.
/// The shipped defaults are a plausible lab-scale parameterization, not an
/// identified test bench; every tool reads them from the config file. They are
/// chosen to be internally consistent: V_t is about twice the swept cylinder
/// volume plus piping, K_f passes the full supply flow at full opening, and
/// the hydraulic natural frequency sqrt(4*E*A^2/(V_t*m)) is about 77 rad/s,
/// comfortably above the closed-loop bandwidth either controller asks for.
struct PlantParams {
    double m = 100.0;        ///< moving mass [kg]
    double sigma = 800.0;    ///< viscous friction [N*s/m]
    double A = 5.0e-4;       ///< mean effective piston area [m^2]
    double E = 3.0e8;        ///< effective bulk modulus [Pa]
    double V_t = 5.0e-4;     ///< total circuit volume [m^3]
    // Inter-chamber leakage, including the laminar bypass commonly fitted for
    // damping: contributes about 0.3 relative damping to the hydraulic mode,
    // which the orifice itself cannot provide around the valve dead-zone.
    double C_L = 1.5e-11;    ///< inter-chamber leakage [m^3/(s*Pa)]
    // Valve sized for the axis, not the power unit: full opening passes about
    // 10 l/min at half supply pressure, i.e. a no-load speed of 0.34 m/s
    // against the 0.094 m/s peak demand of the nominal motion profile.
    double K_f = 7.5e-8;     ///< valve flow coefficient [m^3/s per unit opening per sqrt(Pa)]
    double P_S = 1.0e7;      ///< supply pressure [Pa]

    // Stribeck friction set
    double F_c = 50.0;       ///< Coulomb level [N]
    double F_s = 70.0;       ///< static level [N], F_s > F_c
    double chi = 0.05;       ///< Stribeck velocity [m/s]
    double iota = 1.0;       ///< Stribeck exponent
    double vartheta = 10.0;  ///< Coulomb smoothing [1/(m/s)]

    // Valve response: a servo valve with an internal spool loop. The spool
    // time constant 1/(zeta_v*omega_0) is about 1.4 ms, two orders of
    // magnitude below the 125 ms mechanical time constant m/sigma, which is
    // the separation the unit-gain valve assumption of the control design
    // rests on. A slower valve turns the high-gain end of the reaching-law
    // sweep into a macroscopic chatter limit cycle.
    double omega_0 = 1000.0; ///< valve eigenfrequency [rad/s]
    double zeta_v = 0.7;     ///< valve damping ratio
    double c_d = 0.1;        ///< dead-zone size [fraction of opening]
    double c_s = 0.9;        ///< saturation level [fraction of opening]

    // linearization point coefficients (defaults match linearize(g0=0.1, P0=0))
    double C_qp = 8.3853e-13; ///< flow-pressure coefficient [m^3/(s*Pa)]
    double C_q = 1.6771e-4;   ///< flow gain [m^3/s per unit opening]

    // Relief and anti-cavitation valves of the power unit: a laminar bypass
    // that opens when |P| approaches the supply pressure and keeps the load
    // pressure inside its physical range. Inactive below relief_frac * P_S,
    // so it does not perturb the model anywhere near the operating region.
    double relief_frac = 0.95; ///< relief cracking pressure [fraction of P_S]
    double C_relief = 5.0e-9;  ///< relief conductance [m^3/(s*Pa)]

    // Free scaling constant of the measured pressure state. Chosen so the
    // scaled reference-rate disturbance 4*tau*E*A/V_t * r_dot stays within
    // the robustness budget of the fixed-gain reaching law.
    double tau = 2.0e-8;
    double stroke = 0.20;    ///< usable stroke [m]
    /// Lower mechanical end stop; the upper one sits at q_min + stroke. The
    /// simulator models the stops as plastic (velocity zeroed on contact).
    double q_min = -0.05;

    void validate() const;
};

/// Continuous plant state. Spool states are only integrated when the valve
/// dynamics is enabled.
struct PlantState {
    double q = 0.0;       ///< position [m]
    double q_dot = 0.0;   ///< velocity [m/s]
    double P = 0.0;       ///< load pressure difference [Pa]
    double nu = 0.0;      ///< spool position [-]
    double nu_dot = 0.0;  ///< spool velocity [1/s]
};

struct PlantDisturbances {
    double delta_P = 0.0; ///< pressure-dynamics uncertainty [Pa/s]
    double F_L = 0.0;     ///< external load force [N]
};

/// Orifice opening as a function of spool position: saturated outside
/// |nu| >= c_s + c_d, zero inside the dead-zone, shifted-linear in between.
double valve_opening(double nu, const PlantParams& params);

/// Load flow rate through the valve orifice. Throws std::domain_error when
/// |P| exceeds the supply pressure (negative radicand, non-physical).
double orifice_flow(double g, double P, const PlantParams& params);

/// Stribeck + viscous friction force; odd in q_dot.
double friction_force(double q_dot, const PlantParams& params);

/// Time derivative of the full nonlinear plant. With valve_dynamics=false the
/// command U drives the orifice map directly (unit-gain valve assumption) and
/// the spool derivatives are zero.
PlantState nonlinear_derivative(const PlantState& state, double U,
                                const PlantParams& params,
                                const PlantDisturbances& dist = {},
                                bool valve_dynamics = true);

struct LinearState {
    double x1 = 0.0; ///< position [m]
    double x2 = 0.0; ///< velocity [m/s]
    double x3 = 0.0; ///< load pressure [Pa]
};

struct LinearDisturbances {
    double delta_2 = 0.0;
    double delta_3 = 0.0;
    double F_L = 0.0;
};

/// Linearized three-state model around (g0, P0).
LinearState linear_derivative(const LinearState& x, double u,
                              const PlantParams& params,
                              const LinearDisturbances& dist = {});

struct LinearCoeffs {
    double C_q;
    double C_qp;
};

/// Linearized flow coefficients at an operating point. C_q is the flow gain
/// w.r.t. the opening; C_qp is the flow-pressure coefficient taken with the
/// dissipative sign convention (C_qp = -dQ/dP >= 0) so that the x3 damping
/// term of the linear model carries its physical sign.
/// Throws std::domain_error for |P0| >= P_S.
LinearCoeffs linearize(const PlantParams& params, double g0, double P0);

} // namespace hysta
