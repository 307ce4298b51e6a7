#pragma once

#include <array>
#include <vector>

namespace hysta {

/// One piece of a piecewise reference profile. Quintic pieces store the six
/// polynomial coefficients in the local time t - t_start; holds/ramps/steps
/// are degenerate polynomials.
struct Segment {
    enum class Kind { Quintic, Hold, Ramp, Step };
    Kind kind = Kind::Hold;
    double t_start = 0.0;
    double t_end = 0.0;
    std::array<double, 6> coeff{}; // value = sum coeff[k] * (t - t_start)^k
};

/// Coefficients of the unique quintic with rest-to-rest boundary conditions
/// (zero velocity and acceleration at both ends).
std::array<double, 6> quintic_segment(double q_start, double q_end,
                                      double t_start, double t_end);

class ReferenceProfile {
public:
    /// Builds a profile from contiguous segments; validates coverage of
    /// [0, T_end] and rest-to-rest continuity of quintic pieces.
    explicit ReferenceProfile(std::vector<Segment> segments);

    /// Value of the order-th derivative (order 0..4) at time t. At a step
    /// discontinuity the right-limit is returned; derivative orders report
    /// zero across the step rather than an impulse.
    double sample(double t, int order = 0) const;

    /// False exactly at the step instants, where r leaves C^4.
    bool smooth_at(double t) const;

    double horizon() const { return segments_.back().t_end; }
    const std::vector<Segment>& segments() const { return segments_; }

private:
    std::vector<Segment> segments_;
};

/// The experimental motion profile: quintic 0 -> 0.1 m on [0,2], hold to 3 s,
/// quintic down to 0.02 m at 5 s, hold to 6 s, ramp to ramp_target over
/// [6,8], hold, then a set-point step to 0.1 m at t = 9, held to the horizon.
ReferenceProfile paper_profile(double ramp_target = 0.1, double horizon = 14.0);

/// A single set-point step at t_step, from 0 to amplitude, used for the
/// rho-sweep step-response comparisons.
ReferenceProfile step_profile(double amplitude = 0.1, double t_step = 1.0,
                              double horizon = 6.0);

} // namespace hysta
