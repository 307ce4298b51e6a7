#include "hysta/trajectory.hpp"

#include <cmath>
#include <stdexcept>

namespace hysta {

std::array<double, 6> quintic_segment(double q_start, double q_end,
                                      double t_start, double t_end) {
    if (!(t_end > t_start))
        throw std::invalid_argument("quintic_segment: time interval must be increasing");
    const double T = t_end - t_start;
    const double d = q_end - q_start;
    // rest-to-rest quintic: q0 + d*(10u^3 - 15u^4 + 6u^5), u = (t-t0)/T
    return {q_start, 0.0, 0.0, 10.0 * d / (T * T * T), -15.0 * d / (T * T * T * T),
            6.0 * d / (T * T * T * T * T)};
}

ReferenceProfile::ReferenceProfile(std::vector<Segment> segments)
    : segments_(std::move(segments)) {
    if (segments_.empty())
        throw std::invalid_argument("ReferenceProfile: no segments");
    if (segments_.front().t_start != 0.0)
        throw std::invalid_argument("ReferenceProfile: must start at t = 0");
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& s = segments_[i];
        if (!(s.t_end > s.t_start))
            throw std::invalid_argument("ReferenceProfile: empty segment");
        if (i > 0 && segments_[i - 1].t_end != s.t_start)
            throw std::invalid_argument("ReferenceProfile: segments must be contiguous");
    }
}

namespace {
double poly_eval(const std::array<double, 6>& c, double dt, int order) {
    // order-th derivative of sum c[k] dt^k
    double v = 0.0;
    double p = 1.0;
    for (int k = order; k <= 5; ++k) {
        double factor = 1.0;
        for (int j = 0; j < order; ++j) factor *= double(k - j);
        v += c[std::size_t(k)] * factor * p;
        p *= dt;
    }
    return v;
}
} // namespace

double ReferenceProfile::sample(double t, int order) const {
    if (order < 0 || order > 4)
        throw std::invalid_argument("ReferenceProfile::sample: order must be 0..4");
    if (t < 0.0 || t > horizon())
        throw std::out_of_range("ReferenceProfile::sample: time outside horizon");
    // right-limit convention: at a boundary the later segment wins
    const Segment* seg = &segments_.back();
    for (const auto& s : segments_) {
        if (t >= s.t_start && t < s.t_end) { seg = &s; break; }
    }
    if (seg->kind == Segment::Kind::Step && order > 0) return 0.0;
    return poly_eval(seg->coeff, t - seg->t_start, order);
}

bool ReferenceProfile::smooth_at(double t) const {
    for (const auto& s : segments_)
        if (s.kind == Segment::Kind::Step && t == s.t_start) return false;
    return true;
}

namespace {
Segment make_hold(double t0, double t1, double value) {
    Segment s;
    s.kind = Segment::Kind::Hold;
    s.t_start = t0;
    s.t_end = t1;
    s.coeff = {value, 0, 0, 0, 0, 0};
    return s;
}
Segment make_quintic(double t0, double t1, double q0, double q1) {
    Segment s;
    s.kind = Segment::Kind::Quintic;
    s.t_start = t0;
    s.t_end = t1;
    s.coeff = quintic_segment(q0, q1, t0, t1);
    return s;
}
Segment make_ramp(double t0, double t1, double q0, double q1) {
    Segment s;
    s.kind = Segment::Kind::Ramp;
    s.t_start = t0;
    s.t_end = t1;
    s.coeff = {q0, (q1 - q0) / (t1 - t0), 0, 0, 0, 0};
    return s;
}
Segment make_step(double t0, double t1, double value) {
    Segment s;
    s.kind = Segment::Kind::Step;
    s.t_start = t0;
    s.t_end = t1;
    s.coeff = {value, 0, 0, 0, 0, 0};
    return s;
}
} // namespace

ReferenceProfile paper_profile(double ramp_target, double horizon) {
    if (horizon < 14.0)
        throw std::invalid_argument("paper_profile: horizon must cover the 14 s evaluation window");
    std::vector<Segment> segs;
    segs.push_back(make_quintic(0.0, 2.0, 0.0, 0.1));
    segs.push_back(make_hold(2.0, 3.0, 0.1));
    segs.push_back(make_quintic(3.0, 5.0, 0.1, 0.02));
    segs.push_back(make_hold(5.0, 6.0, 0.02));
    segs.push_back(make_ramp(6.0, 8.0, 0.02, ramp_target));
    segs.push_back(make_hold(8.0, 9.0, ramp_target));
    segs.push_back(make_step(9.0, horizon, 0.1));
    return ReferenceProfile(std::move(segs));
}

ReferenceProfile step_profile(double amplitude, double t_step, double horizon) {
    std::vector<Segment> segs;
    segs.push_back(make_hold(0.0, t_step, 0.0));
    segs.push_back(make_step(t_step, horizon, amplitude));
    return ReferenceProfile(std::move(segs));
}

} // namespace hysta
