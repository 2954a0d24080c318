#include "lfsim/geometry.hpp"

#include <cmath>

namespace lfsim {

double wrap_angle(double a) {
    double r = std::fmod(a + kPi, 2.0 * kPi);
    if (r <= 0.0) r += 2.0 * kPi;
    return r - kPi;
}

FrontPoint front_point(const AgentState& a, const VehicleGeometry& geom) {
    return {a.x + geom.d * std::cos(a.theta), a.y + geom.d * std::sin(a.theta)};
}

PairState pair_state_from_global(const AgentState& leader, const AgentState& follower,
                                 const VehicleGeometry& geom) {
    const FrontPoint fp = front_point(follower, geom);
    const double dx = leader.x - fp.x_bar;
    const double dy = leader.y - fp.y_bar;
    const double L = std::sqrt(dx * dx + dy * dy);
    if (L < kDegenerateLength) {
        throw DegenerateGeometry("leader center coincides with follower front point");
    }
    PairState p;
    p.L = L;
    p.phi = wrap_angle(std::atan2(dy, dx) - follower.theta);
    p.alpha = wrap_angle(leader.theta - follower.theta - p.phi);
    return p;
}

}  // namespace lfsim
