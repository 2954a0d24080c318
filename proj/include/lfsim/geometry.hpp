#pragma once

#include "lfsim/errors.hpp"

namespace lfsim {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Pair distances below this are treated as degenerate; the relative dynamics
// divide by L.
inline constexpr double kDegenerateLength = 1e-9;

// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

// Center-to-front-bumper displacement of one vehicle.
struct VehicleGeometry {
    double d = 0.1;  // meters, > 0
};

// Global pose plus the input currently applied. theta is kept in (-pi, pi].
struct AgentState {
    double x = 0.0;      // meters
    double y = 0.0;      // meters
    double theta = 0.0;  // radians
    double v = 0.0;      // meters/second
    double omega = 0.0;  // radians/second
};

// Global coordinates of the front midpoint of an agent.
struct FrontPoint {
    double x_bar = 0.0;
    double y_bar = 0.0;
};

/// Relative coordinates of one leader-follower pair.
///
/// L is the distance from the follower's front point to the leader's center.
/// phi is the bearing of the leader in the follower's body frame, positive
/// when the leader appears to the follower's left. alpha is the leader's
/// heading relative to the line of sight; the three satisfy
/// alpha = theta_leader - theta_follower - phi (mod 2*pi).
struct PairState {
    double L = 0.0;      // meters, > 0
    double alpha = 0.0;  // radians, in (-pi, pi]
    double phi = 0.0;    // radians, in (-pi, pi]
};

FrontPoint front_point(const AgentState& a, const VehicleGeometry& geom);

// Throws DegenerateGeometry when the leader center is within kDegenerateLength
// of the follower front point.
PairState pair_state_from_global(const AgentState& leader, const AgentState& follower,
                                 const VehicleGeometry& geom);

}  // namespace lfsim
