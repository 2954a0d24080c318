#pragma once

#include "lfsim/control_input.hpp"
#include "lfsim/dynamics.hpp"
#include "lfsim/geometry.hpp"

namespace lfsim {

// Desired relative coordinates for one leader-follower pair.
struct FormationSetpoint {
    double L_d = 1.5;      // meters, > 0
    double alpha_d = 0.0;  // radians
};

struct ControllerGains {
    double K_L = 1.0;      // 1/seconds, > 0
    double K_alpha = 0.15;  // 1/seconds, > 0
};

/// Feedback-linearizing formation controller. Inverts the follower input map
/// of the pair dynamics so that the closed-loop error dynamics become
///   dL      = K_L     * (L_d - L)
///   dalpha  = K_alpha * wrap(alpha_d - alpha).
/// The output is intentionally not clamped; the safety filter owns the
/// admissible set.
ControlInput nominal_control(const PairState& p, ControlInput u_leader,
                             const FormationSetpoint& sp, const ControllerGains& gains,
                             const VehicleGeometry& geom);

}  // namespace lfsim
