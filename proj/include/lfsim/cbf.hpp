#pragma once

#include <array>

#include "lfsim/control_input.hpp"
#include "lfsim/dynamics.hpp"
#include "lfsim/geometry.hpp"
#include "lfsim/qp.hpp"

namespace lfsim {

// Camera field-of-view limits and the per-constraint class-K slopes.
struct SafetySet {
    double D_min = 0.6;     // meters
    double D_max = 8.0;     // meters
    double psi_max = 0.5236;  // radians, half FOV angle
    std::array<double, 4> gamma = {0.45, 0.45, 0.45, 0.45};
};

/// The four barrier values, ordered
///   h1 = L - D_min
///   h2 = D_max - L
///   h3 = theta_leader - theta_follower - alpha + psi_max
///   h4 = -(theta_leader - theta_follower - alpha) + psi_max
/// The angular deviation theta_leader - theta_follower - alpha is evaluated
/// modulo 2*pi into (-pi, pi]; it equals the bearing phi when the pair state
/// is consistent, so h3 = psi_max + phi and h4 = psi_max - phi.
struct BarrierValues {
    std::array<double, 4> h = {0.0, 0.0, 0.0, 0.0};
};

BarrierValues barrier_values(const PairState& p, double theta_leader, double theta_follower,
                             const SafetySet& set);

/// Four affine rows a_k . u + b_k >= 0 on the follower input, equivalent to
/// dh_k/dt + gamma_k h_k >= 0 under the pair dynamics with the leader input
/// held at u_leader. Throws DegenerateGeometry for L below threshold.
std::array<ConstraintRow, 4> assemble_cbf_constraints(const PairState& p, ControlInput u_leader,
                                                      double theta_leader, double theta_follower,
                                                      const SafetySet& set,
                                                      const VehicleGeometry& geom);

struct FilterResult {
    BarrierValues h;
    QpSolution solution;
};

/// Composes constraint assembly and the QP: returns the admissible input
/// closest to u_nominal in the P-weighted norm that keeps every barrier
/// decaying no faster than its gamma slope.
FilterResult safety_filter(const PairState& p, ControlInput u_leader, ControlInput u_nominal,
                           double theta_leader, double theta_follower, const SafetySet& set,
                           const VehicleGeometry& geom, const Mat2& P, const InputBounds& box);

}  // namespace lfsim
