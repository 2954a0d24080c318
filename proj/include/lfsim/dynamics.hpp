#pragma once

#include "lfsim/control_input.hpp"
#include "lfsim/geometry.hpp"
#include "lfsim/mat2.hpp"

namespace lfsim {

enum class IntegrationScheme { euler, rk4 };

struct IntegratorConfig {
    double dt = 0.05;  // seconds, in (0, 0.1]
    IntegrationScheme scheme = IntegrationScheme::rk4;
};

/// Input maps of the relative pair dynamics
///   [dL; dalpha] = g_mat * u_follower + f_mat * u_leader
/// with
///   g_mat = [-cos(phi), -d sin(phi); -sin(phi)/L, d cos(phi)/L]
///   f_mat = [ cos(alpha), 0;         -sin(alpha)/L, 1]
/// so det(g_mat) = -d/L, nonzero whenever L > 0.
struct PairDynamicsMatrices {
    Mat2 g_mat;
    Mat2 f_mat;
};

struct PairRate {
    double dL = 0.0;      // meters/second
    double dalpha = 0.0;  // radians/second
};

// Advances the unicycle kinematics one step holding u constant; the returned
// state stores u and has theta wrapped to (-pi, pi].
AgentState step_agent(const AgentState& a, ControlInput u, const IntegratorConfig& cfg);

// Throws DegenerateGeometry when p.L is below the degeneracy threshold.
PairDynamicsMatrices pair_matrices(const PairState& p, const VehicleGeometry& geom);

PairRate pair_rate(const PairState& p, ControlInput u_follower, ControlInput u_leader,
                   const VehicleGeometry& geom);

}  // namespace lfsim
