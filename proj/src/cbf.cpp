#include "lfsim/cbf.hpp"

#include <cmath>

namespace lfsim {

BarrierValues barrier_values(const PairState& p, double theta_leader, double theta_follower,
                             const SafetySet& set) {
    // Equals phi for a consistent pair state; wrapping picks the branch that
    // makes the angular constraints physically meaningful.
    const double ang = wrap_angle(theta_leader - theta_follower - p.alpha);
    BarrierValues out;
    out.h[0] = p.L - set.D_min;
    out.h[1] = set.D_max - p.L;
    out.h[2] = ang + set.psi_max;
    out.h[3] = -ang + set.psi_max;
    return out;
}

std::array<ConstraintRow, 4> assemble_cbf_constraints(const PairState& p, ControlInput u_leader,
                                                      double theta_leader, double theta_follower,
                                                      const SafetySet& set,
                                                      const VehicleGeometry& geom) {
    const PairDynamicsMatrices m = pair_matrices(p, geom);
    const BarrierValues hv = barrier_values(p, theta_leader, theta_follower, set);

    // dh = A [dL; dalpha] + C (omega_follower - omega_leader) with
    // A = [1 0; -1 0; 0 -1; 0 1] and C = [0; 0; -1; 1]. Substituting the pair
    // dynamics gives rows a_k = (A g + C_bar)_k and offsets
    // b_k = ((A f - C_bar) u_leader)_k + gamma_k h_k, C_bar = C [0 1].
    const Vec2 g1 = {m.g_mat.a11, m.g_mat.a12};
    const Vec2 g2 = {m.g_mat.a21, m.g_mat.a22};
    const Vec2 f1 = {m.f_mat.a11, m.f_mat.a12};
    const Vec2 f2 = {m.f_mat.a21, m.f_mat.a22};
    const Vec2 ul = {u_leader.v, u_leader.omega};

    std::array<ConstraintRow, 4> rows;
    rows[0] = {g1, dot(f1, ul) + set.gamma[0] * hv.h[0]};
    rows[1] = {{-g1.x, -g1.y}, -dot(f1, ul) + set.gamma[1] * hv.h[1]};
    rows[2] = {{-g2.x, -g2.y - 1.0}, -dot(f2, ul) + u_leader.omega + set.gamma[2] * hv.h[2]};
    rows[3] = {{g2.x, g2.y + 1.0}, dot(f2, ul) - u_leader.omega + set.gamma[3] * hv.h[3]};
    return rows;
}

FilterResult safety_filter(const PairState& p, ControlInput u_leader, ControlInput u_nominal,
                           double theta_leader, double theta_follower, const SafetySet& set,
                           const VehicleGeometry& geom, const Mat2& P, const InputBounds& box) {
    FilterResult res;
    res.h = barrier_values(p, theta_leader, theta_follower, set);

    const std::array<ConstraintRow, 4> rows =
        assemble_cbf_constraints(p, u_leader, theta_leader, theta_follower, set, geom);

    QpProblem q;
    q.P = P;
    q.u_nom = u_nominal;
    q.rows.assign(rows.begin(), rows.end());
    q.box = box;
    res.solution = solve_qp(q);
    return res;
}

}  // namespace lfsim
