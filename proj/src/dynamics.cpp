#include "lfsim/dynamics.hpp"

#include <cmath>

namespace lfsim {

namespace {

struct PoseDeriv {
    double dx, dy, dtheta;
};

PoseDeriv deriv(double theta, ControlInput u) {
    return {u.v * std::cos(theta), u.v * std::sin(theta), u.omega};
}

}  // namespace

AgentState step_agent(const AgentState& a, ControlInput u, const IntegratorConfig& cfg) {
    const double dt = cfg.dt;
    AgentState out = a;

    if (cfg.scheme == IntegrationScheme::euler) {
        const PoseDeriv k = deriv(a.theta, u);
        out.x += dt * k.dx;
        out.y += dt * k.dy;
        out.theta += dt * k.dtheta;
    } else {
        const PoseDeriv k1 = deriv(a.theta, u);
        const PoseDeriv k2 = deriv(a.theta + 0.5 * dt * k1.dtheta, u);
        const PoseDeriv k3 = deriv(a.theta + 0.5 * dt * k2.dtheta, u);
        const PoseDeriv k4 = deriv(a.theta + dt * k3.dtheta, u);
        out.x += dt / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
        out.y += dt / 6.0 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy);
        out.theta += dt / 6.0 * (k1.dtheta + 2.0 * k2.dtheta + 2.0 * k3.dtheta + k4.dtheta);
    }

    out.theta = wrap_angle(out.theta);
    out.v = u.v;
    out.omega = u.omega;
    return out;
}

PairDynamicsMatrices pair_matrices(const PairState& p, const VehicleGeometry& geom) {
    if (p.L < kDegenerateLength) {
        throw DegenerateGeometry("pair_matrices: L below degeneracy threshold");
    }
    const double c_phi = std::cos(p.phi);
    const double s_phi = std::sin(p.phi);
    const double c_alpha = std::cos(p.alpha);
    const double s_alpha = std::sin(p.alpha);
    const double d = geom.d;
    const double L = p.L;

    PairDynamicsMatrices m;
    m.g_mat = {-c_phi, -d * s_phi, -s_phi / L, d * c_phi / L};
    m.f_mat = {c_alpha, 0.0, -s_alpha / L, 1.0};
    return m;
}

PairRate pair_rate(const PairState& p, ControlInput u_follower, ControlInput u_leader,
                   const VehicleGeometry& geom) {
    const PairDynamicsMatrices m = pair_matrices(p, geom);
    const Vec2 r = mul(m.g_mat, {u_follower.v, u_follower.omega}) +
                   mul(m.f_mat, {u_leader.v, u_leader.omega});
    return {r.x, r.y};
}

}  // namespace lfsim
