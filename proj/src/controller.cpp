#include "lfsim/controller.hpp"

#include <cmath>

namespace lfsim {

ControlInput nominal_control(const PairState& p, ControlInput u_leader,
                             const FormationSetpoint& sp, const ControllerGains& gains,
                             const VehicleGeometry& geom) {
    if (p.L < kDegenerateLength) {
        throw DegenerateGeometry("nominal_control: L below degeneracy threshold");
    }
    const double c_phi = std::cos(p.phi);
    const double s_phi = std::sin(p.phi);
    const double L = p.L;
    const double d = geom.d;

    // Inverse of the follower input map g(phi, L).
    const Mat2 g_inv = {-c_phi, -L * s_phi, -s_phi / d, L * c_phi / d};

    const Vec2 tracking = {gains.K_L * (sp.L_d - L),
                           gains.K_alpha * wrap_angle(sp.alpha_d - p.alpha)};

    const Mat2 f = pair_matrices(p, geom).f_mat;
    const Vec2 feedforward = mul(f, {u_leader.v, u_leader.omega});

    const Vec2 u = mul(g_inv, tracking - feedforward);
    return {u.x, u.y};
}

}  // namespace lfsim
