#include "lfsim/qp.hpp"

#include <cmath>
#include <limits>

namespace lfsim {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kDualTol = 1e-10;
constexpr double kSingularTol = 1e-12;

double objective(const Mat2& P, ControlInput u, ControlInput u_nom) {
    const Vec2 e = {u.v - u_nom.v, u.omega - u_nom.omega};
    return 0.5 * dot(e, mul(P, e));
}

// Rows plus box faces in one list; face order v_min, v_max, omega_min, omega_max.
std::vector<ConstraintRow> all_constraints(const QpProblem& q) {
    std::vector<ConstraintRow> cs = q.rows;
    cs.push_back({{1.0, 0.0}, -q.box.v_min});
    cs.push_back({{-1.0, 0.0}, q.box.v_max});
    cs.push_back({{0.0, 1.0}, -q.box.omega_min});
    cs.push_back({{0.0, -1.0}, q.box.omega_max});
    return cs;
}

bool feasible_at(const std::vector<ConstraintRow>& cs, Vec2 u) {
    for (const ConstraintRow& c : cs) {
        if (dot(c.a, u) + c.b < -kFeasTol) return false;
    }
    return true;
}

// Minimizes the largest row violation over the box: the LP
//   min t  s.t.  t + a_k . u + b_k >= 0 for every row, u in box
// solved exactly by enumerating vertices (triples of tight constraints) of
// the polyhedron in (u, t).
QpSolution solve_max_violation_relaxation(const QpProblem& q) {
    const std::size_t n_rows = q.rows.size();
    // Constraints in (v, omega, t): rows carry coefficient 1 on t, faces 0.
    struct Lp3 {
        double cv, cw, ct, c0;  // cv*v + cw*w + ct*t + c0 >= 0
    };
    std::vector<Lp3> cs;
    cs.reserve(n_rows + 4);
    for (const ConstraintRow& r : q.rows) cs.push_back({r.a.x, r.a.y, 1.0, r.b});
    cs.push_back({1.0, 0.0, 0.0, -q.box.v_min});
    cs.push_back({-1.0, 0.0, 0.0, q.box.v_max});
    cs.push_back({0.0, 1.0, 0.0, -q.box.omega_min});
    cs.push_back({0.0, -1.0, 0.0, q.box.omega_max});

    const std::size_t n = cs.size();
    double best_t = std::numeric_limits<double>::infinity();
    Vec2 best_u = {q.box.v_min, q.box.omega_min};

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                const Lp3& A = cs[i];
                const Lp3& B = cs[j];
                const Lp3& C = cs[k];
                // Solve the 3x3 system by cofactor expansion.
                const double d = A.cv * (B.cw * C.ct - B.ct * C.cw) -
                                 A.cw * (B.cv * C.ct - B.ct * C.cv) +
                                 A.ct * (B.cv * C.cw - B.cw * C.cv);
                if (std::abs(d) < kSingularTol) continue;
                const double r1 = -A.c0, r2 = -B.c0, r3 = -C.c0;
                const double v = (r1 * (B.cw * C.ct - B.ct * C.cw) -
                                  A.cw * (r2 * C.ct - B.ct * r3) +
                                  A.ct * (r2 * C.cw - B.cw * r3)) /
                                 d;
                const double w = (A.cv * (r2 * C.ct - B.ct * r3) -
                                  r1 * (B.cv * C.ct - B.ct * C.cv) +
                                  A.ct * (B.cv * r3 - r2 * C.cv)) /
                                 d;
                const double t = (A.cv * (B.cw * r3 - r2 * C.cw) -
                                  A.cw * (B.cv * r3 - r2 * C.cv) +
                                  r1 * (B.cv * C.cw - B.cw * C.cv)) /
                                 d;
                bool ok = true;
                for (const Lp3& c : cs) {
                    if (c.cv * v + c.cw * w + c.ct * t + c.c0 < -kFeasTol) {
                        ok = false;
                        break;
                    }
                }
                if (ok && t < best_t) {
                    best_t = t;
                    best_u = {v, w};
                }
            }
        }
    }

    QpSolution sol;
    sol.u_safe = {best_u.x, best_u.y};
    sol.status = QpStatus::infeasible;
    for (std::size_t k = 0; k < n_rows; ++k) {
        if (std::abs(-(dot(q.rows[k].a, best_u) + q.rows[k].b) - best_t) <= 1e-7) {
            sol.active_set.push_back(static_cast<int>(k));
        }
    }
    return sol;
}

}  // namespace

QpSolution solve_qp(const QpProblem& q) {
    const Mat2& P = q.P;
    if (std::abs(P.a12 - P.a21) > 1e-12) {
        throw IllConditioned("solve_qp: P is not symmetric");
    }
    const double tr = P.a11 + P.a22;
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det(P)));
    const double eig_min = 0.5 * (tr - disc);
    if (!(eig_min >= 1e-9)) {
        throw IllConditioned("solve_qp: P eigenvalue below 1e-9");
    }
    for (const ConstraintRow& r : q.rows) {
        if (!std::isfinite(r.a.x) || !std::isfinite(r.a.y) || !std::isfinite(r.b)) {
            throw IllConditioned("solve_qp: nonfinite constraint row");
        }
    }

    const std::vector<ConstraintRow> cs = all_constraints(q);
    const Vec2 u_nom = {q.u_nom.v, q.u_nom.omega};

    // Nominal already feasible: return it bitwise untouched.
    {
        bool ok = true;
        for (const ConstraintRow& c : cs) {
            if (dot(c.a, u_nom) + c.b < 0.0) {
                ok = false;
                break;
            }
        }
        if (ok) {
            QpSolution sol;
            sol.u_safe = q.u_nom;
            sol.status = QpStatus::nominal_feasible;
            return sol;
        }
    }

    const Mat2 P_inv = inverse(P);
    const std::size_t n = cs.size();

    double best_obj = std::numeric_limits<double>::infinity();
    bool found = false;
    Vec2 best_u;
    std::vector<int> best_active;

    auto consider = [&](Vec2 u, std::vector<int> active) {
        if (!feasible_at(cs, u)) return;
        const double obj = objective(P, {u.x, u.y}, q.u_nom);
        if (!found || obj < best_obj - 1e-15) {
            found = true;
            best_obj = obj;
            best_u = u;
            best_active = std::move(active);
        }
    };

    // Size 0: unconstrained minimum.
    consider(u_nom, {});

    // Size 1: P (u - u_nom) = lambda a, a . u + b = 0.
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = cs[i].a;
        const Vec2 Pinv_a = mul(P_inv, a);
        const double denom = dot(a, Pinv_a);
        if (std::abs(denom) < kSingularTol) continue;
        const double lambda = -(cs[i].b + dot(a, u_nom)) / denom;
        if (lambda < -kDualTol) continue;
        consider(u_nom + lambda * Pinv_a, {static_cast<int>(i)});
    }

    // Size 2: both constraints tight; multipliers from the KKT system.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Vec2 ai = cs[i].a;
            const Vec2 aj = cs[j].a;
            const Mat2 A = {ai.x, ai.y, aj.x, aj.y};
            if (std::abs(det(A)) < kSingularTol) continue;
            const Vec2 u = solve(A, {-cs[i].b, -cs[j].b});
            // P (u - u_nom) = lambda_i ai + lambda_j aj.
            const Vec2 grad = mul(P, u - u_nom);
            const Mat2 At = {ai.x, aj.x, ai.y, aj.y};
            const Vec2 lambda = solve(At, grad);
            if (lambda.x < -kDualTol || lambda.y < -kDualTol) continue;
            consider(u, {static_cast<int>(i), static_cast<int>(j)});
        }
    }

    if (!found) {
        return solve_max_violation_relaxation(q);
    }

    QpSolution sol;
    sol.u_safe = {best_u.x, best_u.y};
    sol.status = QpStatus::filtered;
    sol.active_set = std::move(best_active);
    return sol;
}

}  // namespace lfsim
