#pragma once

#include <vector>

#include "lfsim/control_input.hpp"
#include "lfsim/errors.hpp"
#include "lfsim/mat2.hpp"

namespace lfsim {

// One affine inequality a . u + b >= 0 on the input u = (v, omega).
struct ConstraintRow {
    Vec2 a;
    double b = 0.0;
};

/// Quadratic program
///   minimize 0.5 (u - u_nom)^T P (u - u_nom)
///   subject to  a_k . u + b_k >= 0 for every row, and u inside the box.
struct QpProblem {
    Mat2 P = Mat2::identity();  // symmetric, eigenvalues >= 1e-9
    ControlInput u_nom;
    std::vector<ConstraintRow> rows;
    InputBounds box;
};

enum class QpStatus { nominal_feasible, filtered, infeasible };

/// Solver output. active_set holds the indices of constraints tight at the
/// optimum: 0..rows.size()-1 for the affine rows, then rows.size()+{0,1,2,3}
/// for the box faces (v_min, v_max, omega_min, omega_max).
struct QpSolution {
    ControlInput u_safe;
    QpStatus status = QpStatus::nominal_feasible;
    std::vector<int> active_set;
};

/// Exact solve by enumerating active sets of size 0, 1 and 2 over the rows
/// plus the four box faces with KKT verification; in two variables every
/// optimum is covered. When no feasible point exists the returned input
/// minimizes the largest row violation over the box and status is infeasible.
/// Throws IllConditioned when P is asymmetric or an eigenvalue is below 1e-9.
QpSolution solve_qp(const QpProblem& q);

}  // namespace lfsim
