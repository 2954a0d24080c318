#pragma once

#include <algorithm>

namespace lfsim {

// Box describing the admissible input set.
struct InputBounds {
    double v_min = -1.0;
    double v_max = 1.0;
    double omega_min = -2.0;
    double omega_max = 2.0;
};

// Linear and angular velocity command.
struct ControlInput {
    double v = 0.0;      // meters/second
    double omega = 0.0;  // radians/second
};

inline ControlInput clamp_to(ControlInput u, const InputBounds& b) {
    return {std::clamp(u.v, b.v_min, b.v_max), std::clamp(u.omega, b.omega_min, b.omega_max)};
}

inline bool inside(ControlInput u, const InputBounds& b) {
    return u.v >= b.v_min && u.v <= b.v_max && u.omega >= b.omega_min && u.omega <= b.omega_max;
}

}  // namespace lfsim
