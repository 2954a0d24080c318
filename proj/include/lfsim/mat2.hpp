#pragma once

#include <cmath>

namespace lfsim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 v) { return std::sqrt(dot(v, v)); }

// Row-major 2x2 matrix, enough linear algebra for the pair dynamics and the QP.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
};

inline Vec2 mul(const Mat2& m, Vec2 v) {
    return {m.a11 * v.x + m.a12 * v.y, m.a21 * v.x + m.a22 * v.y};
}

inline double det(const Mat2& m) { return m.a11 * m.a22 - m.a12 * m.a21; }

inline Mat2 inverse(const Mat2& m) {
    const double d = det(m);
    return {m.a22 / d, -m.a12 / d, -m.a21 / d, m.a11 / d};
}

// Solves m * x = rhs; caller guarantees det(m) != 0.
inline Vec2 solve(const Mat2& m, Vec2 rhs) { return mul(inverse(m), rhs); }

}  // namespace lfsim
