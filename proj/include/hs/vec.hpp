#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace hs {

// Small spatial vector. dim is carried by context (2 or 3); unused
// components stay zero so the same arithmetic works for both.
using Vec = std::array<double, 3>;

inline Vec vec2(double x, double y) { return {x, y, 0.0}; }
inline Vec vec3(double x, double y, double z) { return {x, y, z}; }

inline Vec operator+(const Vec& a, const Vec& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec operator-(const Vec& a, const Vec& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec operator*(double s, const Vec& a) {
    return {s * a[0], s * a[1], s * a[2]};
}
inline Vec operator*(const Vec& a, double s) { return s * a; }
inline Vec operator/(const Vec& a, double s) { return (1.0 / s) * a; }
inline Vec& operator+=(Vec& a, const Vec& b) { a = a + b; return a; }
inline Vec& operator-=(Vec& a, const Vec& b) { a = a - b; return a; }

inline double dot(const Vec& a, const Vec& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline Vec cross(const Vec& a, const Vec& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline Vec normalized(const Vec& a) {
    double n = norm(a);
    return n > 0 ? a / n : a;
}

inline Vec axis_unit(int axis, double sign = 1.0) {
    Vec e{0, 0, 0};
    e[axis] = sign;
    return e;
}

}  // namespace hs
