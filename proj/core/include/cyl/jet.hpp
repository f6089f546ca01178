#pragma once

#include <cmath>

#include "cyl/types.hpp"

namespace cyl {

// Second-order forward jet in four variables: value, gradient, Hessian.
struct Jet2 {
    double v = 0.0;
    Vec4 g = Vec4::Zero();
    Mat4 H = Mat4::Zero();

    Jet2() = default;
    Jet2(double c) : v(c) {}  // NOLINT: constants promote implicitly
    static Jet2 variable(const Vec4& x, int i) {
        Jet2 j(x(i));
        j.g(i) = 1.0;
        return j;
    }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
    Jet2 r;
    r.v = a.v + b.v;
    r.g = a.g + b.g;
    r.H = a.H + b.H;
    return r;
}
inline Jet2 operator-(const Jet2& a, const Jet2& b) {
    Jet2 r;
    r.v = a.v - b.v;
    r.g = a.g - b.g;
    r.H = a.H - b.H;
    return r;
}
inline Jet2 operator-(const Jet2& a) {
    Jet2 r;
    r.v = -a.v;
    r.g = -a.g;
    r.H = -a.H;
    return r;
}
inline Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 r;
    r.v = a.v * b.v;
    r.g = a.v * b.g + b.v * a.g;
    r.H = a.v * b.H + b.v * a.H + a.g * b.g.transpose() + b.g * a.g.transpose();
    return r;
}
inline Jet2 operator*(double c, const Jet2& a) {
    Jet2 r;
    r.v = c * a.v;
    r.g = c * a.g;
    r.H = c * a.H;
    return r;
}
inline Jet2 operator*(const Jet2& a, double c) { return c * a; }
inline Jet2& operator+=(Jet2& a, const Jet2& b) { return a = a + b; }
inline Jet2& operator-=(Jet2& a, const Jet2& b) { return a = a - b; }
inline Jet2& operator*=(Jet2& a, const Jet2& b) { return a = a * b; }

// Composition with a scalar function given its first two derivatives.
inline Jet2 chain(const Jet2& a, double f0, double f1, double f2) {
    Jet2 r;
    r.v = f0;
    r.g = f1 * a.g;
    r.H = f1 * a.H + f2 * a.g * a.g.transpose();
    return r;
}

inline Jet2 exp(const Jet2& a) {
    const double e = std::exp(a.v);
    return chain(a, e, e, e);
}
inline Jet2 sqrt(const Jet2& a) {
    const double s = std::sqrt(a.v);
    return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet2 operator/(const Jet2& a, const Jet2& b) {
    const double inv = 1.0 / b.v;
    return a * chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}

// First-order dual number in two variables, used for gradients of 2-D integrands.
struct Dual2 {
    double v = 0.0, d0 = 0.0, d1 = 0.0;
    Dual2() = default;
    Dual2(double c) : v(c) {}  // NOLINT
    Dual2(double c, double a, double b) : v(c), d0(a), d1(b) {}
};

inline Dual2 operator+(Dual2 a, Dual2 b) { return {a.v + b.v, a.d0 + b.d0, a.d1 + b.d1}; }
inline Dual2 operator-(Dual2 a, Dual2 b) { return {a.v - b.v, a.d0 - b.d0, a.d1 - b.d1}; }
inline Dual2 operator-(Dual2 a) { return {-a.v, -a.d0, -a.d1}; }
inline Dual2 operator*(Dual2 a, Dual2 b) { return {a.v * b.v, a.v * b.d0 + b.v * a.d0, a.v * b.d1 + b.v * a.d1}; }
inline Dual2 operator/(Dual2 a, Dual2 b) {
    const double inv = 1.0 / b.v;
    return {a.v * inv, (a.d0 - a.v * inv * b.d0) * inv, (a.d1 - a.v * inv * b.d1) * inv};
}
inline Dual2 apply(Dual2 a, double f0, double f1) { return {f0, f1 * a.d0, f1 * a.d1}; }
inline Dual2 sin(Dual2 a) { return apply(a, std::sin(a.v), std::cos(a.v)); }
inline Dual2 cos(Dual2 a) { return apply(a, std::cos(a.v), -std::sin(a.v)); }
inline Dual2 exp(Dual2 a) {
    const double e = std::exp(a.v);
    return apply(a, e, e);
}
inline Dual2 sqrt(Dual2 a) {
    const double s = std::sqrt(a.v);
    return apply(a, s, s > 0 ? 0.5 / s : 0.0);
}
inline Dual2 acos(Dual2 a) {
    const double x = std::max(-1.0, std::min(1.0, a.v));
    const double d = 1.0 - x * x;
    return apply(a, std::acos(x), d > 0 ? -1.0 / std::sqrt(d) : 0.0);
}
inline Dual2 asin(Dual2 a) {
    const double x = std::max(-1.0, std::min(1.0, a.v));
    const double d = 1.0 - x * x;
    return apply(a, std::asin(x), d > 0 ? 1.0 / std::sqrt(d) : 0.0);
}
inline Dual2 atan2(Dual2 y, Dual2 x) {
    const double r2 = x.v * x.v + y.v * y.v;
    return {std::atan2(y.v, x.v), (x.v * y.d0 - y.v * x.d0) / r2, (x.v * y.d1 - y.v * x.d1) / r2};
}

}  // namespace cyl
