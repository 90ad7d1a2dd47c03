// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <limits>

namespace gsim {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    double norm_sq() const { return dot(*this); }
    Vec3 normalized() const {
        const double n = norm();
        return n > 0.0 ? *this / n : Vec3{0.0, 0.0, 0.0};
    }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

    static Vec3 min(const Vec3& a, const Vec3& b) {
        return {std::fmin(a.x, b.x), std::fmin(a.y, b.y), std::fmin(a.z, b.z)};
    }
    static Vec3 max(const Vec3& a, const Vec3& b) {
        return {std::fmax(a.x, b.x), std::fmax(a.y, b.y), std::fmax(a.z, b.z)};
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Row-major 3x3 matrix, only what the pipeline needs.
struct Mat3 {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    double operator()(int r, int c) const { return m[r * 3 + c]; }
    double& operator()(int r, int c) { return m[r * 3 + c]; }

    static Mat3 identity() { return {}; }

    static Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
        Mat3 out;
        out.m = {r0.x, r0.y, r0.z, r1.x, r1.y, r1.z, r2.x, r2.y, r2.z};
        return out;
    }
    static Mat3 from_cols(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
        Mat3 out;
        out.m = {c0.x, c1.x, c2.x, c0.y, c1.y, c2.y, c0.z, c1.z, c2.z};
        return out;
    }
    static Mat3 diag(double a, double b, double c) {
        Mat3 out;
        out.m = {a, 0, 0, 0, b, 0, 0, 0, c};
        return out;
    }

    Vec3 row(int r) const { return {m[r * 3], m[r * 3 + 1], m[r * 3 + 2]}; }
    Vec3 col(int c) const { return {m[c], m[3 + c], m[6 + c]}; }

    Mat3 transposed() const {
        return from_rows(col(0), col(1), col(2));
    }

    Vec3 operator*(const Vec3& v) const {
        return {row(0).dot(v), row(1).dot(v), row(2).dot(v)};
    }

    Mat3 operator*(const Mat3& o) const {
        Mat3 out;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                out(r, c) = row(r).dot(o.col(c));
        return out;
    }

    double det() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7])
             - m[1] * (m[3] * m[8] - m[5] * m[6])
             + m[2] * (m[3] * m[7] - m[4] * m[6]);
    }
};

// Unit quaternion, (w, x, y, z) storage matching the splat PLY rot_0..rot_3 order.
struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    Quat() = default;
    Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

    static Quat identity() { return {}; }

    static Quat from_axis_angle(const Vec3& axis, double angle) {
        const Vec3 a = axis.normalized();
        const double h = 0.5 * angle;
        const double s = std::sin(h);
        return {std::cos(h), a.x * s, a.y * s, a.z * s};
    }

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

    Quat normalized() const {
        const double n = norm();
        return n > 0.0 ? Quat{w / n, x / n, y / n, z / n} : identity();
    }

    Quat conjugate() const { return {w, -x, -y, -z}; }

    // Hamilton product; (a*b).rotate(v) == a.rotate(b.rotate(v)).
    Quat operator*(const Quat& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z,
                w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w};
    }

    Vec3 rotate(const Vec3& v) const {
        const Vec3 q{x, y, z};
        const Vec3 t = q.cross(v) * 2.0;
        return v + t * w + q.cross(t);
    }
    Vec3 inverse_rotate(const Vec3& v) const { return conjugate().rotate(v); }

    Mat3 to_matrix() const {
        const double xx = x * x, yy = y * y, zz = z * z;
        const double xy = x * y, xz = x * z, yz = y * z;
        const double wx = w * x, wy = w * y, wz = w * z;
        Mat3 r;
        r.m = {1 - 2 * (yy + zz), 2 * (xy - wz),     2 * (xz + wy),
               2 * (xy + wz),     1 - 2 * (xx + zz), 2 * (yz - wx),
               2 * (xz - wy),     2 * (yz + wx),     1 - 2 * (xx + yy)};
        return r;
    }

    // Shepperd's method; input need not be exactly orthonormal.
    static Quat from_matrix(const Mat3& m) {
        Quat q;
        const double tr = m(0, 0) + m(1, 1) + m(2, 2);
        if (tr > 0.0) {
            double s = std::sqrt(tr + 1.0) * 2.0;
            q.w = 0.25 * s;
            q.x = (m(2, 1) - m(1, 2)) / s;
            q.y = (m(0, 2) - m(2, 0)) / s;
            q.z = (m(1, 0) - m(0, 1)) / s;
        } else if (m(0, 0) > m(1, 1) && m(0, 0) > m(2, 2)) {
            double s = std::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2)) * 2.0;
            q.w = (m(2, 1) - m(1, 2)) / s;
            q.x = 0.25 * s;
            q.y = (m(0, 1) + m(1, 0)) / s;
            q.z = (m(0, 2) + m(2, 0)) / s;
        } else if (m(1, 1) > m(2, 2)) {
            double s = std::sqrt(1.0 + m(1, 1) - m(0, 0) - m(2, 2)) * 2.0;
            q.w = (m(0, 2) - m(2, 0)) / s;
            q.x = (m(0, 1) + m(1, 0)) / s;
            q.y = 0.25 * s;
            q.z = (m(1, 2) + m(2, 1)) / s;
        } else {
            double s = std::sqrt(1.0 + m(2, 2) - m(0, 0) - m(1, 1)) * 2.0;
            q.w = (m(1, 0) - m(0, 1)) / s;
            q.x = (m(0, 2) + m(2, 0)) / s;
            q.y = (m(1, 2) + m(2, 1)) / s;
            q.z = 0.25 * s;
        }
        return q.normalized();
    }

    bool finite() const {
        return std::isfinite(w) && std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

// Spherical linear interpolation with shortest-arc sign correction.
inline Quat slerp(const Quat& a, Quat b, double t) {
    double cos_half = a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
    if (cos_half < 0.0) {
        b = {-b.w, -b.x, -b.y, -b.z};
        cos_half = -cos_half;
    }
    if (cos_half > 1.0 - 1e-12) {
        // Nearly parallel: nlerp avoids the 0/0.
        Quat q{a.w + t * (b.w - a.w), a.x + t * (b.x - a.x),
               a.y + t * (b.y - a.y), a.z + t * (b.z - a.z)};
        return q.normalized();
    }
    const double half = std::acos(cos_half);
    const double s = std::sin(half);
    const double wa = std::sin((1.0 - t) * half) / s;
    const double wb = std::sin(t * half) / s;
    Quat q{wa * a.w + wb * b.w, wa * a.x + wb * b.x,
           wa * a.y + wb * b.y, wa * a.z + wb * b.z};
    return q.normalized();
}

// SE(3) pose: x -> R x + t.
struct RigidTransform {
    Quat rotation;
    Vec3 translation;

    RigidTransform() = default;
    RigidTransform(const Quat& r, const Vec3& t) : rotation(r), translation(t) {}

    static RigidTransform identity() { return {}; }

    Vec3 transform_point(const Vec3& p) const { return rotation.rotate(p) + translation; }
    Vec3 transform_vector(const Vec3& v) const { return rotation.rotate(v); }

    // Composition: (a * b)(x) == a(b(x)).
    RigidTransform operator*(const RigidTransform& o) const {
        return {(rotation * o.rotation).normalized(),
                rotation.rotate(o.translation) + translation};
    }

    RigidTransform inverse() const {
        const Quat inv = rotation.conjugate();
        return {inv, -inv.rotate(translation)};
    }
};

struct Aabb {
    Vec3 lo{std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
    Vec3 hi{-std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity()};

    void expand(const Vec3& p) { lo = Vec3::min(lo, p); hi = Vec3::max(hi, p); }
    void expand(const Aabb& b) { lo = Vec3::min(lo, b.lo); hi = Vec3::max(hi, b.hi); }
    bool empty() const { return lo.x > hi.x || lo.y > hi.y || lo.z > hi.z; }
    Vec3 center() const { return (lo + hi) * 0.5; }
    Vec3 extent() const { return hi - lo; }
    double surface_area() const {
        if (empty()) return 0.0;
        const Vec3 e = extent();
        return 2.0 * (e.x * e.y + e.y * e.z + e.z * e.x);
    }
    bool contains(const Aabb& b) const {
        return lo.x <= b.lo.x && lo.y <= b.lo.y && lo.z <= b.lo.z &&
               hi.x >= b.hi.x && hi.y >= b.hi.y && hi.z >= b.hi.z;
    }
};

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

}  // namespace gsim
