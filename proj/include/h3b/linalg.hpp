#pragma once

#include <array>
#include <cmath>

namespace h3b {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double a) const { return {x * a, y * a, z * a}; }
    Vec3 operator/(double a) const { return {x / a, y / a, z / a}; }
    Vec3 operator-() const { return {-x, -y, -z}; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
    Vec3 normalized() const { return *this / norm(); }
};

inline Vec3 operator*(double a, const Vec3& v) { return v * a; }

// Minkowski 4-vector, signature (+,+,+,-); w is the timelike component.
struct Vec4 {
    double x = 0, y = 0, z = 0, w = 0;

    Vec4() = default;
    Vec4(double x_, double y_, double z_, double w_) : x(x_), y(y_), z(z_), w(w_) {}
    Vec4(const Vec3& s, double w_) : x(s.x), y(s.y), z(s.z), w(w_) {}

    Vec3 spatial() const { return {x, y, z}; }

    Vec4 operator+(const Vec4& o) const { return {x + o.x, y + o.y, z + o.z, w + o.w}; }
    Vec4 operator-(const Vec4& o) const { return {x - o.x, y - o.y, z - o.z, w - o.w}; }
    Vec4 operator*(double a) const { return {x * a, y * a, z * a, w * a}; }
    Vec4 operator/(double a) const { return {x / a, y / a, z / a, w / a}; }
    Vec4 operator-() const { return {-x, -y, -z, -w}; }
};

inline Vec4 operator*(double a, const Vec4& v) { return v * a; }

// <a,b> = ax bx + ay by + az bz - aw bw
inline double mdot(const Vec4& a, const Vec4& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z - a.w * b.w;
}

struct Mat4 {
    // row-major
    std::array<std::array<double, 4>, 4> m{};

    static Mat4 identity() {
        Mat4 r;
        for (int i = 0; i < 4; ++i) r.m[i][i] = 1.0;
        return r;
    }

    Vec4 apply(const Vec4& v) const {
        std::array<double, 4> in{v.x, v.y, v.z, v.w}, out{};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) out[i] += m[i][j] * in[j];
        return {out[0], out[1], out[2], out[3]};
    }

    Mat4 operator*(const Mat4& o) const {
        Mat4 r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double s = 0;
                for (int l = 0; l < 4; ++l) s += m[i][l] * o.m[l][j];
                r.m[i][j] = s;
            }
        return r;
    }

    Mat4 transposed() const {
        Mat4 r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) r.m[i][j] = m[j][i];
        return r;
    }
};

inline double metric_sign(int i) { return i == 3 ? -1.0 : 1.0; }

// Reflection in the plane <x,e> = 0 for a spacelike unit e:
// sigma_e(x) = x - 2 <x,e> e, as a matrix  I - 2 e (eta e)^T.
inline Mat4 lorentz_reflection(const Vec4& e) {
    Mat4 r = Mat4::identity();
    std::array<double, 4> ev{e.x, e.y, e.z, e.w};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.m[i][j] -= 2.0 * ev[i] * metric_sign(j) * ev[j];
    return r;
}

// max |L^T eta L - eta|, zero for an exact Lorentz matrix
inline double lorentz_defect(const Mat4& L) {
    double worst = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0;
            for (int l = 0; l < 4; ++l) s += L.m[l][i] * metric_sign(l) * L.m[l][j];
            double target = (i == j) ? metric_sign(i) : 0.0;
            worst = std::max(worst, std::abs(s - target));
        }
    return worst;
}

// Minkowski Gram-Schmidt on the columns; the timelike column is fixed first
// since it dominates deep products.
inline Mat4 lorentz_renormalize(const Mat4& L) {
    std::array<Vec4, 4> col;
    for (int j = 0; j < 4; ++j) col[j] = {L.m[0][j], L.m[1][j], L.m[2][j], L.m[3][j]};

    const int order[4] = {3, 0, 1, 2};
    for (int a = 0; a < 4; ++a) {
        int j = order[a];
        for (int b = 0; b < a; ++b) {
            int i = order[b];
            double proj = mdot(col[j], col[i]) * metric_sign(i);
            col[j] = col[j] - proj * col[i];
        }
        double n2 = mdot(col[j], col[j]) * metric_sign(j);
        col[j] = col[j] / std::sqrt(n2);
    }

    Mat4 r;
    for (int j = 0; j < 4; ++j) {
        r.m[0][j] = col[j].x;
        r.m[1][j] = col[j].y;
        r.m[2][j] = col[j].z;
        r.m[3][j] = col[j].w;
    }
    return r;
}

}  // namespace h3b
