#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "h3b/core.hpp"
#include "h3b/linalg.hpp"

// Geometry of hyperbolic 3-space.
//
// All internal computation happens in the hyperboloid chart: points are
// Minkowski 4-vectors with <x,x> = -1, ideal points are future null rays
// normalized to w = 1, hyperbolic planes are spacelike unit normals e with
// the plane being <x,e> = 0, and every isometry is a Lorentz matrix. In this
// chart reflections, plane sides and geodesic/plane intersections are plain
// linear algebra with no circle-versus-diameter case splits.
//
// The Poincare ball is the public chart: interior points are Euclidean
// vectors with |p| < 1, ideal points are unit vectors on the boundary
// sphere, optionally viewed through (theta, phi) angles.

namespace h3b {

inline double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

// Ideal point on the boundary sphere, stored as a unit 3-vector. The
// (theta, phi) angles are a derived view: theta is the azimuth in [0, 2 pi),
// phi the polar angle from +z in [0, pi].
class BoundaryPoint {
public:
    BoundaryPoint() : u_{1, 0, 0} {}
    explicit BoundaryPoint(const Vec3& u) : u_(u.normalized()) {}

    static BoundaryPoint from_angles(double theta, double phi) {
        return BoundaryPoint(Vec3{std::cos(theta) * std::sin(phi),
                                  std::sin(theta) * std::sin(phi), std::cos(phi)});
    }

    const Vec3& unit() const { return u_; }
    double theta() const {
        double t = std::atan2(u_.y, u_.x);
        if (t < 0) t += 2 * kPi;
        return t;
    }
    double phi() const { return std::acos(clamp_unit(u_.z)); }

    // future null 4-vector representing the ideal point
    Vec4 null4() const { return {u_, 1.0}; }

private:
    Vec3 u_;
};

// Chord-based evaluation: acos(dot) cannot resolve angles below ~1e-8 in
// double precision, while 2 asin(chord/2) is exact down to zero.
inline double great_circle_distance(const BoundaryPoint& a, const BoundaryPoint& b) {
    double chord = (a.unit() - b.unit()).norm();
    if (chord <= 1.0) return 2.0 * std::asin(0.5 * chord);
    double anti = (a.unit() + b.unit()).norm();
    if (anti <= 1.0) return kPi - 2.0 * std::asin(0.5 * anti);
    return std::acos(clamp_unit(a.unit().dot(b.unit())));
}

// Point of the open unit ball.
class InteriorPoint {
public:
    InteriorPoint() = default;
    explicit InteriorPoint(const Vec3& p) : p_(p) {
        if (p.norm() >= 1.0 - tolerances().boundary)
            throw Error(Errc::boundary_too_close,
                        "|p| = " + std::to_string(p.norm()));
    }

    const Vec3& ball() const { return p_; }

    Vec4 hyperboloid() const {
        double n = p_.norm2();
        return Vec4{p_ * 2.0, 1.0 + n} / (1.0 - n);
    }

    static InteriorPoint from_hyperboloid(const Vec4& x) {
        return InteriorPoint(x.spatial() / (1.0 + x.w));
    }

private:
    Vec3 p_;
};

inline Vec4 ball_to_hyperboloid(const InteriorPoint& p) { return p.hyperboloid(); }
inline InteriorPoint hyperboloid_to_ball(const Vec4& x) {
    return InteriorPoint::from_hyperboloid(x);
}

// Matches arcosh(-<x_p, x_q>) on the hyperboloid, evaluated through the
// ball-chart displacement so that small separations keep full resolution
// (arcosh saturates near 1 and cannot resolve distances below ~1e-8).
inline double hyperbolic_distance(const InteriorPoint& p, const InteriorPoint& q) {
    double delta =
        2.0 * (p.ball() - q.ball()).norm2() / ((1.0 - p.ball().norm2()) * (1.0 - q.ball().norm2()));
    if (delta < 1e-4) {
        // arcosh(1+x) = sqrt(2x) (1 - x/12 + 3x^2/160 - ...)
        double s = std::sqrt(2.0 * delta);
        return s * (1.0 - delta / 12.0 + 3.0 * delta * delta / 160.0);
    }
    return std::acosh(1.0 + delta);
}

enum class Side { Negative, On, Positive };

// Totally geodesic plane <x,e> = 0 with a fixed orientation: the Positive
// side is where <x,e> > 0. In the ball it renders as a disk through the
// origin (e.w = 0) or as a spherical cap orthogonal to the boundary sphere.
class HyperbolicPlane {
public:
    HyperbolicPlane() : e_{1, 0, 0, 0} {}
    explicit HyperbolicPlane(const Vec4& e) : e_(e) {
        double n2 = mdot(e, e);
        if (n2 <= 0)
            throw Error(Errc::invalid_spec, "plane normal must be spacelike");
        e_ = e / std::sqrt(n2);
    }

    // Euclidean plane through the origin with unit normal n, oriented so the
    // Positive side is the n side.
    static HyperbolicPlane through_origin(const Vec3& n) {
        return HyperbolicPlane(Vec4{n.normalized(), 0.0});
    }

    // Sphere-type plane: Euclidean sphere with center c, radius r, |c|^2 = 1 + r^2.
    // Positive side faces away from the sphere center.
    static HyperbolicPlane from_sphere(const Vec3& c, double r) {
        return HyperbolicPlane(Vec4{-c, -1.0} / r);
    }

    // Plane through three ideal points.
    static HyperbolicPlane through_boundary_points(const BoundaryPoint& b1,
                                                   const BoundaryPoint& b2,
                                                   const BoundaryPoint& b3) {
        Vec3 a = (b1.unit() - b3.unit()).cross(b2.unit() - b3.unit());
        double b = b3.unit().dot(a);
        return HyperbolicPlane(Vec4{a, b});
    }

    // Takes e as a unit spacelike normal without renormalizing. Needed for
    // deep isometry images, whose Minkowski norm is 1 by construction but
    // cannot be recomputed: it is a unit difference of enormous terms.
    static HyperbolicPlane trusted_unit(const Vec4& e) {
        HyperbolicPlane p;
        p.e_ = e;
        return p;
    }

    const Vec4& normal() const { return e_; }
    HyperbolicPlane flipped() const {
        HyperbolicPlane p = *this;
        p.e_ = -p.e_;
        return p;
    }

    bool is_through_origin() const { return std::abs(e_.w) < tolerances().unit; }

    // Euclidean sphere rendering; only valid when !is_through_origin().
    Vec3 sphere_center() const { return e_.spatial() / e_.w; }
    double sphere_radius() const { return 1.0 / std::abs(e_.w); }

    // signed value <x,e> for ideal points; the sign tells the side of the
    // plane's boundary circle the ideal point is on
    double boundary_value(const BoundaryPoint& b) const { return mdot(b.null4(), e_); }

private:
    Vec4 e_;
};

inline Side plane_side(const HyperbolicPlane& plane, const InteriorPoint& p) {
    double v = mdot(p.hyperboloid(), plane.normal());
    if (std::abs(v) <= tolerances().on_plane) return Side::On;
    return v > 0 ? Side::Positive : Side::Negative;
}

// d(x, plane) = arcsinh |<x,e>|
inline double distance_to_plane(const HyperbolicPlane& plane, const InteriorPoint& p) {
    return std::asinh(std::abs(mdot(p.hyperboloid(), plane.normal())));
}

// Directed geodesic, represented by its ordered pair of ideal endpoints.
// Arclength parametrization: x(t) = (e^-t B_s + e^t B_e) / sqrt(2 s) with
// B_s, B_e the null endpoint vectors and s = -<B_s, B_e>; t -> -inf is the
// start, t -> +inf the end.
class DirectedGeodesic {
public:
    DirectedGeodesic(const BoundaryPoint& start, const BoundaryPoint& end)
        : start_(start), end_(end) {
        if (great_circle_distance(start, end) < tolerances().separation)
            throw Error(Errc::coincident_points, "geodesic endpoints coincide");
        bs_ = start_.null4();
        be_ = end_.null4();
        s_ = -mdot(bs_, be_);
    }

    const BoundaryPoint& start() const { return start_; }
    const BoundaryPoint& end() const { return end_; }
    const Vec4& start_null() const { return bs_; }
    const Vec4& end_null() const { return be_; }
    double endpoint_product() const { return s_; }

    Vec4 point4_at(double t) const {
        return (std::exp(-t) * bs_ + std::exp(t) * be_) / std::sqrt(2.0 * s_);
    }
    InteriorPoint point_at(double t) const { return hyperboloid_to_ball(point4_at(t)); }

    // unit spacelike tangent in the direction of travel
    Vec4 tangent_at(double t) const {
        return (-std::exp(-t) * bs_ + std::exp(t) * be_) / std::sqrt(2.0 * s_);
    }

    // parameter of the orthogonal projection of a hyperboloid point onto the
    // geodesic; exact for points on the geodesic
    double param_of(const Vec4& x) const {
        return std::log(-mdot(x, bs_) * std::sqrt(2.0 / s_));
    }
    double param_of(const InteriorPoint& p) const { return param_of(p.hyperboloid()); }

    DirectedGeodesic reversed() const { return {end_, start_}; }

private:
    BoundaryPoint start_, end_;
    Vec4 bs_, be_;
    double s_;
};

// cosh of the distance from x to the full geodesic
inline double cosh_distance_to_geodesic(const DirectedGeodesic& g, const Vec4& x) {
    double a = -mdot(x, g.start_null());
    double b = -mdot(x, g.end_null());
    return std::sqrt(std::max(1.0, 2.0 * a * b / g.endpoint_product()));
}

// Lorentz matrix acting on all geometric entities; parity tracks whether the
// map reverses orientation (odd number of reflections).
class Isometry {
public:
    Isometry() : l_(Mat4::identity()), reversing_(false) {}
    Isometry(const Mat4& l, bool orientation_reversing)
        : l_(l), reversing_(orientation_reversing) {}

    static Isometry reflection(const HyperbolicPlane& p) {
        return {lorentz_reflection(p.normal()), true};
    }

    const Mat4& matrix() const { return l_; }
    bool orientation_reversing() const { return reversing_; }

    Isometry operator*(const Isometry& o) const {
        return {l_ * o.l_, reversing_ != o.reversing_};
    }

    Isometry inverse() const {
        // L^-1 = eta L^T eta
        Mat4 t = l_.transposed();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) t.m[i][j] *= metric_sign(i) * metric_sign(j);
        return {t, reversing_};
    }

    Vec4 apply(const Vec4& v) const { return l_.apply(v); }
    InteriorPoint apply(const InteriorPoint& p) const {
        return hyperboloid_to_ball(l_.apply(p.hyperboloid()));
    }
    BoundaryPoint apply(const BoundaryPoint& b) const {
        Vec4 n = l_.apply(b.null4());
        return BoundaryPoint(n.spatial() / n.w);
    }
    DirectedGeodesic apply(const DirectedGeodesic& g) const {
        return {apply(g.start()), apply(g.end())};
    }
    HyperbolicPlane apply(const HyperbolicPlane& p) const {
        return HyperbolicPlane(l_.apply(p.normal()));
    }

    double defect() const { return lorentz_defect(l_); }
    Isometry renormalized() const { return {lorentz_renormalize(l_), reversing_}; }

private:
    Mat4 l_;
    bool reversing_;
};

inline InteriorPoint reflect(const HyperbolicPlane& plane, const InteriorPoint& p) {
    Vec4 x = p.hyperboloid();
    return hyperboloid_to_ball(x - 2.0 * mdot(x, plane.normal()) * plane.normal());
}

inline BoundaryPoint reflect(const HyperbolicPlane& plane, const BoundaryPoint& b) {
    Vec4 x = b.null4();
    Vec4 r = x - 2.0 * mdot(x, plane.normal()) * plane.normal();
    return BoundaryPoint(r.spatial() / r.w);
}

inline DirectedGeodesic reflect(const HyperbolicPlane& plane, const DirectedGeodesic& g) {
    return {reflect(plane, g.start()), reflect(plane, g.end())};
}

inline HyperbolicPlane reflect(const HyperbolicPlane& plane, const HyperbolicPlane& f) {
    Vec4 e = f.normal();
    return HyperbolicPlane(e - 2.0 * mdot(e, plane.normal()) * plane.normal());
}

// Directed geodesic through two interior points, oriented from p towards q.
inline DirectedGeodesic geodesic_through(const InteriorPoint& p, const InteriorPoint& q) {
    Vec4 xp = p.hyperboloid(), xq = q.hyperboloid();
    double c = -mdot(xp, xq);  // cosh of the distance
    if (c - 1.0 < 1e-14)
        throw Error(Errc::coincident_points, "geodesic through coincident points");
    Vec4 v = (xq + mdot(xq, xp) * xp) / std::sqrt(c * c - 1.0);
    Vec4 nf = xp + v, nb = xp - v;
    return {BoundaryPoint(nb.spatial() / nb.w), BoundaryPoint(nf.spatial() / nf.w)};
}

// Geodesic through p with the given ball-chart direction at p. The tangent
// is pushed forward to the hyperboloid chart analytically.
inline DirectedGeodesic geodesic_from_seed(const InteriorPoint& p, const Vec3& direction) {
    double dn = direction.norm();
    if (dn < 1e-300) throw Error(Errc::invalid_spec, "zero seed direction");
    Vec3 d = direction / dn;
    const Vec3& b = p.ball();
    double n = b.norm2(), big_d = 1.0 - n, pd = b.dot(d);
    Vec3 spat = d * (2.0 / big_d) + b * (4.0 * pd / (big_d * big_d));
    Vec4 v{spat, 4.0 * pd / (big_d * big_d)};
    v = v / std::sqrt(mdot(v, v));
    Vec4 x = p.hyperboloid();
    Vec4 nf = x + v, nb = x - v;
    return {BoundaryPoint(nb.spatial() / nb.w), BoundaryPoint(nf.spatial() / nf.w)};
}

struct GeodesicPlaneHit {
    InteriorPoint point;
    double t;  // arclength parameter along the geodesic
};

// A geodesic meets a hyperbolic plane at most once. Returns the transversal
// crossing if the endpoint values change sign; none if the geodesic stays
// clear on one side. A near miss below the on-plane tolerance without a sign
// change is a grazing configuration and is reported as an error.
inline std::optional<GeodesicPlaneHit> geodesic_plane_intersection(
    const DirectedGeodesic& g, const HyperbolicPlane& plane) {
    double a = mdot(g.start_null(), plane.normal());
    double b = mdot(g.end_null(), plane.normal());
    if (a * b < 0.0) {
        double t = 0.5 * std::log(-a / b);
        return GeodesicPlaneHit{g.point_at(t), t};
    }
    double fmin = std::sqrt(2.0 * std::abs(a * b) / g.endpoint_product());
    if (fmin < tolerances().on_plane)
        throw Error(Errc::tangential_contact,
                    "geodesic grazes the plane (min residual " + std::to_string(fmin) + ")");
    return std::nullopt;
}

// Interior dihedral angle between two intersecting planes, measured inside
// the wedge that contains interior_ref.
inline double dihedral_angle(const HyperbolicPlane& p1, const HyperbolicPlane& p2,
                             const InteriorPoint& interior_ref) {
    Vec4 x = interior_ref.hyperboloid();
    Vec4 e1 = mdot(x, p1.normal()) >= 0 ? p1.normal() : -p1.normal();
    Vec4 e2 = mdot(x, p2.normal()) >= 0 ? p2.normal() : -p2.normal();
    double c = mdot(e1, e2);
    if (std::abs(c) >= 1.0 - 1e-12)
        throw Error(Errc::non_intersecting_planes,
                    "|<e1,e2>| = " + std::to_string(std::abs(c)));
    return std::acos(clamp_unit(-c));
}

}  // namespace h3b
