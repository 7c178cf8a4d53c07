#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "h3b/code.hpp"
#include "h3b/core.hpp"
#include "h3b/geometry.hpp"
#include "h3b/polyhedron.hpp"

// The billiard itself: hits, the bounce map, bi-directional trajectory
// tracing, pointed trajectories with their codes, and the two metrics on
// pointed geodesics (endpoint metric d_G and Hausdorff metric d_H).

namespace h3b {

struct HitEvent {
    int face_label = 0;
    InteriorPoint point;
    double t = 0;        // arclength parameter along the incident geodesic
    Vec4 inward_normal;  // unit tangent at the hit point, pointing inside
};

// One geodesic segment of a trajectory between consecutive face hits. The
// entry is absent only when the segment was seeded directly and could not
// be closed backwards.
struct BaseArc {
    DirectedGeodesic geodesic;
    std::optional<HitEvent> entry;
    HitEvent exit;

    double entry_param() const {
        if (!entry) throw Error(Errc::invalid_spec, "base arc has no entry hit");
        return entry->t;
    }
};

// First face hit of the geodesic after parameter t_min. The hit must land
// on the actual boundary: candidate plane crossings that lie outside the
// polyhedron are skipped. A hit closer than the edge tolerance to a second
// face plane is rejected as an edge/vertex hit.
inline HitEvent first_hit(const IdealPolyhedron& poly, const DirectedGeodesic& g,
                          double t_min) {
    struct Crossing {
        int label;
        double t;
    };
    std::vector<Crossing> crossings;
    for (const Face& f : poly.faces()) {
        double a = mdot(g.start_null(), f.plane.normal());
        double b = mdot(g.end_null(), f.plane.normal());
        if (a > 0 && b < 0) {
            double t = 0.5 * std::log(-a / b);
            if (t > t_min) crossings.push_back({f.label, t});
        }
    }
    std::sort(crossings.begin(), crossings.end(),
              [](const Crossing& a, const Crossing& b) { return a.t < b.t; });

    for (const Crossing& c : crossings) {
        Vec4 x = g.point4_at(c.t);
        std::vector<int> close;
        bool on_boundary = true;
        for (const Face& f : poly.faces()) {
            if (f.label == c.label) continue;
            double v = mdot(x, f.plane.normal());
            if (v < -tolerances().edge) {
                on_boundary = false;
                break;
            }
            if (std::abs(v) <= tolerances().edge) close.push_back(f.label);
        }
        if (!on_boundary) continue;
        if (!close.empty()) {
            close.push_back(c.label);
            std::sort(close.begin(), close.end());
            throw EdgeOrVertexHitError(close, c.t);
        }
        return HitEvent{c.label, hyperboloid_to_ball(x), c.t,
                        poly.face(c.label).plane.normal()};
    }
    throw Error(Errc::no_forward_hit, "geodesic leaves through the ideal boundary");
}

// The bounce map: the reflection of the incident geodesic in the face that
// was hit.
inline DirectedGeodesic bounce(const IdealPolyhedron& poly, const DirectedGeodesic& g,
                               const HitEvent& hit) {
    return reflect(poly.face(hit.face_label).plane, g);
}

enum class TraceTermination { complete, edge_or_vertex, ideal_exit };

inline const char* termination_name(TraceTermination t) {
    switch (t) {
        case TraceTermination::complete: return "complete";
        case TraceTermination::edge_or_vertex: return "edge-or-vertex";
        case TraceTermination::ideal_exit: return "ideal-exit";
    }
    return "?";
}

// A window of consecutive base arcs with a distinguished arc at index 0.
// symbol(n) is the label of the face terminating arc n, so consecutive
// arcs satisfy arc(n+1).geodesic == reflect(plane(symbol(n)), arc(n).geodesic).
class PointedTrajectory {
public:
    PointedTrajectory(std::vector<BaseArc> arcs, int n_back, int n_fwd,
                      TraceTermination back, TraceTermination fwd)
        : arcs_(std::move(arcs)), n_back_(n_back), n_fwd_(n_fwd), back_(back), fwd_(fwd) {}

    int n_back() const { return n_back_; }
    int n_fwd() const { return n_fwd_; }
    int arc_count() const { return static_cast<int>(arcs_.size()); }
    bool has(int n) const { return n >= -n_back_ && n <= n_fwd_; }

    const BaseArc& arc(int n) const {
        if (!has(n)) throw Error(Errc::point_out_of_range, "arc index " + std::to_string(n));
        return arcs_[static_cast<std::size_t>(n + n_back_)];
    }
    const BaseArc& base() const { return arc(0); }
    int symbol(int n) const { return arc(n).exit.face_label; }

    TraceTermination forward_termination() const { return fwd_; }
    TraceTermination backward_termination() const { return back_; }

    // re-pointing without extension; callers use tau() for the general case
    PointedTrajectory repointed(int s) const {
        if (!has(s)) throw Error(Errc::point_out_of_range, "repoint by " + std::to_string(s));
        return {arcs_, n_back_ + s, n_fwd_ - s, back_, fwd_};
    }

private:
    std::vector<BaseArc> arcs_;
    int n_back_, n_fwd_;
    TraceTermination back_, fwd_;
};

namespace detail {

struct RawHit {
    DirectedGeodesic geo;  // geodesic the hit was found on
    HitEvent hit;
};

// walks first_hit/bounce until `count` hits are collected or the trajectory
// degenerates
inline std::pair<std::vector<RawHit>, TraceTermination> walk(const IdealPolyhedron& poly,
                                                             DirectedGeodesic g,
                                                             double t_start, int count) {
    std::vector<RawHit> hits;
    double t_min = t_start;
    for (int i = 0; i < count; ++i) {
        try {
            HitEvent h = first_hit(poly, g, t_min);
            hits.push_back({g, h});
            DirectedGeodesic next = reflect(poly.face(h.face_label).plane, g);
            t_min = next.param_of(g.point4_at(h.t)) + 1e-12;
            g = next;
        } catch (const EdgeOrVertexHitError&) {
            return {hits, TraceTermination::edge_or_vertex};
        } catch (const Error& e) {
            if (e.code() != Errc::no_forward_hit) throw;
            return {hits, TraceTermination::ideal_exit};
        }
    }
    return {hits, TraceTermination::complete};
}

inline HitEvent on_new_geodesic(const HitEvent& h, const DirectedGeodesic& old_geo,
                                const DirectedGeodesic& new_geo) {
    HitEvent r = h;
    r.t = new_geo.param_of(old_geo.point4_at(h.t));
    return r;
}

}  // namespace detail

// Traces the trajectory whose arc 0 lies on g0 and contains the point at
// parameter t_seed. This is the exact-geodesic entry point; trace() wraps
// it for seed-point-plus-direction input.
inline PointedTrajectory trace_geodesic(const IdealPolyhedron& poly,
                                        const DirectedGeodesic& g0, double t_seed,
                                        int n_back, int n_fwd) {
    if (contains(poly, g0.point_at(t_seed)).kind != Containment::Kind::Inside)
        throw Error(Errc::invalid_spec, "seed point is not strictly inside");

    auto [fwd_hits, fwd_term] = detail::walk(poly, g0, t_seed, n_fwd + 1);
    DirectedGeodesic gr = g0.reversed();
    auto [bwd_hits, bwd_term] = detail::walk(poly, gr, -t_seed, n_back + 1);

    if (fwd_hits.empty() || bwd_hits.empty()) {
        TraceTermination t = fwd_hits.empty() ? fwd_term : bwd_term;
        if (t == TraceTermination::edge_or_vertex)
            throw EdgeOrVertexHitError({}, t_seed);
        throw Error(Errc::no_forward_hit, "seed arc never meets a face");
    }

    int nf = static_cast<int>(fwd_hits.size()) - 1;
    int nb = static_cast<int>(bwd_hits.size()) - 1;

    std::vector<BaseArc> arcs;
    arcs.reserve(static_cast<std::size_t>(nb + nf + 1));
    // backward arcs -nb..-1: forward-time geodesic is the reversal of the
    // reversed-chain geodesic after the m-th backward reflection
    for (int m = nb; m >= 1; --m) {
        const detail::RawHit& exit_hit = bwd_hits[static_cast<std::size_t>(m - 1)];
        const detail::RawHit& entry_hit = bwd_hits[static_cast<std::size_t>(m)];
        DirectedGeodesic rev_m = entry_hit.geo;  // reversed-chain geodesic m
        DirectedGeodesic fwd_geo = rev_m.reversed();
        HitEvent exit{exit_hit.hit.face_label, exit_hit.hit.point,
                      -rev_m.param_of(exit_hit.geo.point4_at(exit_hit.hit.t)),
                      exit_hit.hit.inward_normal};
        HitEvent entry{entry_hit.hit.face_label, entry_hit.hit.point,
                       -entry_hit.hit.t, entry_hit.hit.inward_normal};
        arcs.push_back(BaseArc{fwd_geo, entry, exit});
    }
    // arc 0
    {
        HitEvent entry{bwd_hits[0].hit.face_label, bwd_hits[0].hit.point,
                       -bwd_hits[0].hit.t, bwd_hits[0].hit.inward_normal};
        arcs.push_back(BaseArc{g0, entry, fwd_hits[0].hit});
    }
    // forward arcs 1..nf
    for (int n = 1; n <= nf; ++n) {
        const detail::RawHit& entry_hit = fwd_hits[static_cast<std::size_t>(n - 1)];
        const detail::RawHit& exit_hit = fwd_hits[static_cast<std::size_t>(n)];
        HitEvent entry = detail::on_new_geodesic(entry_hit.hit, entry_hit.geo, exit_hit.geo);
        arcs.push_back(BaseArc{exit_hit.geo, entry, exit_hit.hit});
    }

    return PointedTrajectory(std::move(arcs), nb, nf,
                             nb == n_back ? TraceTermination::complete : bwd_term,
                             nf == n_fwd ? TraceTermination::complete : fwd_term);
}

// Traces the trajectory through `seed` with the given initial direction,
// n_back arcs into the past and n_fwd into the future. Arc 0 contains the
// seed. Truncated directions are reported through the termination flags;
// the trajectory always consists of complete (entry+exit) arcs.
inline PointedTrajectory trace(const IdealPolyhedron& poly, const InteriorPoint& seed,
                               const Vec3& direction, int n_back, int n_fwd) {
    DirectedGeodesic g0 = geodesic_from_seed(seed, direction);
    return trace_geodesic(poly, g0, g0.param_of(seed), n_back, n_fwd);
}

// Re-points the trajectory by s arcs (positive: towards the future),
// extending it by tracing when the window does not already cover the new
// base arc.
inline PointedTrajectory tau(const IdealPolyhedron& poly, const PointedTrajectory& pt,
                             int s = 1) {
    if (pt.has(s)) return pt.repointed(s);
    // extend by re-tracing the base arc's exact geodesic with a larger window
    int need_fwd = std::max(pt.n_fwd(), s);
    int need_back = std::max(pt.n_back(), -s);
    const BaseArc& a0 = pt.base();
    double mid = 0.5 * (a0.entry_param() + a0.exit.t);
    PointedTrajectory wide = trace_geodesic(poly, a0.geodesic, mid, need_back, need_fwd);
    return wide.repointed(s);
}

// The code of a pointed trajectory: exit labels of the arcs, point before
// the base symbol.
inline Word extract_code(const PointedTrajectory& pt) {
    Word w;
    for (int n = -pt.n_back(); n <= pt.n_fwd(); ++n) w.symbols.push_back(pt.symbol(n));
    w.point = pt.n_back();
    return w;
}

// specular consistency at the hit between arcs n and n+1: angle of the
// incoming tangent against the inward normal vs the outgoing one
inline double specular_angle_residual(const IdealPolyhedron& poly,
                                      const PointedTrajectory& pt, int n) {
    const BaseArc& in = pt.arc(n);
    const BaseArc& out = pt.arc(n + 1);
    const Vec4& e = poly.face(in.exit.face_label).plane.normal();
    Vec4 v_in = in.geodesic.tangent_at(in.exit.t);
    Vec4 v_out = out.geodesic.tangent_at(out.entry_param());
    double angle_in = std::acos(clamp_unit(-mdot(v_in, e)));
    double angle_out = std::acos(clamp_unit(mdot(v_out, e)));
    return std::abs(angle_in - angle_out);
}

// ---- metrics on pointed geodesics ----

inline double d_G(const DirectedGeodesic& a, const DirectedGeodesic& b) {
    return std::max(great_circle_distance(a.start(), b.start()),
                    great_circle_distance(a.end(), b.end()));
}

inline double d_G(const PointedTrajectory& a, const PointedTrajectory& b) {
    return d_G(a.base().geodesic, b.base().geodesic);
}

namespace detail {

// exact distance from a hyperboloid point to a geodesic segment
inline double distance_to_segment(const Vec4& x, const DirectedGeodesic& g, double t0,
                                  double t1) {
    double a = -mdot(x, g.start_null());
    double b = -mdot(x, g.end_null());
    double t = std::clamp(0.5 * std::log(a / b), t0, t1);
    double c = (std::exp(-t) * a + std::exp(t) * b) / std::sqrt(2.0 * g.endpoint_product());
    return std::acosh(std::max(1.0, c));
}

inline double directed_hausdorff(const DirectedGeodesic& ga, double a0, double a1,
                                 const DirectedGeodesic& gb, double b0, double b1,
                                 double tol) {
    int m = 16;
    double prev = -1;
    for (;;) {
        double worst = 0;
        for (int i = 0; i <= m; ++i) {
            double t = a0 + (a1 - a0) * i / m;
            worst = std::max(worst, distance_to_segment(ga.point4_at(t), gb, b0, b1));
        }
        if (prev >= 0 && std::abs(worst - prev) < tol) return worst;
        prev = worst;
        if (m >= (1 << 14)) return worst;
        m *= 2;
    }
}

}  // namespace detail

// Two-sided Hausdorff distance between base arcs as compact sets in the
// hyperbolic metric. Point-to-segment distances are closed-form; the outer
// supremum is adaptively sampled and refined until it moves less than tol.
inline double d_H(const BaseArc& a, const BaseArc& b,
                  double tol = tolerances().hausdorff) {
    double a0 = a.entry_param(), a1 = a.exit.t;
    double b0 = b.entry_param(), b1 = b.exit.t;
    return std::max(detail::directed_hausdorff(a.geodesic, a0, a1, b.geodesic, b0, b1, tol),
                    detail::directed_hausdorff(b.geodesic, b0, b1, a.geodesic, a0, a1, tol));
}

inline double d_H(const PointedTrajectory& a, const PointedTrajectory& b,
                  double tol = tolerances().hausdorff) {
    return d_H(a.base(), b.base(), tol);
}

}  // namespace h3b
