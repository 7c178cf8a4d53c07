#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "h3b/billiard.hpp"
#include "h3b/code.hpp"
#include "h3b/core.hpp"
#include "h3b/geometry.hpp"
#include "h3b/polyhedron.hpp"

// Unfolding of billiard trajectories: instead of reflecting the geodesic at
// each face, reflect the polyhedron, so the trajectory straightens into a
// single geodesic crossing a chain of reflected face planes. The chain's
// boundary circles on the sphere at infinity shrink onto the ideal endpoint
// of that geodesic; the circle center with the circle radius as an error
// bound estimates it. Running the chain along a symbol sequence instead of
// a traced trajectory turns a code back into geometry.

namespace h3b {

struct BoundaryCircle {
    Vec3 cap_center;     // pole of the spherical cap cut off away from the base
    double radius = 1;   // Euclidean radius of the boundary circle
    Vec3 circle_center;  // Euclidean center of the circle in R^3
};

inline BoundaryCircle boundary_circle(const HyperbolicPlane& plane) {
    Vec3 m = plane.normal().spatial();
    double d4 = plane.normal().w;
    BoundaryCircle c;
    c.radius = 1.0 / std::sqrt(1.0 + d4 * d4);
    c.cap_center = m / m.norm();
    c.circle_center = m * (d4 / (1.0 + d4 * d4));
    return c;
}

struct UnfoldStep {
    int index = 0;            // 1, 2, ... within its direction
    int reflecting_label = 0; // face label whose image is the reflecting plane
    HyperbolicPlane plane;    // oriented with the Positive side away from the base
    Isometry cumulative;      // maps the original polyhedron onto copy j
    BoundaryCircle circle;
    double distance_to_base = 0;
    // <e_j, e_{j+1}> of this plane against the previous one, evaluated in the
    // local frame where both are O(1); |inner| < 1 means the planes share an
    // edge, |inner| > 1 means they are disjoint. NaN on the first step.
    double inner_with_prev = std::numeric_limits<double>::quiet_NaN();
    // index of an earlier step with the same reflecting plane (0 = none);
    // a plane revisited means the symbols pivoted all the way around an edge
    int repeat_of = 0;

    UnfoldStep(int idx, int label, const HyperbolicPlane& p, const Isometry& iso,
               const BoundaryCircle& c, double dist)
        : index(idx), reflecting_label(label), plane(p), cumulative(iso), circle(c),
          distance_to_base(dist) {}
};

struct UnfoldChain {
    InteriorPoint base;
    std::vector<UnfoldStep> forward;   // steps 1, 2, ... (symbols at 0, 1, ...)
    std::vector<UnfoldStep> backward;  // steps 1, 2, ... (symbols at -1, -2, ...)
    Word source;
};

enum class ChainDirection { forward, backward };

namespace detail {

inline void push_step(std::vector<UnfoldStep>& steps, const IdealPolyhedron& poly,
                      Isometry& cumulative, int label, const Vec4& base4) {
    const HyperbolicPlane& face_plane = poly.face(label).plane;
    // The image normal is unit by construction; renormalizing it here would
    // subtract enormous near-equal terms, so it is taken on trust. The same
    // holds for the cumulative matrix itself: reflection products keep full
    // relative accuracy, while a Gram correction against the Minkowski form
    // cancels catastrophically once the entries grow, so none is applied.
    Vec4 e = cumulative.matrix().apply(face_plane.normal());
    if (mdot(base4, e) > 0) e = -e;
    HyperbolicPlane image = HyperbolicPlane::trusted_unit(e);

    double inner = std::numeric_limits<double>::quiet_NaN();
    if (!steps.empty()) {
        // relative position of consecutive planes, pulled back to the frame
        // of the previous reflection where both normals are O(1)
        const HyperbolicPlane& prev_face = poly.face(steps.back().reflecting_label).plane;
        inner = mdot(prev_face.normal(), reflect(prev_face, face_plane).normal());
    }

    cumulative = cumulative * Isometry::reflection(face_plane);
    BoundaryCircle circle = boundary_circle(image);
    if (circle.radius < 1e-14)
        throw Error(Errc::precision_exhausted,
                    "boundary circle radius below double precision at depth " +
                        std::to_string(steps.size() + 1));
    steps.emplace_back(static_cast<int>(steps.size()) + 1, label, image, cumulative,
                       circle, std::asinh(std::abs(mdot(base4, e))));
    steps.back().inner_with_prev = inner;
}

// Marks steps whose reflecting plane repeats an earlier one. Repeats only
// arise when the symbols pivot around one edge pencil, so a window of
// 2 max(lambda) + 2 steps suffices; the comparison is done in the local
// frame (relative reflection products of O(1) face normals), which stays
// well conditioned at any chain depth.
inline void mark_repeats(std::vector<UnfoldStep>& steps, const IdealPolyhedron& poly) {
    int window = 2 * poly.max_lambda() + 2;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const Vec4& ei = poly.face(steps[i].reflecting_label).plane.normal();
        Mat4 rel = Mat4::identity();
        for (std::size_t j = i + 1; j < steps.size() && j <= i + static_cast<std::size_t>(window);
             ++j) {
            rel = rel * lorentz_reflection(
                            poly.face(steps[j - 1].reflecting_label).plane.normal());
            Vec4 f = rel.apply(poly.face(steps[j].reflecting_label).plane.normal());
            auto close = [](const Vec4& u, const Vec4& v) {
                return std::abs(u.x - v.x) < 1e-9 && std::abs(u.y - v.y) < 1e-9 &&
                       std::abs(u.z - v.z) < 1e-9 && std::abs(u.w - v.w) < 1e-9;
            };
            if ((close(f, ei) || close(f, -ei)) && steps[j].repeat_of == 0)
                steps[j].repeat_of = steps[i].index;
        }
    }
}

}  // namespace detail

// Unfolds the polyhedron along a pointed word: forward steps follow the
// symbols right of the point, backward steps the symbols left of it. The
// cumulative isometry after j forward steps is the product of the first j
// face reflections; reflecting planes are its images of the face planes.
inline UnfoldChain unfold_along(const IdealPolyhedron& poly, const Word& w,
                                const InteriorPoint& base) {
    if (auto v = validate_word(w, poly))
        throw Error(Errc::invalid_word, v->to_string());
    UnfoldChain chain;
    chain.base = base;
    chain.source = w;
    Vec4 base4 = base.hyperboloid();

    Isometry fwd;
    for (long n = 0; n <= w.max_pos(); ++n)
        detail::push_step(chain.forward, poly, fwd, w.at(n), base4);
    Isometry bwd;
    for (long n = -1; n >= w.min_pos(); --n)
        detail::push_step(chain.backward, poly, bwd, w.at(n), base4);
    detail::mark_repeats(chain.forward, poly);
    detail::mark_repeats(chain.backward, poly);
    return chain;
}

struct NestingReport {
    bool nested = true;            // no retreating pair and no repeated plane
    std::vector<double> radii;     // boundary circle radii per step
    std::vector<double> distances; // d(base, p_j) per step
    int disjoint_pairs = 0;        // consecutive planes strictly separated
    int crossing_pairs = 0;        // consecutive planes sharing an edge (pivot)
    int retreat_pairs = 0;         // consecutive planes ordered against the march
    int repeated_planes = 0;       // a reflecting plane occurs twice
};

// Checks that the chain marches off monotonically. Consecutive planes of a
// real unfolding either are disjoint with the farther one beyond the nearer
// (the strictly nested case) or intersect along an edge image and pivot
// around it; what must never happen is a pair ordered backwards or the same
// plane appearing twice, which is how impossible symbol sequences (for
// example alternations past the dihedral order) manifest.
inline NestingReport verify_nesting(const UnfoldChain& chain,
                                    ChainDirection dir = ChainDirection::forward) {
    const auto& steps = dir == ChainDirection::forward ? chain.forward : chain.backward;
    NestingReport r;
    for (const UnfoldStep& s : steps) {
        r.radii.push_back(s.circle.radius);
        r.distances.push_back(s.distance_to_base);
    }
    for (std::size_t j = 0; j + 1 < steps.size(); ++j) {
        double c = steps[j + 1].inner_with_prev;
        if (std::abs(c) < 1.0) {
            ++r.crossing_pairs;
        } else if (c >= 1.0 && steps[j + 1].distance_to_base > steps[j].distance_to_base) {
            ++r.disjoint_pairs;
        } else {
            ++r.retreat_pairs;
        }
    }
    for (const UnfoldStep& s : steps)
        if (s.repeat_of != 0) ++r.repeated_planes;
    r.nested = r.retreat_pairs == 0 && r.repeated_planes == 0;
    return r;
}

struct LimitPoint {
    BoundaryPoint point;
    double residual_radius = 1;  // the true limit lies within this circle
};

// The ideal point the chain converges to, estimated by the pole of the last
// boundary circle; the circle's radius bounds the error.
inline LimitPoint limit_point(const UnfoldChain& chain, ChainDirection dir) {
    const auto& steps = dir == ChainDirection::forward ? chain.forward : chain.backward;
    if (steps.empty())
        throw Error(Errc::invalid_spec, "chain has no steps in the requested direction");
    NestingReport r = verify_nesting(chain, dir);
    if (!r.nested)
        throw Error(Errc::not_nested,
                    "chain does not march off (" + std::to_string(r.retreat_pairs) +
                        " retreating pairs, " + std::to_string(r.repeated_planes) +
                        " repeated planes)");
    const UnfoldStep& last = steps.back();
    return {BoundaryPoint(last.circle.cap_center), last.circle.radius};
}

struct ReconstructionResult {
    PointedTrajectory trajectory;
    LimitPoint backward;                  // start of the base geodesic
    LimitPoint forward;                   // end of the base geodesic
    UnfoldChain chain;
    std::optional<double> rebase_agreement;  // d_G against a second base point
};

namespace detail {

inline Word window_of(const EventuallyPeriodicCode& c, int depth) {
    Word w;
    for (long n = -depth; n < depth; ++n) w.symbols.push_back(c.at(n));
    w.point = depth;
    return w;
}

inline Word window_of(const Word& w, int depth) {
    if (w.min_pos() > -depth || w.max_pos() < depth - 1)
        throw Error(Errc::invalid_spec, "word too short for reconstruction depth " +
                                            std::to_string(depth));
    Word out;
    for (long n = -depth; n < depth; ++n) out.symbols.push_back(w.at(n));
    out.point = depth;
    return out;
}

inline PointedTrajectory fold_back(const IdealPolyhedron& poly, const Word& w, int depth,
                                   const DirectedGeodesic& g) {
    // arc 0 of the reconstructed trajectory lies between the crossings of
    // the entry face (symbol at -1) and the exit face (symbol at 0)
    const HyperbolicPlane& entry_plane = poly.face(w.at(-1)).plane;
    const HyperbolicPlane& exit_plane = poly.face(w.at(0)).plane;
    double a_en = mdot(g.start_null(), entry_plane.normal());
    double b_en = mdot(g.end_null(), entry_plane.normal());
    double a_ex = mdot(g.start_null(), exit_plane.normal());
    double b_ex = mdot(g.end_null(), exit_plane.normal());
    if (!(a_en < 0 && b_en > 0) || !(a_ex > 0 && b_ex < 0))
        throw Error(Errc::code_mismatch, "limit geodesic misses the base cell");
    double t_en = 0.5 * std::log(-a_en / b_en);
    double t_ex = 0.5 * std::log(-a_ex / b_ex);
    if (!(t_en < t_ex))
        throw Error(Errc::code_mismatch, "entry/exit crossings out of order");
    return trace_geodesic(poly, g, 0.5 * (t_en + t_ex), depth, depth);
}

inline void check_window(const Word& expected, const PointedTrajectory& traj, int depth,
                         int guard) {
    for (int n = -depth + guard; n <= depth - guard - 1; ++n) {
        if (!traj.has(n))
            throw Error(Errc::code_mismatch,
                        "reconstructed trajectory truncated at arc " + std::to_string(n));
        if (traj.symbol(n) != expected.at(n))
            throw Error(Errc::code_mismatch,
                        "symbol mismatch at position " + std::to_string(n) + ": got " +
                            std::to_string(traj.symbol(n)) + ", code has " +
                            std::to_string(expected.at(n)));
    }
}

// Symbols this close to the window edge are exempt from the round-trip
// comparison. The limit points carry an error up to the residual radius r,
// and the re-traced geodesic drifts from the true one like r e^t, so the
// last few hits before the unfolding horizon can land in a neighboring
// cell; four symbols absorb this for the built-in bodies.
inline constexpr int kReconstructGuard = 4;

inline ReconstructionResult reconstruct_window(const IdealPolyhedron& poly, const Word& w,
                                               int depth, const InteriorPoint& base,
                                               bool verify_rebase) {
    UnfoldChain chain = unfold_along(poly, w, base);
    LimitPoint beta = limit_point(chain, ChainDirection::forward);
    LimitPoint alpha = limit_point(chain, ChainDirection::backward);
    double residual = std::max(alpha.residual_radius, beta.residual_radius);
    if (residual > tolerances().convergence) throw NotConvergedError(residual);

    DirectedGeodesic g(alpha.point, beta.point);
    PointedTrajectory traj = detail::fold_back(poly, w, depth, g);
    detail::check_window(w, traj, depth, kReconstructGuard);

    ReconstructionResult res{std::move(traj), alpha, beta, std::move(chain), std::nullopt};
    if (verify_rebase) {
        // the chain planes do not depend on the base point; rerunning from a
        // second base point must reproduce the base arc
        Vec3 shifted = base.ball() * 0.5 + poly.vertices().front().point.unit() * 0.2;
        InteriorPoint base2(shifted);
        if (contains(poly, base2).kind != Containment::Kind::Inside)
            base2 = InteriorPoint(base.ball() * 0.5);
        ReconstructionResult second =
            reconstruct_window(poly, w, depth, base2, false);
        res.rebase_agreement = d_G(res.trajectory, second.trajectory);
    }
    return res;
}

}  // namespace detail

// Rebuilds the unique trajectory carrying the given admissible code: unfold
// to the given depth both ways, take the two limit points, join them by a
// geodesic and fold it back into the polyhedron. The reconstructed code
// must agree with the input inside a guard of 2 symbols; disagreement means
// the depth was numerically insufficient or the code is not realizable.
inline ReconstructionResult reconstruct(const IdealPolyhedron& poly,
                                        const EventuallyPeriodicCode& code, int depth,
                                        bool verify_rebase = false) {
    if (auto v = validate_code(code, poly))
        throw Error(Errc::invalid_word, v->to_string());
    return detail::reconstruct_window(poly, detail::window_of(code, depth), depth,
                                      poly.interior_ref(), verify_rebase);
}

inline ReconstructionResult reconstruct(const IdealPolyhedron& poly, const Word& word,
                                        int depth, bool verify_rebase = false) {
    if (auto v = validate_word(word, poly))
        throw Error(Errc::invalid_word, v->to_string());
    return detail::reconstruct_window(poly, detail::window_of(word, depth), depth,
                                      poly.interior_ref(), verify_rebase);
}

struct ConjugacyReport {
    int window = 0;
    int mismatches = 0;       // symbol disagreements between code(tau(pt)) and
                              // the shifted code of pt
    double d_g_tau = 0;       // d_G(pt, tau(pt)); zero only for sigma-fixed codes
    bool code_sigma_fixed = false;
};

// Checks the commutation of re-pointing with the symbol shift: the code of
// tau(pt) must equal the shifted code of pt, symbol for symbol, on [-m, m].
inline ConjugacyReport conjugacy_check(const IdealPolyhedron& poly,
                                       const PointedTrajectory& pt, int m) {
    if (!pt.has(m + 1) || !pt.has(-m - 1))
        throw Error(Errc::point_out_of_range,
                    "trajectory window does not cover [-m-1, m+1]");
    PointedTrajectory shifted = tau(poly, pt, 1);
    ConjugacyReport rep;
    rep.window = m;
    for (int n = -m; n <= m; ++n)
        if (shifted.symbol(n) != pt.symbol(n + 1)) ++rep.mismatches;
    rep.code_sigma_fixed = true;
    for (int n = -m; n < m && rep.code_sigma_fixed; ++n)
        rep.code_sigma_fixed = pt.symbol(n) == pt.symbol(n + 1);
    rep.d_g_tau = d_G(pt, shifted);
    return rep;
}

}  // namespace h3b
