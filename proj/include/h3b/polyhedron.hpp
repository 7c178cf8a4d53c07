#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "h3b/core.hpp"
#include "h3b/geometry.hpp"

// Ideal polyhedra: finitely many face planes, every vertex on the boundary
// sphere. Faces carry labels 1..k; those labels are the alphabet of the
// symbolic codes. Face planes are oriented with the Positive side pointing
// into the polyhedron, so "inside" means positive against every face.

namespace h3b {

struct Face {
    int label = 0;                  // 1..k
    HyperbolicPlane plane;          // Positive side faces the interior
    std::vector<int> vertex_cycle;  // vertex indices in circular order

    Face(int l, const HyperbolicPlane& p, std::vector<int> cycle)
        : label(l), plane(p), vertex_cycle(std::move(cycle)) {}
};

struct Vertex {
    BoundaryPoint point;
    std::vector<int> incident_labels;  // sorted
    std::string label;                 // concatenated incident labels
};

struct AdjacencyEntry {
    int i = 0, j = 0;           // face labels, i < j
    double omega = 0;           // interior dihedral angle
    int lambda = 0;             // nearest integer to pi / omega
    double lambda_residual = 0; // |pi/omega - lambda|
};

struct FaceSpec {
    int label;
    std::vector<int> vertices;
};

class IdealPolyhedron {
public:
    int face_count() const { return k_; }
    const std::vector<Face>& faces() const { return faces_; }
    const Face& face(int label) const { return faces_.at(label - 1); }
    const std::vector<Vertex>& vertices() const { return vertices_; }
    const InteriorPoint& interior_ref() const { return interior_ref_; }
    const std::vector<AdjacencyEntry>& adjacency() const { return adjacency_; }

    bool adjacent(int i, int j) const { return entry_index(i, j) >= 0; }
    double omega(int i, int j) const { return entry(i, j).omega; }
    int lambda(int i, int j) const { return entry(i, j).lambda; }

    int max_lambda() const {
        int m = 1;
        for (const auto& a : adjacency_) m = std::max(m, a.lambda);
        return m;
    }

    // false when some pi/omega misses an integer by more than the lambda
    // tolerance; such bodies are usable geometrically but the coding grammar
    // is not guaranteed for them
    bool lambda_integral() const { return lambda_integral_; }
    double lambda_max_residual() const { return lambda_max_residual_; }

    friend IdealPolyhedron from_spec(const std::vector<Vec3>&, const std::vector<FaceSpec>&);

private:
    const AdjacencyEntry& entry(int i, int j) const {
        int idx = entry_index(i, j);
        if (idx < 0)
            throw Error(Errc::invalid_spec, "faces " + std::to_string(i) + "," +
                                                std::to_string(j) + " are not adjacent");
        return adjacency_[static_cast<std::size_t>(idx)];
    }
    int entry_index(int i, int j) const {
        if (i < 1 || j < 1 || i > k_ || j > k_ || i == j) return -1;
        return adj_index_[static_cast<std::size_t>((i - 1) * k_ + (j - 1))];
    }

    int k_ = 0;
    std::vector<Face> faces_;
    std::vector<Vertex> vertices_;
    std::vector<AdjacencyEntry> adjacency_;
    std::vector<int> adj_index_;
    InteriorPoint interior_ref_;
    bool lambda_integral_ = true;
    double lambda_max_residual_ = 0;
};

namespace detail {

// plane through a well-spread vertex triple of the cycle
inline HyperbolicPlane face_plane_from_cycle(const std::vector<Vec3>& verts,
                                             const std::vector<int>& cycle) {
    const Vec3& u0 = verts[static_cast<std::size_t>(cycle[0])];
    std::size_t i1 = 1;
    double best = -1;
    for (std::size_t i = 1; i < cycle.size(); ++i) {
        double d = (verts[static_cast<std::size_t>(cycle[i])] - u0).norm2();
        if (d > best) { best = d; i1 = i; }
    }
    const Vec3& u1 = verts[static_cast<std::size_t>(cycle[i1])];
    std::size_t i2 = 0;
    best = -1;
    for (std::size_t i = 1; i < cycle.size(); ++i) {
        if (i == i1) continue;
        const Vec3& u = verts[static_cast<std::size_t>(cycle[i])];
        double d = (u1 - u0).cross(u - u0).norm2();
        if (d > best) { best = d; i2 = i; }
    }
    return HyperbolicPlane::through_boundary_points(
        BoundaryPoint(u0), BoundaryPoint(u1),
        BoundaryPoint(verts[static_cast<std::size_t>(cycle[i2])]));
}

inline std::vector<int> sort_cycle(const std::vector<Vec3>& verts, std::vector<int> cycle,
                                   const HyperbolicPlane& plane) {
    Vec3 axis = plane.normal().spatial().normalized();
    Vec3 seed = std::abs(axis.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 a1 = (seed - axis * seed.dot(axis)).normalized();
    Vec3 a2 = axis.cross(a1);
    std::sort(cycle.begin(), cycle.end(), [&](int i, int j) {
        const Vec3& u = verts[static_cast<std::size_t>(i)];
        const Vec3& v = verts[static_cast<std::size_t>(j)];
        return std::atan2(u.dot(a2), u.dot(a1)) < std::atan2(v.dot(a2), v.dot(a1));
    });
    return cycle;
}

inline bool cycle_has_edge(const std::vector<int>& cycle, int a, int b) {
    std::size_t n = cycle.size();
    for (std::size_t i = 0; i < n; ++i) {
        int u = cycle[i], v = cycle[(i + 1) % n];
        if ((u == a && v == b) || (u == b && v == a)) return true;
    }
    return false;
}

}  // namespace detail

// Builds and validates an ideal polyhedron from boundary vertices and face
// descriptions. Face labels must be exactly 1..k.
inline IdealPolyhedron from_spec(const std::vector<Vec3>& vertex_coords,
                                 const std::vector<FaceSpec>& face_specs) {
    const Tolerances& tol = tolerances();
    IdealPolyhedron poly;
    poly.k_ = static_cast<int>(face_specs.size());
    if (poly.k_ < 4) throw Error(Errc::invalid_spec, "need at least 4 faces");
    if (poly.k_ % 2 != 0)
        throw Error(Errc::invalid_spec, "ideal polyhedra are even-faced (k = " +
                                            std::to_string(poly.k_) + ")");

    std::vector<Vec3> verts;
    verts.reserve(vertex_coords.size());
    for (const Vec3& v : vertex_coords) {
        if (std::abs(v.norm() - 1.0) > 1e-9)
            throw Error(Errc::non_ideal_vertex,
                        "vertex |v| = " + std::to_string(v.norm()) + " is not on the sphere");
        verts.push_back(v.normalized());
    }

    std::vector<bool> seen(static_cast<std::size_t>(poly.k_), false);
    std::vector<FaceSpec> specs = face_specs;
    std::sort(specs.begin(), specs.end(),
              [](const FaceSpec& a, const FaceSpec& b) { return a.label < b.label; });
    for (const auto& fs : specs) {
        if (fs.label < 1 || fs.label > poly.k_ || seen[static_cast<std::size_t>(fs.label - 1)])
            throw Error(Errc::invalid_spec, "face labels must be exactly 1..k");
        seen[static_cast<std::size_t>(fs.label - 1)] = true;
        if (fs.vertices.size() < 3)
            throw Error(Errc::invalid_spec, "face needs at least 3 vertices");
        for (int vi : fs.vertices)
            if (vi < 0 || vi >= static_cast<int>(verts.size()))
                throw Error(Errc::invalid_spec, "face vertex index out of range");
    }

    // face planes + concircularity
    for (const auto& fs : specs) {
        HyperbolicPlane plane = detail::face_plane_from_cycle(verts, fs.vertices);
        for (int vi : fs.vertices) {
            double r = std::abs(plane.boundary_value(BoundaryPoint(verts[static_cast<std::size_t>(vi)])));
            if (r > tol.concircular)
                throw Error(Errc::non_concircular_face,
                            "face " + std::to_string(fs.label) + " vertex " + std::to_string(vi) +
                                " off the circle by " + std::to_string(r));
        }
        // orient towards the remaining vertices (the interior side)
        int pos = 0, neg = 0, on = 0;
        for (std::size_t vi = 0; vi < verts.size(); ++vi) {
            if (std::find(fs.vertices.begin(), fs.vertices.end(), static_cast<int>(vi)) !=
                fs.vertices.end())
                continue;
            double v = plane.boundary_value(BoundaryPoint(verts[vi]));
            if (v > tol.concircular) ++pos;
            else if (v < -tol.concircular) ++neg;
            else ++on;
        }
        if (pos == 0 && neg == 0)
            throw Error(Errc::empty_interior, "all vertices coplanar");
        if (pos > 0 && neg > 0)
            throw Error(Errc::empty_interior, "face " + std::to_string(fs.label) +
                                                  " has vertices on both sides");
        if (on > 0)
            throw Error(Errc::invalid_spec, "a vertex lies on face " +
                                                std::to_string(fs.label) +
                                                " but is not part of it");
        if (neg > 0) plane = plane.flipped();
        poly.faces_.emplace_back(fs.label, plane,
                                 detail::sort_cycle(verts, fs.vertices, plane));
    }

    // interior reference point: scaled vertex centroid, validated inside
    Vec3 centroid{0, 0, 0};
    for (const Vec3& v : verts) centroid = centroid + v;
    centroid = centroid / static_cast<double>(verts.size());
    bool found = false;
    for (double scale : {0.5, 0.25, 0.1, 0.05, 0.75}) {
        Vec3 c = centroid * scale;
        if (c.norm() >= 1.0 - tol.boundary) continue;
        InteriorPoint cand(c);
        Vec4 x = cand.hyperboloid();
        bool inside = true;
        for (const Face& f : poly.faces_)
            if (mdot(x, f.plane.normal()) <= tol.on_plane) { inside = false; break; }
        if (inside) {
            poly.interior_ref_ = cand;
            found = true;
            break;
        }
    }
    if (!found) throw Error(Errc::empty_interior, "no interior reference point found");

    // vertices with incidence
    for (std::size_t vi = 0; vi < verts.size(); ++vi) {
        Vertex v;
        v.point = BoundaryPoint(verts[vi]);
        for (const Face& f : poly.faces_)
            if (std::find(f.vertex_cycle.begin(), f.vertex_cycle.end(), static_cast<int>(vi)) !=
                f.vertex_cycle.end())
                v.incident_labels.push_back(f.label);
        std::sort(v.incident_labels.begin(), v.incident_labels.end());
        if (v.incident_labels.size() < 3)
            throw Error(Errc::invalid_spec, "vertex " + std::to_string(vi) +
                                                " has fewer than 3 incident faces");
        bool digits = poly.k_ <= 9;
        for (std::size_t i = 0; i < v.incident_labels.size(); ++i)
            v.label += (i && !digits ? "-" : "") + std::to_string(v.incident_labels[i]);
        poly.vertices_.push_back(std::move(v));
    }

    // adjacency: faces sharing an edge of both cycles
    poly.adj_index_.assign(static_cast<std::size_t>(poly.k_ * poly.k_), -1);
    for (int i = 0; i < poly.k_; ++i) {
        for (int j = i + 1; j < poly.k_; ++j) {
            const Face& fi = poly.faces_[static_cast<std::size_t>(i)];
            const Face& fj = poly.faces_[static_cast<std::size_t>(j)];
            std::vector<int> shared;
            for (int vi : fi.vertex_cycle)
                if (std::find(fj.vertex_cycle.begin(), fj.vertex_cycle.end(), vi) !=
                    fj.vertex_cycle.end())
                    shared.push_back(vi);
            if (shared.size() < 2) continue;
            if (shared.size() > 2)
                throw Error(Errc::invalid_spec, "faces share more than one edge");
            if (!detail::cycle_has_edge(fi.vertex_cycle, shared[0], shared[1]) ||
                !detail::cycle_has_edge(fj.vertex_cycle, shared[0], shared[1]))
                continue;
            AdjacencyEntry e;
            e.i = fi.label;
            e.j = fj.label;
            e.omega = dihedral_angle(fi.plane, fj.plane, poly.interior_ref_);
            double ratio = kPi / e.omega;
            e.lambda = std::max(1, static_cast<int>(std::lround(ratio)));
            e.lambda_residual = std::abs(ratio - e.lambda);
            poly.lambda_max_residual_ = std::max(poly.lambda_max_residual_, e.lambda_residual);
            if (e.lambda_residual > tol.lambda) poly.lambda_integral_ = false;
            poly.adj_index_[static_cast<std::size_t>((e.i - 1) * poly.k_ + (e.j - 1))] =
                static_cast<int>(poly.adjacency_.size());
            poly.adj_index_[static_cast<std::size_t>((e.j - 1) * poly.k_ + (e.i - 1))] =
                static_cast<int>(poly.adjacency_.size());
            poly.adjacency_.push_back(e);
        }
    }
    return poly;
}

// Regular ideal tetrahedron: vertices at the alternating cube corners, face
// i opposite vertex i. All dihedral angles are pi/3, lambda = 3.
inline IdealPolyhedron ideal_regular_tetrahedron() {
    double s = 1.0 / std::sqrt(3.0);
    std::vector<Vec3> verts = {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
    std::vector<FaceSpec> faces = {
        {1, {1, 2, 3}}, {2, {0, 2, 3}}, {3, {0, 1, 3}}, {4, {0, 1, 2}}};
    return from_spec(verts, faces);
}

// Regular ideal octahedron: vertices on the coordinate axes, one face per
// octant, labels in (x,y,z) sign-lexicographic order. All dihedral angles
// are pi/2, lambda = 2; opposite faces (1,8), (2,7), (3,6), (4,5) are the
// non-adjacent pairs.
inline IdealPolyhedron ideal_regular_octahedron() {
    std::vector<Vec3> verts = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                               {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    std::vector<FaceSpec> faces;
    int label = 1;
    for (int sx : {0, 1})
        for (int sy : {2, 3})
            for (int sz : {4, 5}) faces.push_back({label++, {sx, sy, sz}});
    return from_spec(verts, faces);
}

struct Containment {
    enum class Kind { Inside, OnBoundary, Outside };
    Kind kind;
    std::vector<int> labels;  // faces the point is on (OnBoundary only)
};

inline Containment contains(const IdealPolyhedron& poly, const InteriorPoint& p) {
    Vec4 x = p.hyperboloid();
    Containment c{Containment::Kind::Inside, {}};
    for (const Face& f : poly.faces()) {
        double v = mdot(x, f.plane.normal());
        if (v < -tolerances().on_plane) return {Containment::Kind::Outside, {}};
        if (std::abs(v) <= tolerances().on_plane) c.labels.push_back(f.label);
    }
    if (!c.labels.empty()) c.kind = Containment::Kind::OnBoundary;
    return c;
}

// Gauss-Bonnet: an ideal n-gon has area (n-2) pi.
inline double face_area(const IdealPolyhedron& poly, int label) {
    return (static_cast<double>(poly.face(label).vertex_cycle.size()) - 2.0) * kPi;
}

inline double surface_area(const IdealPolyhedron& poly) {
    double a = 0;
    for (const Face& f : poly.faces()) a += face_area(poly, f.label);
    return a;
}

}  // namespace h3b
