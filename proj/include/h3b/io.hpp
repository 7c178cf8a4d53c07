#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "h3b/billiard.hpp"
#include "h3b/code.hpp"
#include "h3b/core.hpp"
#include "h3b/polyhedron.hpp"
#include "h3b/unfold.hpp"

// File formats: polyhedra, trajectories and unfolding chains interchange as
// JSON; OBJ output is render-only (meshes of the face caps and trajectory
// polylines) and never read back.

namespace h3b {

using json = nlohmann::json;

inline json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

inline Vec3 vec3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3)
        throw Error(Errc::invalid_spec, "expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

// ---- polyhedron ----
// { "k": int, "vertices": [[x,y,z],...], "faces": [{"label": int, "vertices": [i,...]},...] }

inline json polyhedron_spec_json(const IdealPolyhedron& poly) {
    json j;
    j["k"] = poly.face_count();
    json verts = json::array();
    for (const Vertex& v : poly.vertices()) verts.push_back(to_json(v.point.unit()));
    j["vertices"] = verts;
    json faces = json::array();
    for (const Face& f : poly.faces())
        faces.push_back({{"label", f.label}, {"vertices", f.vertex_cycle}});
    j["faces"] = faces;
    return j;
}

inline IdealPolyhedron polyhedron_from_json(const json& j) {
    if (!j.contains("vertices") || !j.contains("faces"))
        throw Error(Errc::invalid_spec, "polyhedron json needs vertices and faces");
    std::vector<Vec3> verts;
    for (const json& v : j["vertices"]) verts.push_back(vec3_from_json(v));
    std::vector<FaceSpec> faces;
    for (const json& f : j["faces"]) {
        FaceSpec fs;
        fs.label = f.at("label").get<int>();
        fs.vertices = f.at("vertices").get<std::vector<int>>();
        faces.push_back(std::move(fs));
    }
    if (j.contains("k") && j["k"].get<int>() != static_cast<int>(faces.size()))
        throw Error(Errc::invalid_spec, "k does not match the face list");
    return from_spec(verts, faces);
}

// full report: spec data plus the derived adjacency, angles and areas
inline json polyhedron_report_json(const IdealPolyhedron& poly) {
    json j = polyhedron_spec_json(poly);
    j["vertex_count"] = static_cast<int>(poly.vertices().size());
    json vlabels = json::array();
    for (const Vertex& v : poly.vertices()) vlabels.push_back(v.label);
    j["vertex_labels"] = vlabels;
    json adj = json::array();
    for (const AdjacencyEntry& e : poly.adjacency())
        adj.push_back({{"faces", {e.i, e.j}},
                       {"omega", e.omega},
                       {"lambda", e.lambda},
                       {"lambda_residual", e.lambda_residual}});
    j["adjacency"] = adj;
    json areas = json::object();
    for (const Face& f : poly.faces())
        areas[std::to_string(f.label)] = face_area(poly, f.label);
    j["face_areas"] = areas;
    j["surface_area"] = surface_area(poly);
    j["lambda_integral"] = poly.lambda_integral();
    return j;
}

// resolves "tetrahedron", "octahedron" or a path to a polyhedron json file
inline IdealPolyhedron resolve_polyhedron(const std::string& spec) {
    if (spec == "tetrahedron") return ideal_regular_tetrahedron();
    if (spec == "octahedron") return ideal_regular_octahedron();
    std::ifstream in(spec);
    if (!in) throw Error(Errc::invalid_spec, "cannot open polyhedron spec '" + spec + "'");
    json j;
    in >> j;
    return polyhedron_from_json(j);
}

// ---- trajectory ----

inline json hit_to_json(const HitEvent& h) {
    return {{"label", h.face_label}, {"point", to_json(h.point.ball())}, {"t", h.t}};
}

inline HitEvent hit_from_json(const json& j) {
    return {j.at("label").get<int>(), InteriorPoint(vec3_from_json(j.at("point"))),
            j.at("t").get<double>(), Vec4{}};
}

inline json trajectory_to_json(const PointedTrajectory& pt,
                               const std::string& polyhedron_ref = "",
                               const std::optional<std::pair<Vec3, Vec3>>& seed = {}) {
    json j;
    if (!polyhedron_ref.empty()) j["polyhedron"] = polyhedron_ref;
    if (seed)
        j["seed"] = {{"point", to_json(seed->first)}, {"direction", to_json(seed->second)}};
    j["n_back"] = pt.n_back();
    j["n_fwd"] = pt.n_fwd();
    j["forward_termination"] = termination_name(pt.forward_termination());
    j["backward_termination"] = termination_name(pt.backward_termination());
    j["code"] = format_word(extract_code(pt));
    json arcs = json::array();
    for (int n = -pt.n_back(); n <= pt.n_fwd(); ++n) {
        const BaseArc& a = pt.arc(n);
        json arc{{"index", n},
                 {"start", to_json(a.geodesic.start().unit())},
                 {"end", to_json(a.geodesic.end().unit())},
                 {"exit", hit_to_json(a.exit)}};
        arc["entry"] = a.entry ? hit_to_json(*a.entry) : json(nullptr);
        arcs.push_back(arc);
    }
    j["arcs"] = arcs;
    return j;
}

// Rebuilds the geometry of a stored trajectory. Inward normals are not part
// of the format; reloaded hit events carry zero normals, which the metrics
// and the exporter never look at.
inline PointedTrajectory trajectory_from_json(const json& j) {
    std::vector<BaseArc> arcs;
    int n_back = j.at("n_back").get<int>();
    int n_fwd = j.at("n_fwd").get<int>();
    for (const json& a : j.at("arcs")) {
        DirectedGeodesic g(BoundaryPoint(vec3_from_json(a.at("start"))),
                           BoundaryPoint(vec3_from_json(a.at("end"))));
        std::optional<HitEvent> entry;
        if (!a.at("entry").is_null()) entry = hit_from_json(a.at("entry"));
        arcs.push_back(BaseArc{g, entry, hit_from_json(a.at("exit"))});
    }
    if (static_cast<int>(arcs.size()) != n_back + n_fwd + 1)
        throw Error(Errc::invalid_spec, "arc count does not match the index range");
    return PointedTrajectory(std::move(arcs), n_back, n_fwd, TraceTermination::complete,
                             TraceTermination::complete);
}

// ---- unfolding chain ----

inline json nesting_to_json(const NestingReport& r) {
    return {{"nested", r.nested},
            {"radii", r.radii},
            {"distances", r.distances},
            {"disjoint_pairs", r.disjoint_pairs},
            {"crossing_pairs", r.crossing_pairs},
            {"retreat_pairs", r.retreat_pairs},
            {"repeated_planes", r.repeated_planes}};
}

inline json chain_to_json(const UnfoldChain& chain) {
    json j;
    j["base"] = to_json(chain.base.ball());
    j["code"] = format_word(chain.source);
    auto dump = [](const std::vector<UnfoldStep>& steps) {
        json arr = json::array();
        for (const UnfoldStep& s : steps)
            arr.push_back({{"index", s.index},
                           {"label", s.reflecting_label},
                           {"circle_center", to_json(s.circle.circle_center)},
                           {"cap_center", to_json(s.circle.cap_center)},
                           {"radius", s.circle.radius},
                           {"distance", s.distance_to_base}});
        return arr;
    };
    j["forward"] = dump(chain.forward);
    j["backward"] = dump(chain.backward);
    j["nesting"] = {{"forward", nesting_to_json(verify_nesting(chain, ChainDirection::forward))},
                    {"backward", nesting_to_json(verify_nesting(chain, ChainDirection::backward))}};
    return j;
}

// ---- OBJ export ----

namespace detail {

inline void orthonormal_frame(const Vec3& axis, Vec3& e1, Vec3& e2) {
    Vec3 seed = std::abs(axis.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    e1 = (seed - axis * seed.dot(axis)).normalized();
    e2 = axis.cross(e1);
}

}  // namespace detail

struct ObjOptions {
    int rings = 12;           // radial subdivisions of each face cap
    int segments = 48;        // angular subdivisions
    int samples_per_arc = 64; // polyline samples per trajectory arc
};

// Face planes become triangulated disks (through the origin) or spherical
// caps; an optional trajectory becomes a polyline. Everything is emitted in
// ball-chart Euclidean coordinates.
inline std::string export_obj(const IdealPolyhedron& poly,
                              const PointedTrajectory* trajectory = nullptr,
                              const ObjOptions& opt = {}) {
    std::ostringstream os;
    os.precision(17);
    int next_vertex = 1;
    auto emit_vertex = [&](const Vec3& p) {
        os << "v " << p.x << " " << p.y << " " << p.z << "\n";
        return next_vertex++;
    };

    for (const Face& f : poly.faces()) {
        os << "o face_" << f.label << "\n";
        std::vector<std::vector<int>> ring_ids;
        if (f.plane.is_through_origin()) {
            Vec3 axis = f.plane.normal().spatial().normalized();
            Vec3 e1, e2;
            detail::orthonormal_frame(axis, e1, e2);
            int apex = emit_vertex({0, 0, 0});
            ring_ids.push_back({apex});
            for (int r = 1; r <= opt.rings; ++r) {
                double rho = static_cast<double>(r) / opt.rings;
                std::vector<int> ring;
                for (int s = 0; s < opt.segments; ++s) {
                    double ph = 2 * kPi * s / opt.segments;
                    ring.push_back(
                        emit_vertex(e1 * (rho * std::cos(ph)) + e2 * (rho * std::sin(ph))));
                }
                ring_ids.push_back(ring);
            }
        } else {
            Vec3 c = f.plane.sphere_center();
            double rad = f.plane.sphere_radius();
            Vec3 chat = c.normalized();
            Vec3 e1, e2;
            detail::orthonormal_frame(chat, e1, e2);
            double psi_max = std::acos(clamp_unit(rad / c.norm()));
            int apex = emit_vertex(chat * (c.norm() - rad));
            ring_ids.push_back({apex});
            for (int r = 1; r <= opt.rings; ++r) {
                double psi = psi_max * r / opt.rings;
                std::vector<int> ring;
                for (int s = 0; s < opt.segments; ++s) {
                    double ph = 2 * kPi * s / opt.segments;
                    Vec3 dir = chat * (-std::cos(psi)) +
                               (e1 * std::cos(ph) + e2 * std::sin(ph)) * std::sin(psi);
                    ring.push_back(emit_vertex(c + dir * rad));
                }
                ring_ids.push_back(ring);
            }
        }
        // apex fan
        for (int s = 0; s < opt.segments; ++s)
            os << "f " << ring_ids[0][0] << " " << ring_ids[1][static_cast<std::size_t>(s)]
               << " " << ring_ids[1][static_cast<std::size_t>((s + 1) % opt.segments)] << "\n";
        for (int r = 1; r + 1 < static_cast<int>(ring_ids.size()); ++r) {
            const auto& a = ring_ids[static_cast<std::size_t>(r)];
            const auto& b = ring_ids[static_cast<std::size_t>(r + 1)];
            for (int s = 0; s < opt.segments; ++s) {
                int sn = (s + 1) % opt.segments;
                os << "f " << a[static_cast<std::size_t>(s)] << " "
                   << b[static_cast<std::size_t>(s)] << " " << b[static_cast<std::size_t>(sn)]
                   << "\n";
                os << "f " << a[static_cast<std::size_t>(s)] << " "
                   << b[static_cast<std::size_t>(sn)] << " " << a[static_cast<std::size_t>(sn)]
                   << "\n";
            }
        }
    }

    if (trajectory) {
        os << "o trajectory\n";
        std::vector<int> line;
        for (int n = -trajectory->n_back(); n <= trajectory->n_fwd(); ++n) {
            const BaseArc& a = trajectory->arc(n);
            double t0 = a.entry_param(), t1 = a.exit.t;
            int from = (n == -trajectory->n_back()) ? 0 : 1;  // skip shared endpoint
            for (int s = from; s <= opt.samples_per_arc; ++s) {
                double t = t0 + (t1 - t0) * s / opt.samples_per_arc;
                line.push_back(emit_vertex(a.geodesic.point_at(t).ball()));
            }
        }
        os << "l";
        for (int id : line) os << " " << id;
        os << "\n";
    }
    return os.str();
}

// ---- tolerance overrides (HYP_TOL_FILE) ----

inline void load_tolerances(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::invalid_spec, "cannot open tolerance file '" + path + "'");
    json j;
    in >> j;
    Tolerances& t = tolerances();
    auto set = [&](const char* key, double& field) {
        if (j.contains(key)) field = j[key].get<double>();
    };
    set("tol_unit", t.unit);
    set("tol_boundary", t.boundary);
    set("tol_on", t.on_plane);
    set("tol_sep", t.separation);
    set("tol_edge", t.edge);
    set("tol_lambda", t.lambda);
    set("tol_concircular", t.concircular);
    set("tol_hausdorff", t.hausdorff);
    set("tol_conv", t.convergence);
}

}  // namespace h3b
