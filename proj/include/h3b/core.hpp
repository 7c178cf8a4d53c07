#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace h3b {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Central tolerance table. All geometric predicates read from one place so
// that "on the plane", "at the boundary" and friends stay mutually consistent.
struct Tolerances {
    double unit = 1e-12;         // unit-vector and Lorentz-unit checks
    double boundary = 1e-12;     // ball points must satisfy |p| < 1 - boundary
    double on_plane = 1e-9;      // |<x,e>| below this counts as "on" the plane
    double separation = 1e-9;    // minimal angular separation of geodesic endpoints
    double edge = 1e-7;          // dead zone around edges/vertices for hits
    double lambda = 1e-6;        // max deviation of pi/omega from an integer
    double concircular = 1e-8;   // face vertices must lie on a circle this well
    double hausdorff = 1e-6;     // refinement stop for the Hausdorff metric
    double convergence = 1e-8;   // residual cap radius accepted by reconstruct
};

inline Tolerances& tolerances() {
    static Tolerances t;
    return t;
}

enum class Errc {
    boundary_too_close,
    coincident_points,
    tangential_contact,
    non_intersecting_planes,
    non_concircular_face,
    empty_interior,
    non_ideal_vertex,
    edge_or_vertex_hit,
    no_forward_hit,
    alphabet_mismatch,
    point_out_of_range,
    invalid_word,
    not_nested,
    not_converged,
    code_mismatch,
    invalid_spec,
    precision_exhausted,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::boundary_too_close: return "BoundaryTooClose";
        case Errc::coincident_points: return "CoincidentPoints";
        case Errc::tangential_contact: return "TangentialContact";
        case Errc::non_intersecting_planes: return "NonIntersectingPlanes";
        case Errc::non_concircular_face: return "NonConcircularFace";
        case Errc::empty_interior: return "EmptyInterior";
        case Errc::non_ideal_vertex: return "NonIdealVertex";
        case Errc::edge_or_vertex_hit: return "EdgeOrVertexHit";
        case Errc::no_forward_hit: return "NoForwardHit";
        case Errc::alphabet_mismatch: return "AlphabetMismatch";
        case Errc::point_out_of_range: return "PointOutOfRange";
        case Errc::invalid_word: return "InvalidWord";
        case Errc::not_nested: return "NotNested";
        case Errc::not_converged: return "NotConverged";
        case Errc::code_mismatch: return "CodeMismatch";
        case Errc::invalid_spec: return "InvalidSpec";
        case Errc::precision_exhausted: return "PrecisionExhausted";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

// A hit landed within the edge dead zone: two or more face planes are closer
// than Tolerances::edge at the intersection point.
class EdgeOrVertexHitError : public Error {
public:
    EdgeOrVertexHitError(std::vector<int> labels, double t)
        : Error(Errc::edge_or_vertex_hit, describe(labels, t)),
          labels_(std::move(labels)), t_(t) {}
    const std::vector<int>& labels() const { return labels_; }
    double param() const { return t_; }

private:
    static std::string describe(const std::vector<int>& labels, double t) {
        std::string s = "faces {";
        for (std::size_t i = 0; i < labels.size(); ++i)
            s += (i ? "," : "") + std::to_string(labels[i]);
        s += "} at t=" + std::to_string(t);
        return s;
    }
    std::vector<int> labels_;
    double t_;
};

class NotConvergedError : public Error {
public:
    explicit NotConvergedError(double residual)
        : Error(Errc::not_converged,
                "residual cap radius " + std::to_string(residual) +
                " exceeds tolerance; raise the unfolding depth"),
          residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

}  // namespace h3b
