// Command-line front end: polyhedron reports, trajectory tracing, code
// grammar checks, code-to-trajectory reconstruction, chain dumps, metric
// evaluation and OBJ export.
//
// Exit codes:
//   0  success (and: code is valid / predicate true)
//   1  a validated code or word violates the grammar
//   2  invalid input: polyhedron spec, file, code text, alphabet
//   3  edge-or-vertex hit (trace aborted; partial output is still written)
//   4  reconstruction did not converge at the requested depth
//   5  trajectory left through the ideal boundary
//   6  other numeric failure (pencil wrap, precision exhausted, code mismatch)
//  64  command-line usage error

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "h3b/h3b.hpp"

using namespace h3b;

namespace {

Vec3 parse_vec3(const std::string& s) {
    Vec3 v;
    char c1 = 0, c2 = 0;
    std::istringstream in(s);
    in >> v.x >> c1 >> v.y >> c2 >> v.z;
    if (in.fail() || c1 != ',' || c2 != ',')
        throw Error(Errc::invalid_spec, "expected x,y,z but got '" + s + "'");
    return v;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error(Errc::invalid_spec, "cannot write '" + path + "'");
    out << content << "\n";
}

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case Errc::edge_or_vertex_hit: return 3;
        case Errc::not_converged: return 4;
        case Errc::no_forward_hit: return 5;
        case Errc::not_nested:
        case Errc::precision_exhausted:
        case Errc::code_mismatch: return 6;
        default: return 2;
    }
}

Word require_word(const std::variant<Word, EventuallyPeriodicCode>& parsed) {
    if (const Word* w = std::get_if<Word>(&parsed)) return *w;
    throw Error(Errc::invalid_spec, "expected a finite word, got a periodic code");
}

struct TraceArgs {
    std::string poly;
    std::string seed, direction;
    bool random = false;
    int count = 1;
    unsigned long long rng_seed = 1;
    int n_back = 20, n_fwd = 20;
    std::string out;
};

int run_trace(const TraceArgs& a) {
    IdealPolyhedron poly = resolve_polyhedron(a.poly);
    std::mt19937_64 rng(a.rng_seed);
    std::uniform_real_distribution<double> u(-1, 1);
    auto random_launch = [&] {
        for (;;) {
            Vec3 p{u(rng), u(rng), u(rng)}, d{u(rng), u(rng), u(rng)};
            if (p.norm() < 1e-9 || d.norm() < 0.1) continue;
            p = p * (0.5 * std::abs(u(rng)));
            try {
                InteriorPoint ip(p);
                if (contains(poly, ip).kind == Containment::Kind::Inside)
                    return std::pair{ip, d.normalized()};
            } catch (const Error&) {
            }
        }
    };

    json out = json::array();
    bool truncated_edge = false, truncated_ideal = false;
    int n = a.random ? a.count : 1;
    for (int i = 0; i < n; ++i) {
        InteriorPoint p = a.random ? random_launch().first : InteriorPoint(parse_vec3(a.seed));
        Vec3 d = a.random ? random_launch().second : parse_vec3(a.direction).normalized();
        if (a.random) {
            auto launch = random_launch();
            p = launch.first;
            d = launch.second;
        }
        PointedTrajectory pt = trace(poly, p, d, a.n_back, a.n_fwd);
        truncated_edge = truncated_edge ||
                         pt.forward_termination() == TraceTermination::edge_or_vertex ||
                         pt.backward_termination() == TraceTermination::edge_or_vertex;
        truncated_ideal = truncated_ideal ||
                          pt.forward_termination() == TraceTermination::ideal_exit ||
                          pt.backward_termination() == TraceTermination::ideal_exit;
        out.push_back(trajectory_to_json(pt, a.poly, std::pair{p.ball(), d}));
    }
    write_output(a.out, (a.random ? out : out[0]).dump(2));
    if (truncated_edge) return 3;
    if (truncated_ideal) return 5;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* tol_file = std::getenv("HYP_TOL_FILE")) {
        try {
            load_tolerances(tol_file);
        } catch (const Error& e) {
            std::cerr << e.what() << "\n";
            return 2;
        }
    }

    CLI::App app{
        "billiards in ideal polyhedra of hyperbolic 3-space: tracing, symbolic "
        "codes, reconstruction"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    // polyhedron
    auto* cmd_poly = app.add_subcommand("polyhedron", "validate a body and print its report");
    std::string poly_spec, poly_out;
    cmd_poly->add_option("spec", poly_spec, "'tetrahedron', 'octahedron' or a json file")
        ->required();
    cmd_poly->add_option("--out", poly_out, "output path (default stdout)");

    // trace
    auto* cmd_trace = app.add_subcommand("trace", "trace a billiard trajectory");
    TraceArgs targs;
    cmd_trace->add_option("--poly", targs.poly, "polyhedron spec")->required();
    cmd_trace->add_option("--seed", targs.seed, "seed point x,y,z (ball chart)");
    cmd_trace->add_option("--direction", targs.direction, "initial direction x,y,z");
    cmd_trace->add_flag("--random", targs.random, "sample seed and direction");
    cmd_trace->add_option("--count", targs.count, "number of random trajectories");
    cmd_trace->add_option("--rng-seed", targs.rng_seed, "random generator seed");
    cmd_trace->add_option("--n-back", targs.n_back, "arcs into the past");
    cmd_trace->add_option("--n-fwd", targs.n_fwd, "arcs into the future");
    cmd_trace->add_option("--out", targs.out, "output path (default stdout)");

    // code
    auto* cmd_code = app.add_subcommand("code", "symbolic code operations");
    cmd_code->require_subcommand(1);
    std::string code_poly, code_text, code_text2;
    int shift_by = 1, horizon = 16, alphabet = 0;
    auto* code_validate = cmd_code->add_subcommand("validate", "check the grammar rules");
    code_validate->add_option("--poly", code_poly, "polyhedron spec")->required();
    code_validate->add_option("code", code_text, "word or periodic code text")->required();
    auto* code_shift = cmd_code->add_subcommand("shift", "move the point");
    code_shift->add_option("--by", shift_by, "shift amount");
    code_shift->add_option("code", code_text, "word or periodic code text")->required();
    auto* code_metric = cmd_code->add_subcommand("metric", "sequence metric of two codes");
    code_metric->add_option("--horizon", horizon, "comparison horizon");
    code_metric->add_option("--alphabet", alphabet, "alphabet size (default: inferred)");
    code_metric->add_option("x", code_text, "first code")->required();
    code_metric->add_option("y", code_text2, "second code")->required();
    auto* code_orbit = cmd_code->add_subcommand("orbit-equal", "same orbit up to re-pointing");
    code_orbit->add_option("--horizon", horizon, "comparison horizon");
    code_orbit->add_option("--alphabet", alphabet, "alphabet size (default: inferred)");
    code_orbit->add_option("x", code_text, "first code")->required();
    code_orbit->add_option("y", code_text2, "second code")->required();

    // reconstruct
    auto* cmd_rec = app.add_subcommand("reconstruct", "rebuild the trajectory of a code");
    std::string rec_poly, rec_code, rec_out;
    int rec_depth = 16;
    bool rec_verify = false;
    cmd_rec->add_option("--poly", rec_poly, "polyhedron spec")->required();
    cmd_rec->add_option("--code", rec_code, "word or periodic code text")->required();
    cmd_rec->add_option("--depth", rec_depth, "unfolding depth each way");
    cmd_rec->add_flag("--verify", rec_verify, "re-run from a second base point");
    cmd_rec->add_option("--out", rec_out, "output path (default stdout)");

    // unfold
    auto* cmd_unf = app.add_subcommand("unfold", "dump the unfolding chain of a word");
    std::string unf_poly, unf_code, unf_base, unf_out;
    cmd_unf->add_option("--poly", unf_poly, "polyhedron spec")->required();
    cmd_unf->add_option("--code", unf_code, "pointed word")->required();
    cmd_unf->add_option("--base", unf_base, "base point x,y,z (default interior reference)");
    cmd_unf->add_option("--out", unf_out, "output path (default stdout)");

    // conjugacy-check
    auto* cmd_conj = app.add_subcommand("conjugacy-check",
                                        "verify code(tau(.)) equals the shifted code");
    std::string conj_poly, conj_seed, conj_dir;
    int conj_window = 10;
    cmd_conj->add_option("--poly", conj_poly, "polyhedron spec")->required();
    cmd_conj->add_option("--seed", conj_seed, "seed point x,y,z")->required();
    cmd_conj->add_option("--direction", conj_dir, "initial direction x,y,z")->required();
    cmd_conj->add_option("--window", conj_window, "verification window");

    // metrics
    auto* cmd_met = app.add_subcommand("metrics", "distance between two stored trajectories");
    cmd_met->require_subcommand(1);
    std::string met_a, met_b;
    auto* met_dg = cmd_met->add_subcommand("dg", "endpoint metric of the base arcs");
    met_dg->add_option("--a", met_a, "trajectory json")->required();
    met_dg->add_option("--b", met_b, "trajectory json")->required();
    auto* met_dh = cmd_met->add_subcommand("dh", "Hausdorff metric of the base arcs");
    met_dh->add_option("--a", met_a, "trajectory json")->required();
    met_dh->add_option("--b", met_b, "trajectory json")->required();

    // export
    auto* cmd_exp = app.add_subcommand("export", "OBJ mesh of the body and a trajectory");
    std::string exp_poly, exp_traj, exp_out;
    ObjOptions obj_opt;
    cmd_exp->add_option("--poly", exp_poly, "polyhedron spec")->required();
    cmd_exp->add_option("--trajectory", exp_traj, "trajectory json to include");
    cmd_exp->add_option("--rings", obj_opt.rings, "radial subdivisions per face");
    cmd_exp->add_option("--segments", obj_opt.segments, "angular subdivisions per face");
    cmd_exp->add_option("--samples-per-arc", obj_opt.samples_per_arc, "polyline samples");
    cmd_exp->add_option("--out", exp_out, "output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_poly->parsed()) {
            write_output(poly_out, polyhedron_report_json(resolve_polyhedron(poly_spec)).dump(2));
            return 0;
        }
        if (cmd_trace->parsed()) {
            if (!targs.random && (targs.seed.empty() || targs.direction.empty()))
                throw Error(Errc::invalid_spec, "need --seed and --direction, or --random");
            return run_trace(targs);
        }
        if (code_validate->parsed()) {
            IdealPolyhedron poly = resolve_polyhedron(code_poly);
            auto parsed = parse_code(code_text, poly.face_count());
            ValidationResult v;
            if (const Word* w = std::get_if<Word>(&parsed)) v = validate_word(*w, poly);
            else v = validate_code(std::get<EventuallyPeriodicCode>(parsed), poly);
            if (v) {
                std::cout << v->to_string() << "\n";
                return 1;
            }
            std::cout << "Valid\n";
            return 0;
        }
        if (code_shift->parsed()) {
            auto parsed = parse_code(code_text);
            if (const Word* w = std::get_if<Word>(&parsed))
                std::cout << format_word(shift(*w, shift_by)) << "\n";
            else
                std::cout << format_code(shift(std::get<EventuallyPeriodicCode>(parsed), shift_by))
                          << "\n";
            return 0;
        }
        if (code_metric->parsed() || code_orbit->parsed()) {
            auto px = parse_code(code_text, alphabet);
            auto py = parse_code(code_text2, alphabet);
            auto* x = std::get_if<EventuallyPeriodicCode>(&px);
            auto* y = std::get_if<EventuallyPeriodicCode>(&py);
            if (!x || !y)
                throw Error(Errc::invalid_spec,
                            "metric and orbit comparisons need periodic codes");
            int k = std::max(x->alphabet, y->alphabet);
            x->alphabet = y->alphabet = alphabet > 0 ? alphabet : k;
            if (code_metric->parsed()) {
                SequenceDistance d = sequence_metric(*x, *y, horizon);
                std::cout.precision(17);
                std::cout << d.value << (d.at_horizon ? " (agreement at horizon)" : "") << "\n";
                return 0;
            }
            bool eq = orbit_equal(*x, *y, horizon);
            std::cout << (eq ? "true" : "false") << "\n";
            return 0;
        }
        if (cmd_rec->parsed()) {
            IdealPolyhedron poly = resolve_polyhedron(rec_poly);
            auto parsed = parse_code(rec_code, poly.face_count());
            ReconstructionResult rec = [&] {
                if (const Word* w = std::get_if<Word>(&parsed))
                    return reconstruct(poly, *w, rec_depth, rec_verify);
                return reconstruct(poly, std::get<EventuallyPeriodicCode>(parsed), rec_depth,
                                   rec_verify);
            }();
            json j = trajectory_to_json(rec.trajectory, rec_poly);
            j["reconstruction"] = {{"depth", rec_depth},
                                   {"forward_residual", rec.forward.residual_radius},
                                   {"backward_residual", rec.backward.residual_radius}};
            if (rec.rebase_agreement)
                j["reconstruction"]["rebase_agreement"] = *rec.rebase_agreement;
            write_output(rec_out, j.dump(2));
            return 0;
        }
        if (cmd_unf->parsed()) {
            IdealPolyhedron poly = resolve_polyhedron(unf_poly);
            Word w = require_word(parse_code(unf_code, poly.face_count()));
            InteriorPoint base =
                unf_base.empty() ? poly.interior_ref() : InteriorPoint(parse_vec3(unf_base));
            write_output(unf_out, chain_to_json(unfold_along(poly, w, base)).dump(2));
            return 0;
        }
        if (cmd_conj->parsed()) {
            IdealPolyhedron poly = resolve_polyhedron(conj_poly);
            PointedTrajectory pt = trace(poly, InteriorPoint(parse_vec3(conj_seed)),
                                         parse_vec3(conj_dir), conj_window + 1, conj_window + 1);
            ConjugacyReport rep = conjugacy_check(poly, pt, conj_window);
            json j{{"window", rep.window},
                   {"mismatches", rep.mismatches},
                   {"d_g_tau", rep.d_g_tau},
                   {"code_sigma_fixed", rep.code_sigma_fixed}};
            std::cout << j.dump(2) << "\n";
            return rep.mismatches == 0 ? 0 : 6;
        }
        if (met_dg->parsed() || met_dh->parsed()) {
            auto load = [](const std::string& path) {
                std::ifstream in(path);
                if (!in) throw Error(Errc::invalid_spec, "cannot open '" + path + "'");
                json j;
                in >> j;
                return trajectory_from_json(j);
            };
            PointedTrajectory a = load(met_a), b = load(met_b);
            std::cout.precision(17);
            std::cout << (met_dg->parsed() ? d_G(a, b) : d_H(a, b)) << "\n";
            return 0;
        }
        if (cmd_exp->parsed()) {
            IdealPolyhedron poly = resolve_polyhedron(exp_poly);
            std::optional<PointedTrajectory> traj;
            if (!exp_traj.empty()) {
                std::ifstream in(exp_traj);
                if (!in) throw Error(Errc::invalid_spec, "cannot open '" + exp_traj + "'");
                json j;
                in >> j;
                traj = trajectory_from_json(j);
            }
            write_output(exp_out, export_obj(poly, traj ? &*traj : nullptr, obj_opt));
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 64;
}
