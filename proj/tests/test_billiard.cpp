#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "h3b/billiard.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace h3b;

namespace {

std::mt19937_64& rng() {
    static std::mt19937_64 gen(0xba11);
    return gen;
}

// synthetic base arc on a given geodesic between two parameters
BaseArc arc_on(const DirectedGeodesic& g, double t0, double t1) {
    HitEvent entry{0, g.point_at(t0), t0, Vec4{}};
    HitEvent exit{0, g.point_at(t1), t1, Vec4{}};
    return BaseArc{g, entry, exit};
}

}  // namespace

TEST_CASE("first hit") {
    IdealPolyhedron t = ideal_regular_tetrahedron();
    SECTION("aimed at a face, agrees with a dense march") {
        // aim from the center towards the pole of face 1's cap
        Vec3 aim = t.face(1).plane.normal().spatial().normalized() * -1.0;
        DirectedGeodesic g = geodesic_from_seed(t.interior_ref(), aim);
        double t0 = g.param_of(t.interior_ref());
        HitEvent h = first_hit(t, g, t0);
        CHECK(h.face_label == 1);
        auto marched = oracles::march_first_hit(t, g, t0, t0 + 10);
        REQUIRE(marched.has_value());
        CHECK(marched->first == h.face_label);
        CHECK(std::abs(marched->second - h.t) < 1e-8);
    }
    SECTION("random launches agree with the march oracle") {
        for (int i = 0; i < 25; ++i) {
            auto [p, d] = testutil::random_launch(rng(), t, 0.12);
            DirectedGeodesic g = geodesic_from_seed(p, d);
            double t0 = g.param_of(p);
            try {
                HitEvent h = first_hit(t, g, t0);
                auto marched = oracles::march_first_hit(t, g, t0, t0 + 20);
                REQUIRE(marched.has_value());
                CHECK(marched->first == h.face_label);
                CHECK(std::abs(marched->second - h.t) < 1e-8);
            } catch (const EdgeOrVertexHitError&) {
            }
        }
    }
    SECTION("a geodesic outside the body never hits") {
        // both ideal endpoints deep in face 1's far cap
        Vec3 pole = t.face(1).plane.normal().spatial().normalized() * -1.0;
        Vec3 off{0.03, -0.02, 0.04};
        DirectedGeodesic g(BoundaryPoint(pole + off), BoundaryPoint(pole - off));
        CHECK_THROWS_MATCHES(first_hit(t, g, -10.0), Error,
                             Catch::Matchers::Predicate<Error>([](const Error& e) {
                                 return e.code() == Errc::no_forward_hit;
                             }));
    }
    SECTION("aiming at an edge aborts") {
        // closest point of the edge between vertices 1 and 2 (faces 1 and 4)
        const Vec3& v1 = t.vertices()[1].point.unit();
        const Vec3& v2 = t.vertices()[2].point.unit();
        DirectedGeodesic edge{BoundaryPoint(v1), BoundaryPoint(v2)};
        Vec4 origin4 = t.interior_ref().hyperboloid();
        double a = -mdot(origin4, edge.start_null()), b = -mdot(origin4, edge.end_null());
        InteriorPoint mid = edge.point_at(0.5 * std::log(a / b));
        DirectedGeodesic aim = geodesic_through(t.interior_ref(), mid);
        try {
            first_hit(t, aim, aim.param_of(t.interior_ref()));
            FAIL("edge hit not detected");
        } catch (const EdgeOrVertexHitError& e) {
            CHECK(e.labels().size() >= 2);
        }
    }
}

TEST_CASE("bounce map") {
    IdealPolyhedron t = ideal_regular_tetrahedron();
    SECTION("reflecting twice restores the arc") {
        auto [p, d] = testutil::random_launch(rng(), t, 0.12);
        DirectedGeodesic g = geodesic_from_seed(p, d);
        HitEvent h = first_hit(t, g, g.param_of(p));
        DirectedGeodesic b = bounce(t, g, h);
        DirectedGeodesic bb = bounce(t, b, HitEvent{h.face_label, h.point, 0, h.inward_normal});
        CHECK(great_circle_distance(bb.start(), g.start()) < 1e-12);
        CHECK(great_circle_distance(bb.end(), g.end()) < 1e-12);
    }
    SECTION("normal incidence retraces") {
        Vec3 aim = t.face(1).plane.normal().spatial().normalized() * -1.0;
        DirectedGeodesic g = geodesic_from_seed(InteriorPoint({0, 0, 0}), aim);
        HitEvent h = first_hit(t, g, g.param_of(InteriorPoint({0, 0, 0})));
        DirectedGeodesic b = bounce(t, g, h);
        CHECK(great_circle_distance(b.start(), g.end()) < 1e-9);
        CHECK(great_circle_distance(b.end(), g.start()) < 1e-9);
    }
    SECTION("the reflected geodesic passes through the hit point") {
        for (int i = 0; i < 20; ++i) {
            auto [p, d] = testutil::random_launch(rng(), t, 0.12);
            DirectedGeodesic g = geodesic_from_seed(p, d);
            try {
                HitEvent h = first_hit(t, g, g.param_of(p));
                DirectedGeodesic b = bounce(t, g, h);
                // cosh-1 of a few ulp is the resolution limit here
                CHECK(cosh_distance_to_geodesic(b, h.point.hyperboloid()) - 1.0 < 1e-12);
            } catch (const EdgeOrVertexHitError&) {
            }
        }
    }
}

TEST_CASE("trace") {
    IdealPolyhedron tet = ideal_regular_tetrahedron();
    IdealPolyhedron oct = ideal_regular_octahedron();

    SECTION("window size and internal consistency") {
        PointedTrajectory pt = testutil::random_trace(rng(), tet, 0.12, 20, 20);
        CHECK(pt.arc_count() == 41);
        CHECK(pt.forward_termination() == TraceTermination::complete);
        for (int n = -20; n <= 20; ++n) {
            const BaseArc& a = pt.arc(n);
            CHECK(a.entry.has_value());
            CHECK(a.entry->t < a.exit.t);
            if (n < 20) {
                // bounce consistency and shared hit points
                DirectedGeodesic expect = reflect(tet.face(pt.symbol(n)).plane, a.geodesic);
                const BaseArc& next = pt.arc(n + 1);
                CHECK(great_circle_distance(expect.start(), next.geodesic.start()) < 1e-10);
                CHECK(great_circle_distance(expect.end(), next.geodesic.end()) < 1e-10);
                CHECK(hyperbolic_distance(a.exit.point, next.entry->point) < 1e-9);
                CHECK(pt.symbol(n) != pt.symbol(n + 1));  // rule (a)
            }
        }
    }
    SECTION("specular law at every hit") {
        for (int k = 0; k < 10; ++k) {
            PointedTrajectory pt = testutil::random_trace(rng(), tet, 0.12, 10, 10);
            for (int n = -10; n < 10; ++n)
                CHECK(specular_angle_residual(tet, pt, n) < 1e-9);
        }
    }
    SECTION("time reversal maps symbols a_n to a_{-n-1}") {
        auto [p, d] = testutil::random_launch(rng(), tet, 0.12);
        PointedTrajectory fwd = trace(tet, p, d, 12, 12);
        PointedTrajectory rev = trace(tet, p, d * -1.0, 12, 12);
        REQUIRE(fwd.n_fwd() == 12);
        REQUIRE(rev.n_fwd() == 12);
        for (int n = -12; n <= 11; ++n) CHECK(rev.symbol(n) == fwd.symbol(-n - 1));
        // the reversed base arc runs along the same geodesic backwards
        CHECK(great_circle_distance(rev.arc(0).geodesic.start(), fwd.arc(0).geodesic.end()) <
              1e-12);
    }
    SECTION("zero-window trace is a single complete arc") {
        auto [p, d] = testutil::random_launch(rng(), tet, 0.12);
        PointedTrajectory pt = trace(tet, p, d, 0, 0);
        CHECK(pt.arc_count() == 1);
        CHECK(pt.base().entry.has_value());
        CHECK(extract_code(pt).symbols.size() == 1);
    }
    SECTION("codes of traces validate") {
        for (int k = 0; k < 5; ++k) {
            PointedTrajectory pt = testutil::random_trace(rng(), oct, 0.2, 15, 15);
            Word w = extract_code(pt);
            CHECK(static_cast<int>(w.symbols.size()) == 31);
            CHECK(w.point == 15);
            CHECK_FALSE(validate_word(w, oct).has_value());
        }
    }
}

TEST_CASE("tau re-pointing") {
    IdealPolyhedron tet = ideal_regular_tetrahedron();
    PointedTrajectory pt = testutil::random_trace(rng(), tet, 0.12, 8, 8);
    PointedTrajectory fwd = tau(tet, pt, 1);
    PointedTrajectory back = tau(tet, fwd, -1);
    CHECK(back.n_back() == pt.n_back());
    CHECK(back.n_fwd() == pt.n_fwd());
    for (int n = -8; n <= 8; ++n) CHECK(back.symbol(n) == pt.symbol(n));

    SECTION("window relation") {
        for (int n = -7; n <= 7; ++n) CHECK(fwd.symbol(n) == pt.symbol(n + 1));
    }
    SECTION("code of tau is the shifted code") {
        Word w = extract_code(pt);
        Word wt = extract_code(tau(tet, pt, 1));
        for (int n = -7; n <= 7; ++n) CHECK(wt.at(n) == shift(w, 1).at(n));
    }
    SECTION("extends by tracing when the window is exhausted") {
        PointedTrajectory small = testutil::random_trace(rng(), tet, 0.12, 0, 0);
        PointedTrajectory ext = tau(tet, small, 1);
        CHECK(ext.has(0));
        CHECK(ext.base().entry.has_value());
    }
}

TEST_CASE("endpoint metric d_G") {
    IdealPolyhedron tet = ideal_regular_tetrahedron();
    PointedTrajectory pt = testutil::random_trace(rng(), tet, 0.12, 3, 3);
    CHECK(d_G(pt, pt) == 0.0);

    SECTION("equatorial rotation moves d_G by exactly the angle") {
        for (double alpha : {1e-2, 1e-3, 1e-4}) {
            DirectedGeodesic g(BoundaryPoint::from_angles(0.4, kPi / 2),
                               BoundaryPoint::from_angles(2.0, kPi / 2));
            DirectedGeodesic rot(BoundaryPoint::from_angles(0.4 + alpha, kPi / 2),
                                 BoundaryPoint::from_angles(2.0 + alpha, kPi / 2));
            CHECK(d_G(g, rot) == Catch::Approx(alpha).margin(1e-12));
        }
    }
    SECTION("identical launches give identical base arcs and codes") {
        auto [p, d] = testutil::random_launch(rng(), tet, 0.12);
        PointedTrajectory a = trace(tet, p, d, 6, 6), b = trace(tet, p, d, 6, 6);
        CHECK(d_G(a, b) == 0.0);
        for (int n = -6; n <= 6; ++n) CHECK(a.symbol(n) == b.symbol(n));
    }
    SECTION("metric axioms on random triples") {
        std::uniform_real_distribution<double> u(-1, 1);
        auto random_geo = [&] {
            for (;;) {
                Vec3 a{u(rng()), u(rng()), u(rng())}, b{u(rng()), u(rng()), u(rng())};
                if (a.norm() < 0.1 || b.norm() < 0.1) continue;
                if ((a.normalized() - b.normalized()).norm() < 1e-3) continue;
                return DirectedGeodesic(BoundaryPoint(a), BoundaryPoint(b));
            }
        };
        for (int i = 0; i < 100; ++i) {
            DirectedGeodesic x = random_geo(), y = random_geo(), z = random_geo();
            CHECK(d_G(x, x) == 0.0);
            CHECK(d_G(x, y) == d_G(y, x));
            CHECK(d_G(x, z) <= d_G(x, y) + d_G(y, z) + 1e-12);
            CHECK(d_G(x, y) >= 0.0);
        }
    }
}

TEST_CASE("Hausdorff metric d_H") {
    IdealPolyhedron tet = ideal_regular_tetrahedron();
    PointedTrajectory pt = testutil::random_trace(rng(), tet, 0.12, 2, 2);
    CHECK(d_H(pt, pt) < 1e-6);

    SECTION("agrees with the endpoint-supremum oracle") {
        std::uniform_real_distribution<double> u(-1, 1);
        for (int i = 0; i < 12; ++i) {
            Vec3 a{u(rng()), u(rng()), u(rng())}, b{u(rng()), u(rng()), u(rng())};
            Vec3 c{u(rng()), u(rng()), u(rng())}, d{u(rng()), u(rng()), u(rng())};
            if (a.norm() < 0.1 || b.norm() < 0.1 || c.norm() < 0.1 || d.norm() < 0.1) continue;
            if ((a.normalized() - b.normalized()).norm() < 0.1) continue;
            if ((c.normalized() - d.normalized()).norm() < 0.1) continue;
            BaseArc s1 = arc_on(DirectedGeodesic(BoundaryPoint(a), BoundaryPoint(b)), -1.2, 0.9);
            BaseArc s2 = arc_on(DirectedGeodesic(BoundaryPoint(c), BoundaryPoint(d)), -0.8, 1.1);
            double lib = d_H(s1, s2);
            double oracle = oracles::endpoint_hausdorff(s1, s2);
            CHECK(lib == Catch::Approx(oracle).margin(1e-5));
            CHECK(lib >= 0.0);
            CHECK(d_H(s2, s1) == Catch::Approx(lib).margin(1e-9));
        }
    }
    SECTION("shrinks with the endpoint metric on a perturbation family") {
        DirectedGeodesic g(BoundaryPoint::from_angles(0.4, kPi / 2),
                           BoundaryPoint::from_angles(2.0, kPi / 2));
        BaseArc base = arc_on(g, -1.0, 1.0);
        double prev = 1e9;
        double final_dh = 0;
        for (double alpha : {1e-2, 1e-3, 1e-4}) {
            DirectedGeodesic rot(BoundaryPoint::from_angles(0.4 + alpha, kPi / 2),
                                 BoundaryPoint::from_angles(2.0 + alpha, kPi / 2));
            double dh = d_H(base, arc_on(rot, -1.0, 1.0));
            CHECK(dh < prev);
            prev = dh;
            final_dh = dh;
        }
        CHECK(final_dh < 1e-3);
    }
}
