#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "h3b/billiard.hpp"
#include "h3b/code.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace h3b;

namespace {

Word make_word(std::vector<int> symbols, int point = 0) {
    return Word{std::move(symbols), point};
}

EventuallyPeriodicCode make_code(std::vector<int> left, std::vector<int> core,
                                 std::vector<int> right, int alphabet, int point = 0) {
    return EventuallyPeriodicCode{std::move(left), Word{std::move(core), point},
                                  std::move(right), alphabet};
}

}  // namespace

TEST_CASE("rule checks on finite words") {
    IdealPolyhedron t = ideal_regular_tetrahedron();
    CHECK_FALSE(validate_word(make_word({1, 2, 1, 3}), t).has_value());

    auto va = validate_word(make_word({1, 1}), t);
    REQUIRE(va.has_value());
    CHECK(va->rule == Rule::A);
    CHECK(va->position == 0);

    auto vb = validate_word(make_word({1, 2, 1, 2, 1, 2, 1, 2}), t);
    REQUIRE(vb.has_value());
    CHECK(vb->rule == Rule::B);
    CHECK(vb->witness == "1 2 1 2 1 2 1 2");

    // (12)^3 inside a valid context passes
    CHECK_FALSE(validate_word(make_word({3, 1, 2, 1, 2, 1, 2, 3}), t).has_value());

    CHECK_THROWS_MATCHES(validate_word(make_word({1, 5}), t), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Errc::alphabet_mismatch;
                         }));
}

TEST_CASE("rule checks on eventually periodic codes") {
    IdealPolyhedron t = ideal_regular_tetrahedron();

    SECTION("vertex-set tail violates rule c") {
        auto v = validate_code(make_code({1, 2, 3, 4}, {}, {1, 2, 3}, 4), t);
        REQUIRE(v.has_value());
        CHECK(v->rule == Rule::C);
        CHECK(v->tail == RuleViolation::Tail::right);
    }
    SECTION("four-symbol period misses every vertex set") {
        CHECK_FALSE(validate_code(make_code({1, 2, 3, 4}, {1}, {2, 3, 1, 4}, 4), t).has_value());
    }
    SECTION("an adjacent pair repeated forever violates rule b, not c") {
        auto v = validate_code(make_code({2, 1}, {3}, {1, 4}, 4), t);
        REQUIRE(v.has_value());
        CHECK(v->rule == Rule::B);
    }
    SECTION("seam repetitions are caught") {
        auto v = validate_code(make_code({1, 2}, {2, 3}, {1, 4}, 4), t);
        REQUIRE(v.has_value());
        CHECK(v->rule == Rule::A);
    }
}

TEST_CASE("forbidden word enumeration") {
    IdealPolyhedron t = ideal_regular_tetrahedron();
    auto fw = forbidden_words(t);
    CHECK(fw.size() == 16);  // 4 doubles + 12 alternations
    int len2 = 0, len8 = 0;
    for (const auto& w : fw) {
        if (w.size() == 2) ++len2;
        if (w.size() == 8) ++len8;
    }
    CHECK(len2 == 4);
    CHECK(len8 == 12);

    IdealPolyhedron o = ideal_regular_octahedron();
    auto fo = forbidden_words(o);
    CHECK(fo.size() == 8 + 24);
    for (const auto& w : fo) CHECK((w.size() == 2 || w.size() == 6));
}

TEST_CASE("word validity is factor exclusion") {
    // every word over the tetrahedron alphabet up to length 10: the rule
    // checker and brute-force forbidden-factor search must agree
    IdealPolyhedron t = ideal_regular_tetrahedron();
    auto fw = forbidden_words(t);
    long checked = 0, valid = 0;
    for (int len = 1; len <= 10; ++len) {
        std::vector<int> w(static_cast<std::size_t>(len), 1);
        for (;;) {
            bool brute_ok = true;
            for (const auto& f : fw)
                if (oracles::contains_factor(w, f)) { brute_ok = false; break; }
            bool lib_ok = !validate_word(Word{w, 0}, t).has_value();
            if (brute_ok != lib_ok) {
                CAPTURE(w);
                REQUIRE(brute_ok == lib_ok);
            }
            ++checked;
            if (lib_ok) ++valid;
            int i = len - 1;
            while (i >= 0 && w[static_cast<std::size_t>(i)] == 4) {
                w[static_cast<std::size_t>(i)] = 1;
                --i;
            }
            if (i < 0) break;
            ++w[static_cast<std::size_t>(i)];
        }
    }
    CHECK(checked == 4 + 16 + 64 + 256 + 1024 + 4096 + 16384 + 65536 + 262144 + 1048576);
    CHECK(valid > 0);
}

TEST_CASE("traced codes avoid the forbidden set") {
    std::mt19937_64 gen(0xc0de);
    IdealPolyhedron t = ideal_regular_tetrahedron();
    auto fw = forbidden_words(t);
    for (int k = 0; k < 5; ++k) {
        Word w = extract_code(testutil::random_trace(gen, t, 0.12, 20, 20));
        for (const auto& f : fw) CHECK_FALSE(oracles::contains_factor(w.symbols, f));
    }
}

TEST_CASE("membership in X and its closure") {
    IdealPolyhedron t = ideal_regular_tetrahedron();
    EventuallyPeriodicCode vertex_cycle = make_code({1, 2, 3}, {}, {1, 2, 3}, 4);
    CHECK(in_X_tilde(vertex_cycle, t));
    CHECK_FALSE(in_X(vertex_cycle, t));

    EventuallyPeriodicCode doubled = make_code({1, 2, 3, 4}, {1, 1}, {2, 3, 1, 4}, 4);
    CHECK_FALSE(in_X_tilde(doubled, t));
    CHECK_FALSE(in_X(doubled, t));

    SECTION("a traced window embeds into an admissible code") {
        std::mt19937_64 gen(0xc0de + 1);
        Word w = extract_code(testutil::random_trace(gen, t, 0.12, 10, 10));
        // pad with rotations of the full-alphabet period so the seams differ
        auto rotate_until = [&](std::vector<int> period, int seam) {
            while (period.front() == seam) std::rotate(period.begin(), period.begin() + 1, period.end());
            return period;
        };
        std::vector<int> left = {1, 2, 3, 4}, right = rotate_until({1, 2, 3, 4}, w.symbols.back());
        while (left.back() == w.symbols.front())
            std::rotate(left.begin(), left.begin() + 1, left.end());
        EventuallyPeriodicCode c{left, w, right, 4};
        CHECK(in_X(c, t));
    }
    SECTION("membership is shift invariant") {
        EventuallyPeriodicCode c = make_code({1, 2, 3, 4}, {2, 4}, {2, 3, 1, 4}, 4, 1);
        bool base = in_X(c, t);
        for (int s : {-7, -2, 1, 5, 11})
            CHECK(in_X(shift(c, s), t) == base);
    }
}

TEST_CASE("density of X in its closure at finite horizon") {
    // truncations of the vertex cycle, padded admissibly, converge to the
    // inadmissible periodic limit
    IdealPolyhedron t = ideal_regular_tetrahedron();
    EventuallyPeriodicCode limit = make_code({1, 2, 3}, {}, {1, 2, 3}, 4);
    CHECK_FALSE(in_X(limit, t));
    auto rotate_away = [](std::vector<int> p, int seam, bool match_back) {
        while ((match_back ? p.back() : p.front()) == seam)
            std::rotate(p.begin(), p.begin() + 1, p.end());
        return p;
    };
    double last = 2.0;
    for (int m : {1, 2, 4, 8}) {
        std::vector<int> core;
        for (int i = 0; i < 2 * m; ++i) core.push_back(limit.at(i - m));
        EventuallyPeriodicCode trunc =
            make_code(rotate_away({1, 2, 3, 4}, core.front(), true), core,
                      rotate_away({1, 2, 3, 4}, core.back(), false), 4, m);
        CHECK(in_X(trunc, t));
        // the core matches the limit on |n| < m, so d <= 2^-m
        last = sequence_metric(limit, trunc, 64).value;
        CHECK(last <= std::pow(0.5, m));
    }
    CHECK(last <= std::pow(0.5, 8));
}

TEST_CASE("shift") {
    Word w = make_word({1, 2, 3, 4}, 2);
    CHECK(shift(shift(w, 1), -1).point == 2);
    CHECK_THROWS_MATCHES(shift(w, 3), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Errc::point_out_of_range;
                         }));

    EventuallyPeriodicCode c = make_code({1, 2, 3, 4}, {}, {1, 3, 2, 4}, 4);
    EventuallyPeriodicCode moved = shift(c, 4);
    for (long n = -8; n <= 8; ++n) CHECK(moved.at(n) == c.at(n + 4));
    EventuallyPeriodicCode back = shift(moved, -4);
    for (long n = -8; n <= 8; ++n) CHECK(back.at(n) == c.at(n));
}

TEST_CASE("sequence metric") {
    IdealPolyhedron t = ideal_regular_tetrahedron();
    (void)t;
    EventuallyPeriodicCode x = make_code({1, 2, 3, 4}, {1, 2, 3, 4}, {1, 2, 3, 4}, 4);
    CHECK(sequence_metric(x, x, 32).value == 0.0);

    SECTION("first disagreement at |n| = 3 gives 1/8") {
        EventuallyPeriodicCode y = x;
        y.core.symbols[3] = 2;  // position 3
        auto d = sequence_metric(x, y, 32);
        CHECK(d.value == 0.125);
        CHECK_FALSE(d.at_horizon);
    }
    SECTION("disagreement at the point gives 1") {
        EventuallyPeriodicCode y = x;
        y.core.symbols[0] = 3;
        CHECK(sequence_metric(x, y, 32).value == 1.0);
    }
    SECTION("structural equality across different representations") {
        EventuallyPeriodicCode y = make_code({1, 2, 3, 4}, {1, 2, 3, 4, 1, 2, 3, 4},
                                             {1, 2, 3, 4}, 4, 4);
        CHECK(sequence_metric(x, y, 16).value == 0.0);
    }
    SECTION("agreement persisting to the horizon is flagged") {
        // differs from x only at position 30, far beyond the horizon of 16
        std::vector<int> core;
        for (long n = -4; n < 32; ++n) core.push_back(n == 30 ? (x.at(n) % 4) + 1 : x.at(n));
        EventuallyPeriodicCode y = make_code({1, 2, 3, 4}, core, {1, 2, 3, 4}, 4, 4);
        auto near = sequence_metric(x, y, 16);
        CHECK(near.value == std::pow(0.5, 16));
        CHECK(near.at_horizon);
        auto far = sequence_metric(x, y, 64);
        CHECK(far.value == std::pow(0.5, 30));
        CHECK_FALSE(far.at_horizon);
    }
    SECTION("ultrametric inequality holds exactly") {
        std::mt19937_64 gen(0xd15);
        std::uniform_int_distribution<int> sym(1, 4), len(1, 3);
        auto random_code = [&] {
            auto period = [&] {
                std::vector<int> p;
                int L = len(gen) + 1;
                for (int i = 0; i < L; ++i) p.push_back(sym(gen));
                return p;
            };
            std::vector<int> core;
            for (int i = 0, L = len(gen); i < L; ++i) core.push_back(sym(gen));
            return make_code(period(), core, period(), 4);
        };
        for (int i = 0; i < 200; ++i) {
            auto a = random_code(), b = random_code(), c = random_code();
            double ab = sequence_metric(a, b, 24).value;
            double bc = sequence_metric(b, c, 24).value;
            double ac = sequence_metric(a, c, 24).value;
            CHECK(ac <= std::max(ab, bc));
        }
    }
}

TEST_CASE("orbit equality") {
    EventuallyPeriodicCode x = make_code({1, 2, 3, 4}, {2, 4, 1, 3}, {1, 2, 3, 4}, 4, 1);
    CHECK(orbit_equal(x, shift(x, 5), 32));
    EventuallyPeriodicCode ab = make_code({1, 2}, {}, {1, 2}, 4);
    EventuallyPeriodicCode ba = make_code({2, 1}, {}, {2, 1}, 4);
    CHECK(orbit_equal(ab, ba, 16));
    SECTION("a changed core symbol breaks orbit equality") {
        EventuallyPeriodicCode y = x;
        y.core.symbols[2] = 2;
        CHECK_FALSE(orbit_equal(x, y, 24));
    }
}

TEST_CASE("code text format") {
    auto parsed = parse_code("(3 4)* 1 2 . 1 3 (2 4)*");
    auto* epc = std::get_if<EventuallyPeriodicCode>(&parsed);
    REQUIRE(epc != nullptr);
    CHECK(epc->left_period == std::vector<int>{3, 4});
    CHECK(epc->right_period == std::vector<int>{2, 4});
    CHECK(epc->core.symbols == std::vector<int>{1, 2, 1, 3});
    CHECK(epc->core.point == 2);
    CHECK(format_code(*epc) == "(3 4)* 1 2 . 1 3 (2 4)*");

    auto word = parse_code("1 2 . 1 3");
    auto* w = std::get_if<Word>(&word);
    REQUIRE(w != nullptr);
    CHECK(w->point == 2);
    CHECK(format_word(*w) == "1 2 . 1 3");

    auto bare = parse_code("1 2 3");
    CHECK(std::get<Word>(bare).point == 0);

    CHECK_THROWS_AS(parse_code("(1 2* 3"), Error);
    CHECK_THROWS_AS(parse_code("1 (2 3)* 4"), Error);
    CHECK_THROWS_AS(parse_code("1 . 2 . 3"), Error);
}
