#include <catch2/catch_amalgamated.hpp>

#include "addcomb/group.hpp"
#include "addcomb/instance_io.hpp"

using namespace addcomb;

TEST_CASE("modular element arithmetic") {
    GroupSpec z12({12});
    CHECK(z12.add(7, 8) == 3);
    for (Idx a = 0; a < 12; ++a) CHECK(z12.add(a, 0) == a);

    GroupSpec v({2, 2});
    CHECK(v.add(v.index_of({1, 0}), v.index_of({1, 1})) == v.index_of({0, 1}));
}

TEST_CASE("group axioms exhaustively on small groups") {
    for (const auto& factors : {std::vector<std::uint32_t>{12}, {2, 2, 2, 2}, {4, 3, 5}, {256}}) {
        GroupSpec g(factors);
        REQUIRE(g.order() <= 256);
        const Idx n = static_cast<Idx>(g.order());
        for (Idx a = 0; a < n; ++a) {
            CHECK(g.add(a, g.neg(a)) == 0);
            CHECK(g.add(a, 0) == a);
            for (Idx b = 0; b < n; ++b) {
                CHECK(g.add(a, b) == g.add(b, a));
                for (Idx c = 0; c < n; c += 7) {
                    CHECK(g.add(g.add(a, b), c) == g.add(a, g.add(b, c)));
                }
            }
        }
    }
}

TEST_CASE("mixed-radix index bijection") {
    GroupSpec g({4, 3, 5});
    for (Idx x = 0; x < g.order(); ++x) CHECK(g.index_of(g.residues(x)) == x);
}

TEST_CASE("character evaluation") {
    GroupSpec z4({4});
    const cplx i_val = z4.char_eval(1, 1);
    CHECK(i_val.real() == Catch::Approx(0.0).margin(1e-15));
    CHECK(i_val.imag() == Catch::Approx(1.0).margin(1e-15));
    CHECK(z4.char_dist(1, 1) == Catch::Approx(std::sqrt(2.0)).margin(1e-12));

    GroupSpec v({2, 2});
    const Idx chi = v.index_of({1, 1});
    CHECK(v.char_eval(chi, v.index_of({1, 0})).real() == -1.0);
    CHECK(v.char_eval(chi, v.index_of({1, 0})).imag() == 0.0);

    for (Idx chi2 = 0; chi2 < 4; ++chi2) CHECK(v.char_eval(chi2, 0) == cplx{1.0, 0.0});
}

TEST_CASE("characters are multiplicative and unimodular") {
    GroupSpec g({8, 3});
    for (Idx chi = 0; chi < g.order(); chi += 5) {
        for (Idx x = 0; x < g.order(); ++x) {
            CHECK(std::abs(std::abs(g.char_eval(chi, x)) - 1.0) < 1e-12);
            for (Idx y = 0; y < g.order(); y += 3) {
                const cplx lhs = g.char_eval(chi, g.add(x, y));
                const cplx rhs = g.char_eval(chi, x) * g.char_eval(chi, y);
                CHECK(std::abs(lhs - rhs) < 1e-12);
            }
        }
    }
}

TEST_CASE("character orthogonality") {
    for (const auto& factors : {std::vector<std::uint32_t>{64}, {2, 2, 2, 2, 2, 2}, {4, 3, 5}}) {
        GroupSpec g(factors);
        REQUIRE(g.order() <= 64);
        for (Idx c1 = 0; c1 < g.order(); c1 += 3) {
            for (Idx c2 = 0; c2 < g.order(); c2 += 5) {
                cplx acc{0.0, 0.0};
                for (Idx x = 0; x < g.order(); ++x) acc += g.char_eval(c1, x) * std::conj(g.char_eval(c2, x));
                acc /= static_cast<double>(g.order());
                const double expect = c1 == c2 ? 1.0 : 0.0;
                CHECK(std::abs(acc - cplx{expect, 0.0}) < 1e-10);
            }
        }
    }
}

TEST_CASE("group set bitmap") {
    GroupSpec g({16});
    GroupSet s(g);
    s.insert(3);
    s.insert(3);
    s.insert(7);
    CHECK(s.size() == 2);
    CHECK(s.contains(3));
    CHECK_FALSE(s.contains(4));
    const GroupSet t = translate(g, s, 10);
    CHECK(t.contains(13));
    CHECK(t.contains(1));
}

TEST_CASE("uniform measures") {
    GroupSpec g({8});
    const Measure point = Measure::uniform(g, GroupSet::singleton(g, 0));
    CHECK(point[0] == 1.0);

    const Measure haar = Measure::uniform(g, GroupSet::full(g));
    CHECK(haar[5] == Catch::Approx(1.0 / 8.0));

    GroupSet two(g);
    two.insert(1);
    two.insert(3);
    const Measure m = Measure::uniform(g, two);
    CHECK(m[1] == Catch::Approx(0.5));
    CHECK(m.mass() == Catch::Approx(1.0).margin(1e-12));

    CHECK_THROWS_AS(Measure::uniform(g, GroupSet(g)), std::invalid_argument);
}

TEST_CASE("instance round trip") {
    const std::string text = R"({"group": {"factors": [8, 3]}, "A": [[1, 0], [2, 2]], "S": [[0, 1]]})";
    const Instance inst = parse_instance(text);
    CHECK(inst.group.order() == 24);
    CHECK(inst.A.size() == 2);
    CHECK(inst.S.size() == 1);
    const Instance again = parse_instance(serialize_instance(inst));
    CHECK(again.A == inst.A);
    CHECK(again.S == inst.S);
    CHECK(again.group == inst.group);
}

TEST_CASE("instance parse errors carry location") {
    CHECK_THROWS_AS(parse_instance("{"), ParseError);
    CHECK_THROWS_AS(parse_instance(R"({"group": {"factors": [4]}, "A": [[9]], "S": []})"), ParseError);
    CHECK_THROWS_WITH(parse_instance(R"({"group": {"factors": [4]}, "A": [[1], [5]], "S": []})"),
                      Catch::Matchers::ContainsSubstring("A[1]"));
    CHECK_THROWS_AS(parse_instance(R"({"group": {"factors": [4]}, "A": []})"), ParseError);
}

TEST_CASE("mismatched specs rejected") {
    GroupSpec a({4}), b({5});
    CHECK_THROWS_AS(require_same_spec(a, b), std::invalid_argument);
}
