#include <catch2/catch_amalgamated.hpp>

#include "addcomb/bohr.hpp"
#include "addcomb/rng.hpp"
#include "addcomb/sumsets.hpp"

using namespace addcomb;

namespace {

/// Independent regularity recheck: recompute memberships from raw character
/// distances (no entry-array reuse) and test the certificate inequality at
/// every dilate breakpoint in range.
bool recheck_regularity(const BohrSet& base, double lambda, int C) {
    const GroupSpec& g = base.group();
    std::vector<double> width(base.width());
    for (auto& w : width) w = std::min(lambda * w, 2.0);
    auto size_at = [&](double t) {
        std::uint64_t n = 0;
        for (std::uint64_t x = 0; x < g.order(); ++x) {
            bool in = true;
            for (size_t i = 0; i < width.size(); ++i) {
                if (g.char_dist(base.freq()[i], static_cast<Idx>(x)) > std::min(t * width[i], 2.0)) {
                    in = false;
                    break;
                }
            }
            n += in;
        }
        return n;
    };
    const double h = std::log(static_cast<double>(size_at(2.0)) / static_cast<double>(size_at(0.5)));
    const double eta_max = h > 0.0 ? std::min(1.0, 1.0 / (C * h)) : 1.0;
    const double base_count = static_cast<double>(size_at(1.0));
    // breakpoints: every distinct entry value in range, probed from both sides
    std::vector<double> probes;
    for (std::uint64_t x = 0; x < g.order(); ++x) {
        double entry = 0.0;
        for (size_t i = 0; i < width.size(); ++i)
            entry = std::max(entry, g.char_dist(base.freq()[i], static_cast<Idx>(x)) / width[i]);
        if (entry >= 1.0 - eta_max && entry <= 1.0 + eta_max) {
            probes.push_back(entry);
            probes.push_back(entry - 1e-12);
        }
    }
    probes.push_back(1.0 - eta_max);
    probes.push_back(1.0 + eta_max);
    for (double t : probes) {
        if (t < 1.0 - eta_max || t > 1.0 + eta_max) continue;
        const double ratio = static_cast<double>(size_at(t)) / base_count;
        const double bound = 1.0 + C * h * std::abs(t - 1.0);
        if (ratio > bound + 1e-9) return false;
        if (ratio * bound < 1.0 - 1e-9) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("bohr membership basics") {
    GroupSpec g16({16});
    const BohrSet b = bohr_build(g16, {1}, {1.0});
    CHECK(b.size() == 5);  // x with |1 - e^{2 pi i x/16}| <= 1
    for (int x : {0, 1, 2, 14, 15}) CHECK(b.contains(static_cast<Idx>(x)));
    CHECK_FALSE(b.contains(3));

    const BohrSet everything = bohr_build(g16, {}, {});
    CHECK(everything.size() == 16);

    GroupSpec f2({2, 2, 2, 2});
    const Idx gamma = f2.index_of({1, 0, 0, 0});
    const BohrSet hyper = bohr_build(f2, {gamma}, {1.5});
    CHECK(hyper.size() == 8);  // the hyperplane: distances are exactly 0 or 2
    CHECK(hyper.contains(f2.index_of({0, 1, 1, 0})));
    CHECK_FALSE(hyper.contains(f2.index_of({1, 0, 0, 0})));

    CHECK_THROWS_AS(bohr_build(g16, {1}, {2.5}), std::invalid_argument);
    CHECK_THROWS_AS(bohr_build(g16, {1}, {0.0}), std::invalid_argument);
}

TEST_CASE("dilation") {
    GroupSpec g({16});
    const BohrSet b = bohr_build(g, {1}, {2.0});
    CHECK(dilate(b, 1.0).members() == b.members());
    CHECK(dilate(b, 0.5).size() == 5);

    const BohrSet narrow = bohr_build(g, {1}, {0.5});
    CHECK(dilate(narrow, 4.0).size() == 16);  // widths cap at 2

    // composition law in the uncapped regime, dyadic ratios are exact
    const BohrSet quarter = dilate(b, 0.25);
    CHECK(dilate(quarter, 0.5).members() == dilate(b, 0.125).members());

    // monotonicity
    std::uint64_t prev = 0;
    for (double rho : {0.25, 0.5, 0.75, 1.0, 1.5, 2.0}) {
        const std::uint64_t n = b.size_at(rho);
        CHECK(n >= prev);
        prev = n;
    }
}

TEST_CASE("zero membership and symmetry") {
    std::mt19937_64 rng(5);
    for (const auto& factors : {std::vector<std::uint32_t>{64}, {2, 2, 2, 2, 2}, {4, 3, 5}}) {
        GroupSpec g(factors);
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<Idx> freq;
            std::vector<double> width;
            for (int i = 0; i < 2; ++i) {
                freq.push_back(static_cast<Idx>(uniform_below(rng, g.order())));
                width.push_back(0.25 + 1.5 * uniform_unit(rng));
            }
            const BohrSet b = bohr_build(g, freq, width);
            CHECK(b.contains(0));
            const GroupSet m = b.members();
            for (Idx x : m.members()) CHECK(m.contains(g.neg(x)));
        }
    }
}

TEST_CASE("meet is set intersection with min widths") {
    GroupSpec g({64});
    const BohrSet a = bohr_build(g, {1, 5}, {1.0, 0.8});
    const BohrSet b = bohr_build(g, {5, 9}, {1.2, 0.6});
    const BohrSet m = meet(a, b);
    GroupSet expect = a.members();
    expect &= b.members();
    // shared character 5 takes width min(0.8, 1.2) = 0.8, so the meet equals
    // the intersection exactly
    CHECK(m.members() == expect);
    CHECK(meet(a, b).members() == meet(b, a).members());
}

TEST_CASE("entropy") {
    GroupSpec f2({2, 2, 2, 2});
    const BohrSet hyper = bohr_build(f2, {f2.index_of({1, 0, 0, 0})}, {0.5});
    CHECK(entropy(hyper) == 0.0);  // dilates by 2 and 1/2 are the same subspace

    GroupSpec g({16});
    CHECK(entropy(bohr_build(g, {}, {})) == 0.0);

    // enumerate both dilates directly: |B_2| = 16 (width caps at 2),
    // |B_{1/2}| = #{x : 2 sin(pi x/16) <= 1/2} = 3
    const BohrSet b = bohr_build(g, {1}, {1.0});
    CHECK(b.size_at(2.0) == 16);
    CHECK(b.size_at(0.5) == 3);
    CHECK(entropy(b) == Catch::Approx(std::log(16.0 / 3.0)).margin(1e-12));
}

TEST_CASE("regularity certificates") {
    GroupSpec f2({2, 2, 2, 2, 2});
    const BohrSet hyper = bohr_build(f2, {f2.index_of({1, 0, 0, 0, 0})}, {0.5});
    const RegularBohr rb = find_regular(hyper);
    CHECK(rb.cert.verified);
    CHECK(rb.cert.lambda == 1.0);
    CHECK(rb.cert.C == kDefaultRegularityConstant);

    GroupSpec g64({64});
    const RegularBohr r2 = find_regular(bohr_build(g64, {1}, {1.0}));
    CHECK(r2.cert.verified);
    CHECK(r2.cert.lambda >= 1.0);
    CHECK(r2.cert.lambda <= 2.0);
    CHECK(recheck_regularity(bohr_build(g64, {1}, {1.0}), r2.cert.lambda, r2.cert.C));

    GroupSpec gp({101});
    const BohrSet bp = bohr_build(gp, {1, 7}, {1.0, 1.0});
    const RegularBohr r3 = find_regular(bp);
    CHECK(r3.cert.verified);
    CHECK(recheck_regularity(bp, r3.cert.lambda, r3.cert.C));
}

TEST_CASE("intersection lower bound, exact integer counts") {
    std::mt19937_64 rng(99);
    for (const auto& factors : {std::vector<std::uint32_t>{64}, {2, 2, 2, 2, 2, 2, 2, 2}}) {
        GroupSpec g(factors);
        for (int rep = 0; rep < 25; ++rep) {
            const int k = 2 + static_cast<int>(uniform_below(rng, 3));
            std::vector<BohrSet> family;
            for (int i = 0; i < k; ++i) {
                std::vector<Idx> freq{static_cast<Idx>(uniform_below(rng, g.order()))};
                std::vector<double> width{0.3 + 1.7 * uniform_unit(rng)};
                family.push_back(bohr_build(g, freq, width));
            }
            BohrSet met = family[0];
            for (int i = 1; i < k; ++i) met = meet(met, family[i]);
            // mu((meet)_1) >= prod mu(B_{1/2}):  |meet| * |G|^{k-1} >= prod |B_{1/2}|
            unsigned long long lhs = met.size();
            unsigned long long rhs = 1;
            for (int i = 0; i < k; ++i) rhs *= family[i].size_at(0.5);
            for (int i = 0; i < k - 1; ++i) lhs *= g.order();
            CHECK(lhs >= rhs);
        }
    }
}

TEST_CASE("arc bound with discretization slack") {
    for (std::uint32_t n : {8u, 16u, 32u, 64u, 128u, 512u}) {
        GroupSpec g({n});
        const BohrSet b = bohr_build(g, {1}, {2.0});
        for (double eta = 0.05; eta <= 1.0; eta += 0.05) {
            const double measure = static_cast<double>(b.size_at(eta)) / static_cast<double>(n);
            const double arc = std::acos(1.0 - 2.0 * eta * eta) / std::numbers::pi;
            CHECK(measure >= arc - 1.0 / static_cast<double>(n) - 1e-12);
        }
    }
    // pinned counterexample to the slack-free bound: Z_16, eta = 1/2
    GroupSpec g16({16});
    const BohrSet b16 = bohr_build(g16, {1}, {2.0});
    CHECK(b16.size_at(0.5) == 5);
    CHECK(5.0 / 16.0 < 1.0 / 3.0);
}

TEST_CASE("nesting of dilates under translation") {
    GroupSpec g({32});
    const BohrSet b = bohr_build(g, {1, 3}, {1.0, 1.4});
    for (double rho : {0.25, 0.5}) {
        const GroupSet inner = b.set_at(1.0 - rho);
        const GroupSet outer = b.set_at(1.0 + rho);
        const GroupSet mid = b.members();
        for (Idx y : b.set_at(rho).members()) {
            const GroupSet shifted_in = translate(g, inner, y);
            CHECK(shifted_in.subset_of(mid));
            const GroupSet shifted_mid = translate(g, mid, y);
            CHECK(shifted_mid.subset_of(outer));
        }
    }
}

TEST_CASE("bohr measure") {
    GroupSpec g({16});
    const BohrSet b = bohr_build(g, {1}, {1.0});
    const Measure beta = bohr_measure(b, 1.0);
    CHECK(beta[0] == Catch::Approx(0.2));
    CHECK(beta.mass() == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("annihilator bound") {
    GroupSpec f2({2, 2, 2, 2, 2});
    const BohrSet hyper = bohr_build(f2, {f2.index_of({1, 0, 0, 0, 0})}, {1.0});
    const AnnihilatorBound ab = annihilator_bound(hyper, 0.5, 0.5);
    CHECK(ab.verified);
    CHECK(ab.bound == 0.0);  // symmetric difference empty, spectrum trivial on B
    CHECK(ab.max_dist == 0.0);

    GroupSpec g({16});
    const AnnihilatorBound full = annihilator_bound(bohr_build(g, {}, {}), 0.5, 0.25);
    CHECK(full.verified);
    CHECK(full.spec_size == 1);  // only the trivial character
    CHECK(full.max_dist == 0.0);

    GroupSpec g64({64});
    const AnnihilatorBound ab64 = annihilator_bound(bohr_build(g64, {1}, {1.0}), 0.5, 0.25);
    CHECK(ab64.verified);
    CHECK(ab64.max_dist <= ab64.bound + 1e-9);
}
