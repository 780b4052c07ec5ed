#include <catch2/catch_amalgamated.hpp>

#include "addcomb/pipeline.hpp"
#include "addcomb/rng.hpp"
#include "addcomb/spectrum.hpp"

using namespace addcomb;

namespace {

/// Classical dissociativity oracle: exists a nonzero eps in {-1,0,1}^Lambda
/// with sum eps_i lambda_i = 0.
bool has_relation(const GroupSpec& g, const std::vector<Idx>& lambda) {
    const size_t n = lambda.size();
    std::vector<int> eps(n, -1);
    while (true) {
        bool nonzero = false;
        Idx acc = 0;
        for (size_t i = 0; i < n; ++i) {
            if (eps[i] == 1) acc = g.add(acc, lambda[i]);
            if (eps[i] == -1) acc = g.add(acc, g.neg(lambda[i]));
            nonzero |= eps[i] != 0;
        }
        if (nonzero && acc == 0) return true;
        size_t i = 0;
        for (; i < n; ++i) {
            if (eps[i] < 1) {
                ++eps[i];
                break;
            }
            eps[i] = -1;
        }
        if (i == n) return false;
    }
}

int f2_rank(const GroupSpec& g, std::vector<Idx> vecs) {
    int rank = 0;
    // Gaussian elimination over F_2 using residue vectors
    std::vector<std::vector<std::uint32_t>> rows;
    for (Idx v : vecs) rows.push_back(g.residues(v));
    std::vector<bool> used(rows.size(), false);
    for (size_t col = 0; col < g.rank(); ++col) {
        size_t pivot = rows.size();
        for (size_t r = 0; r < rows.size(); ++r)
            if (!used[r] && rows[r][col] == 1) {
                pivot = r;
                break;
            }
        if (pivot == rows.size()) continue;
        used[pivot] = true;
        ++rank;
        for (size_t r = 0; r < rows.size(); ++r) {
            if (r != pivot && rows[r][col] == 1)
                for (size_t c = 0; c < g.rank(); ++c) rows[r][c] ^= rows[pivot][c];
        }
    }
    return rank;
}

}  // namespace

TEST_CASE("riesz product evaluation") {
    GroupSpec g({8});
    const Measure haar = Measure::uniform(g, GroupSet::full(g));
    CHECK(riesz_eval(g, {}, {}, haar) == Catch::Approx(1.0).margin(1e-12));

    // single nontrivial character: mean 1 for every omega
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 8; ++rep) {
        const double phase = 2.0 * std::numbers::pi * uniform_unit(rng);
        const double mag = uniform_unit(rng);
        const cplx w{mag * std::cos(phase), mag * std::sin(phase)};
        CHECK(riesz_eval(g, {3}, {w}, haar) == Catch::Approx(1.0).margin(1e-12));
    }

    GroupSpec f2({2, 2});
    const Measure haar2 = Measure::uniform(f2, GroupSet::full(f2));
    const std::vector<Idx> triple{f2.index_of({1, 0}), f2.index_of({0, 1}), f2.index_of({1, 1})};
    CHECK(riesz_eval(f2, triple, std::vector<cplx>(3, cplx{1.0, 0.0}), haar2) == Catch::Approx(2.0).margin(1e-12));

    // omega = 0 gives exactly the total mass
    CHECK(riesz_eval(f2, triple, std::vector<cplx>(3, cplx{0.0, 0.0}), haar2) == Catch::Approx(1.0).margin(1e-12));
    CHECK_THROWS_AS(riesz_eval(f2, triple, std::vector<cplx>(3, cplx{1.5, 0.0}), haar2), std::invalid_argument);
}

TEST_CASE("riesz products are nonnegative means") {
    std::mt19937_64 rng(3);
    GroupSpec g({24});
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<Idx> lambda;
        std::vector<cplx> omega;
        for (int i = 0; i < 3; ++i) {
            lambda.push_back(static_cast<Idx>(uniform_below(rng, g.order())));
            const double phase = 2.0 * std::numbers::pi * uniform_unit(rng);
            omega.push_back(cplx{std::cos(phase), std::sin(phase)} * uniform_unit(rng));
        }
        GroupSet supp(g);
        for (int i = 0; i < 6; ++i) supp.insert(static_cast<Idx>(uniform_below(rng, g.order())));
        CHECK(riesz_eval(g, lambda, omega, Measure::uniform(g, supp)) >= -1e-12);
    }
}

TEST_CASE("dissociation test on independent characters") {
    GroupSpec f2({2, 2, 2, 2});
    const Measure haar = Measure::uniform(f2, GroupSet::full(f2));
    const std::vector<Idx> indep{f2.index_of({1, 0, 0, 0}), f2.index_of({0, 1, 0, 0}), f2.index_of({0, 0, 1, 0})};
    const auto rep = dissociation_test(f2, indep, haar, 0.0);
    CHECK(rep.dissociated);
    CHECK(rep.max_found == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("dependent triple is caught") {
    GroupSpec f2({2, 2});
    const Measure haar = Measure::uniform(f2, GroupSet::full(f2));
    const std::vector<Idx> triple{f2.index_of({1, 0}), f2.index_of({0, 1}), f2.index_of({1, 1})};
    const auto rep = dissociation_test(f2, triple, haar, 0.0);
    CHECK_FALSE(rep.dissociated);
    CHECK(rep.max_found >= 2.0 - 1e-12);
}

TEST_CASE("grid verdicts agree with the relation-scan oracle") {
    std::mt19937_64 rng(11);
    GroupSpec g({64});
    const Measure haar = Measure::uniform(g, GroupSet::full(g));
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<Idx> lambda;
        for (int i = 0; i < 3; ++i) lambda.push_back(static_cast<Idx>(uniform_below(rng, 64)));
        const bool related = has_relation(g, lambda);
        const auto verdict = dissociation_test(g, lambda, haar, 0.05);
        // a relation with m nonzero entries forces mean >= 1 + 2^-m at omega=1
        if (related) CHECK_FALSE(verdict.dissociated);
        if (!related) {
            CHECK(verdict.dissociated);
            CHECK(verdict.max_found == Catch::Approx(1.0).margin(1e-9));
        }
    }
}

TEST_CASE("monotonicity of dissociativity") {
    std::mt19937_64 rng(13);
    GroupSpec g({32});
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<Idx> lambda;
        for (int i = 0; i < 3; ++i) lambda.push_back(static_cast<Idx>(1 + uniform_below(rng, 31)));
        std::vector<Idx> sub(lambda.begin(), lambda.begin() + 2);
        GroupSet s1(g), s2(g);
        for (int i = 0; i < 5; ++i) {
            s1.insert(static_cast<Idx>(uniform_below(rng, 32)));
            s2.insert(static_cast<Idx>(uniform_below(rng, 32)));
        }
        CHECK(monotonicity_check(g, lambda, sub, Measure::uniform(g, s1), Measure::uniform(g, s2), 0.3, 0.5));
    }
}

TEST_CASE("greedy maximal dissociated subset") {
    GroupSpec f2({2, 2, 2, 2});
    const Measure haar = Measure::uniform(f2, GroupSet::full(f2));

    // Delta = annihilator of a codimension-2 subgroup, minus the identity
    std::vector<Idx> delta;
    for (std::uint32_t a = 0; a < 2; ++a)
        for (std::uint32_t b = 0; b < 2; ++b)
            if (a + b > 0) delta.push_back(f2.index_of({a, b, 0, 0}));
    const auto est = max_dissociated(f2, delta, haar, 0.5, 8);
    CHECK(est.lambda.size() == 2);  // rank of the annihilator
    CHECK_FALSE(est.overflowed);
    // every greedy prefix re-passes its own test
    for (size_t i = 1; i <= est.lambda.size(); ++i) {
        std::vector<Idx> prefix(est.lambda.begin(), est.lambda.begin() + static_cast<std::ptrdiff_t>(i));
        CHECK(dissociation_test(f2, prefix, haar, 0.25).dissociated);
    }

    CHECK(max_dissociated(f2, {0}, haar, 0.5, 4).lambda.empty());

    const std::vector<Idx> single{f2.index_of({1, 1, 0, 1})};
    CHECK(max_dissociated(f2, single, haar, 0.5, 4).lambda == single);
}

TEST_CASE("dissociated equals independent in F_2^n") {
    GroupSpec f2({2, 2, 2, 2});
    const Measure haar = Measure::uniform(f2, GroupSet::full(f2));
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 40; ++rep) {
        std::vector<Idx> lambda;
        for (int i = 0; i < 3; ++i) lambda.push_back(static_cast<Idx>(1 + uniform_below(rng, 15)));
        std::sort(lambda.begin(), lambda.end());
        lambda.erase(std::unique(lambda.begin(), lambda.end()), lambda.end());
        const bool indep = f2_rank(f2, lambda) == static_cast<int>(lambda.size());
        const auto verdict = dissociation_test(f2, lambda, haar, 0.5);  // 0.5 < log 2
        CHECK(verdict.dissociated == indep);
    }
}

TEST_CASE("chang bound on subgroup indicators") {
    GroupSpec f2({2, 2, 2, 2});
    GroupSet h(f2);
    for (std::uint32_t a = 0; a < 2; ++a)
        for (std::uint32_t b = 0; b < 2; ++b) h.insert(f2.index_of({0, 0, a, b}));
    const Measure haar = Measure::uniform(f2, GroupSet::full(f2));
    const ChangBound cb = chang_bound(f2, indicator(f2, h), haar, 0.5);
    CHECK(cb.spec.size() == 4);  // the full annihilator of H
    CHECK(cb.estimate.lambda.size() == 2);
    CHECK(cb.l_f == Catch::Approx(2.0));  // ||1_H||_2 / ||1_H||_1 = sqrt(1/4)/(1/4)

    const ChangBound trivial = chang_bound(f2, Density(16, 1.0), haar, 0.5);
    CHECK(trivial.spec == std::vector<Idx>{0});
    CHECK(trivial.estimate.lambda.empty());
}

TEST_CASE("chang bound logs reference values on random data") {
    std::mt19937_64 rng(23);
    GroupSpec g({128});
    Density f(g.order());
    for (auto& v : f) v = uniform_unit(rng);
    const Measure haar = Measure::uniform(g, GroupSet::full(g));
    const ChangBound cb = chang_bound(g, f, haar, 0.25);
    CHECK(cb.reference > 0.0);
    CHECK(cb.ratio >= 0.0);
    CHECK(std::isfinite(cb.ratio));
}

TEST_CASE("annihilate spectrum: subspace case") {
    GroupSpec f2({2, 2, 2, 2});
    // B = G as a Bohr set with empty frequency set
    const RegularBohr rb = find_regular(bohr_build(f2, {}, {}));
    std::vector<Idx> delta;  // annihilator of H = {x : x1 = x2 = 0}
    for (std::uint32_t a = 0; a < 2; ++a)
        for (std::uint32_t b = 0; b < 2; ++b) delta.push_back(f2.index_of({a, b, 0, 0}));
    const AnnihilateResult res = annihilate_spectrum(rb, delta, 1.0, 1e-9, 4);
    CHECK(res.verified);
    CHECK(res.max_dist == 0.0);
    CHECK(res.lambda.size() == 2);
    const BohrSet bpp(f2, res.bpp_freq, res.bpp_width);
    CHECK(bpp.size() == 4);  // exactly the subgroup H
    for (std::uint32_t a = 0; a < 2; ++a)
        for (std::uint32_t b = 0; b < 2; ++b) CHECK(bpp.contains(f2.index_of({0, 0, a, b})));
}

TEST_CASE("annihilate spectrum: trivial spectrum") {
    GroupSpec g({32});
    const RegularBohr rb = find_regular(bohr_build(g, {}, {}));
    const AnnihilateResult res = annihilate_spectrum(rb, {0}, 1.0, 1e-9, 2);
    CHECK(res.verified);
    CHECK(res.lambda.empty());
    CHECK(res.max_dist == 0.0);
}

TEST_CASE("annihilate spectrum: arithmetic progression spectrum") {
    GroupSpec g({64});
    GroupSet x(g);
    for (int j = -4; j <= 4; ++j) x.insert(g.add(0, static_cast<Idx>((j + 64) % 64)));
    const RegularBohr rb = find_regular(bohr_build(g, {1}, {1.0}));
    const std::vector<Idx> delta = measure_spectrum(g, Measure::uniform(g, x), 0.5);
    const AnnihilateResult res = annihilate_spectrum(rb, delta, 1.0, 0.35, 6);
    CHECK(res.verified);
    CHECK(res.max_dist <= 0.35);
    // re-verify the conclusion against raw character distances
    const BohrSet bpp(g, res.bpp_freq, res.bpp_width);
    for (Idx gamma : delta)
        for (Idx z : bpp.members().members()) CHECK(g.char_dist(gamma, z) <= 0.35 + 1e-12);
}
