#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oscgeo/scales.hpp"

using namespace oscgeo;

namespace {

ScalarField square_1d() {
    return ScalarField::parse_field("t^2", {"t"}, {}, Domain::box({1e-9}, {64.0}));
}

std::vector<VecD> ray_probes(int n, double lo, double hi, unsigned seed = 7) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<VecD> pts;
    for (int i = 0; i < n; ++i) pts.push_back({u(rng)});
    return pts;
}

}  // namespace

TEST_CASE("radial scale of homogeneous phases") {
    auto f2 = catalog_get("radial_power", {{"p", 2}, {"d", 2}});
    // f/(x . grad f) = 1/2, threshold 1/4: 3^{-2} <= 1/4 < 3^{-1}
    CHECK(bnw_scale(f2, {0.5, 0.5}, 0.5) == -2);
    CHECK(bnw_scale(f2, {3.0, -1.0}, 0.5) == -2);

    auto f4 = catalog_get("radial_power", {{"p", 4}, {"d", 2}});
    // ratio 1/4, threshold 1/12: 3^{-3} <= 1/12 < 3^{-2}
    CHECK(bnw_scale(f4, {0.7, 0.1}, 0.75) == -3);
    CHECK(bnw_scale(f4, {-2.0, 1.0}, 0.75) == -3);
}

TEST_CASE("threshold soundness at random probes") {
    auto f = ScalarField::parse_field("t^2 + t^4", {"t"}, {}, Domain::box({1e-9}, {8.0}));
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.05, 2.0);
    for (int rep = 0; rep < 50; ++rep) {
        VecD x = {u(rng)};
        int R = bnw_scale(f, x, 0.9);
        Jet j1 = jet_eval(f, x, 1);
        double thr = j1.value() / (x[0] * j1.coeff({1})) / (4 * 0.9);
        CHECK(std::pow(3.0, R) <= thr * (1 + 1e-12));
        CHECK(std::pow(3.0, R + 1) > thr * (1 + 1e-12));
    }
}

TEST_CASE("homogeneous phases get a constant scale") {
    auto f = square_1d();
    int first = bnw_scale(f, {0.037}, 0.5);
    for (const VecD& x : ray_probes(40, 0.01, 8.0)) CHECK(bnw_scale(f, x, 0.5) == first);
    CHECK(first == -2);
}

TEST_CASE("scale function error paths") {
    auto f = square_1d();
    CHECK_THROWS_AS(bnw_scale(f, {0.5}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(bnw_scale(f, {0.5}, -1.0), std::invalid_argument);

    auto f2 = catalog_get("radial_power", {{"p", 2}, {"d", 2}});
    CHECK_THROWS_AS(bnw_scale(f2, {0.0, 0.0}, 0.5), std::domain_error);

    // decreasing along the ray: x . grad f < 0
    auto dec = ScalarField::parse_field("exp(-t)", {"t"}, {}, Domain::box({0.0}, {8.0}));
    CHECK_THROWS_AS(bnw_scale(dec, {0.5}, 0.5), std::domain_error);

    auto assign = bnw_scale_assignment(dec, 0.5);
    CHECK(!assign.valid({0.5}));
    CHECK(bnw_scale_assignment(f, 0.5).valid({0.5}));
}

TEST_CASE("theorem hypotheses hold for the square phase on the radial atlas") {
    auto atlas = bnw_atlas(1);
    auto f = square_1d();
    auto R = bnw_scale_assignment(f, 0.5);
    auto probes = ray_probes(24, 0.1, 4.0);

    auto rep = validate_hypotheses(*atlas, f, R, 1.0, 4, probes);
    CHECK(rep.all_pass());
    CHECK(rep.max_scale_jump == 0);
    CHECK(R.N == 2);
    CHECK(rep.witnesses.empty());
    CHECK(rep.json()["all_pass"] == true);

    // the chart derivative ratio |d^1 f|_R / f is exactly 2 * 3^{-2}
    for (const VecD& x : probes) {
        double nrm = dk_norm_at(f, *atlas, R.scale(x), x, x, 1);
        CHECK(nrm / f(x) == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
    }
}

TEST_CASE("derivative comparability bracket is stable") {
    auto atlas = bnw_atlas(1);
    struct Case { ScalarField f; double C; };
    std::vector<Case> cases = {
        {square_1d(), 0.5},
        {ScalarField::parse_field("t^4", {"t"}, {}, Domain::box({1e-9}, {64.0})), 0.75},
    };
    for (const auto& c : cases) {
        auto R = bnw_scale_assignment(c.f, c.C);
        double K_coarse = 0, K_fine = 0;
        for (int pass = 0; pass < 2; ++pass) {
            auto probes = ray_probes(pass == 0 ? 16 : 48, 0.1, 4.0, pass + 1);
            double K = 0;
            for (const VecD& x : probes) {
                for (int k = 1; k <= 4; ++k) {
                    double r = dk_norm_at(c.f, *atlas, R.scale(x), x, x, k) / c.f(x);
                    REQUIRE(r > 0);
                    K = std::max(K, std::max(r, 1.0 / r));
                }
            }
            (pass == 0 ? K_coarse : K_fine) = K;
        }
        CHECK(K_coarse >= 1.0);
        CHECK(K_fine <= 2.0 * K_coarse);
        CHECK(K_coarse <= 2.0 * K_fine);
        CHECK(K_fine < 50.0);
    }
}

TEST_CASE("a corrupted scale function fails the Lipschitz check with a witness") {
    auto atlas = bnw_atlas(1);
    auto f = square_1d();
    auto good = bnw_scale_assignment(f, 0.5);
    ScaleAssignment bad = good;
    bad.scale = [good](const VecD& x) {
        int r = good.scale(x);
        return (std::abs(x[0] - 1.0) < 0.01) ? r + 5 : r;
    };
    std::vector<VecD> probes = {{0.95}, {1.0}, {1.05}, {1.5}};
    auto rep = validate_hypotheses(*atlas, f, bad, 1.0, 4, probes);
    CHECK(!rep.lipschitz_pass);
    CHECK(rep.max_scale_jump == 5);
    bool found = false;
    for (const auto& w : rep.witnesses) found = found || w.which == "lipschitz";
    CHECK(found);
}

TEST_CASE("canonical scale tracks the radial scale for the square phase") {
    auto atlas = bnw_atlas(1);
    auto f = square_1d();
    CanonicalScaleParams P;
    for (const VecD& x : ray_probes(100, 0.1, 2.0, 11)) {
        int rc = canonical_scale(*atlas, f, P, x);
        int rb = bnw_scale(f, x, 0.5);
        CHECK(std::abs(rc - rb) <= 2);
    }
}

TEST_CASE("canonical scale saturates the cap for a linear phase on the flat atlas") {
    FlatAtlas atlas;  // cap 8
    auto f = ScalarField::parse_field("2*t + 1", {"t"}, {},
                                      Domain::box({-40000.0}, {40000.0}));
    CanonicalScaleParams P;
    for (double x : {-3.0, 0.0, 7.5}) CHECK(canonical_scale(atlas, f, P, {x}) == 8);
}

TEST_CASE("canonical scale regularity on intersecting balls") {
    auto atlas = bnw_atlas(1);
    auto f = square_1d();
    CanonicalScaleParams P;
    auto probes = ray_probes(20, 0.5, 0.7, 5);
    std::vector<int> rc;
    for (const VecD& x : probes) rc.push_back(canonical_scale(*atlas, f, P, x));
    for (std::size_t i = 0; i < probes.size(); ++i)
        for (std::size_t l = i + 1; l < probes.size(); ++l)
            if (atlas->balls_intersect(rc[i], probes[i], rc[l], probes[l]))
                CHECK(std::abs(rc[i] - rc[l]) <= 2);
    CHECK_THROWS_AS(canonical_scale(*atlas, f, CanonicalScaleParams{.eps = 0.0}, {0.5}),
                    std::invalid_argument);
}
