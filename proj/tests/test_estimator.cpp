#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "oscgeo/estimator.hpp"
#include "oscgeo/tameness.hpp"

using namespace oscgeo;

namespace {

ScalarField bump1(double w, double c = 0.0) {
    return catalog_get("gaussian_bump", {{"d", 1}, {"w", w}, {"c0", c}});
}

ScalarField scaled_square(double lambda) {
    return ScalarField::parse_field("L*t^2", {"t"}, {{"L", lambda}},
                                    Domain::box({1e-4}, {64.0}));
}

std::vector<VecD> log_grid(double lo, double hi, int n) {
    std::vector<VecD> out;
    for (int i = 0; i < n; ++i)
        out.push_back({lo * std::pow(hi / lo, double(i) / (n - 1))});
    return out;
}

}  // namespace

TEST_CASE("oracle at lambda = 0 is the plain integral") {
    auto f = catalog_get("monomial", {{"n", 2}});
    auto psi = bump1(1.0);
    auto r = oracle_integral(f, psi, 0.0, psi.domain());
    REQUIRE(r.converged);
    auto ref = integrate_1d([&](double t) { return psi(VecD{t}); }, -1, 1, 1e-12);
    CHECK(r.value.real() == doctest::Approx(ref.value).epsilon(1e-10));
    CHECK(std::abs(r.value.imag()) <= 1e-10);
}

TEST_CASE("oracle matches a dense reference at lambda = 100") {
    auto f = ScalarField::parse_field("t^2", {"t"}, {}, Domain::box({-2}, {2}));
    auto psi = bump1(1.0);
    auto r = oracle_integral(f, psi, 100.0, psi.domain());
    REQUIRE(r.converged);
    auto re = integrate_1d([&](double t) { return std::cos(100 * t * t) * psi(VecD{t}); },
                           -1, 1, 1e-13);
    auto im = integrate_1d([&](double t) { return std::sin(100 * t * t) * psi(VecD{t}); },
                           -1, 1, 1e-13);
    std::complex<double> ref(re.value, im.value);
    CHECK(std::abs(r.value - ref) <= 1e-8 * std::abs(ref));
}

TEST_CASE("oracle agrees with one symbolic integration by parts") {
    auto f = ScalarField::parse_field("t", {"t"}, {}, Domain::box({-2}, {2}));
    auto psi = bump1(0.8);
    const double lambda = 40.0;
    auto direct = oracle_integral(f, psi, lambda, psi.domain());
    REQUIRE(direct.converged);
    // int e^{i lambda t} psi = (i/lambda) int e^{i lambda t} psi'
    auto dpsi = oscillatory_integral_1d([&](double t) { return t; }, [&](double t) {
        return jet_eval(psi, {t}, 1).coeff({1});
    }, -0.8, 0.8, lambda, 1e-10);
    REQUIRE(dpsi.converged);
    std::complex<double> chained = std::complex<double>(0, 1) / lambda * dpsi.value;
    CHECK(std::abs(direct.value - chained) <= 1e-9);
}

TEST_CASE("oracle self-consistency under tolerance halving") {
    auto f = ScalarField::parse_field("t^2 + t", {"t"}, {}, Domain::box({-2}, {2}));
    auto psi = bump1(0.9);
    auto coarse = oracle_integral(f, psi, 500.0, psi.domain(), 1e-7);
    auto fine = oracle_integral(f, psi, 500.0, psi.domain(), 5e-9);
    REQUIRE(coarse.converged);
    REQUIRE(fine.converged);
    CHECK(std::abs(coarse.value - fine.value) <= 1e-7 * (1 + std::abs(fine.value)));
    CHECK_THROWS_AS(oracle_integral(f, psi, 1.0, psi.domain(), 1e-12),
                    std::invalid_argument);
}

TEST_CASE("decay scan for the square phase") {
    auto f = ScalarField::parse_field("t^2", {"t"}, {}, Domain::box({-2}, {2}));
    auto psi = bump1(1.0);
    std::vector<double> ls = {0.0};
    for (int i = 0; i < 8; ++i) ls.push_back(100.0 * std::pow(10.0, 3.0 * i / 7.0));
    auto table = decay_scan(f, psi, ls, 0, 4);

    CHECK(table.rows.front().lambda == 0.0);
    CHECK(table.rows.front().ratio <= 1.0 + 1e-12);
    for (const auto& r : table.rows) CHECK(r.resolved);
    CHECK(table.lhs_slope == doctest::Approx(-0.5).epsilon(0.1));
    CHECK(std::abs(table.rhs_slope - table.lhs_slope) <= 0.05);
    CHECK(table.ratio_max <= 3.0 * table.ratio_min);

    auto csv = table.csv();
    CHECK(csv.find("lambda,lhs_abs,rhs_bound,ratio,resolved") == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);  // header + 9 rows
}

TEST_CASE("decay scan for the quartic phase") {
    auto f = ScalarField::parse_field("t^4", {"t"}, {}, Domain::box({-2}, {2}));
    auto psi = bump1(1.0);
    std::vector<double> ls;
    for (int i = 0; i < 8; ++i) ls.push_back(100.0 * std::pow(10.0, 3.0 * i / 7.0));
    auto table = decay_scan(f, psi, ls, 0, 4);
    CHECK(table.lhs_slope == doctest::Approx(-0.25).epsilon(0.2));
    CHECK(table.lhs_residual < 0.1);
}

TEST_CASE("sublevel comparison reproduces the closed form for the parabola") {
    auto f = catalog_get("radial_power", {{"p", 2}, {"d", 1}});
    for (double lambda : {100.0, 1000.0, 10000.0}) {
        auto rep = sublevel_compare(f, lambda, 0);
        CHECK(rep.measure == doctest::Approx(2.0 / std::sqrt(lambda)).epsilon(1e-10));
        CHECK(rep.ratio == doctest::Approx(std::numbers::pi / 4).epsilon(1e-4));
        CHECK(rep.shells_geometric);
    }
    // lambda -> 4 lambda halves both sides
    auto a = sublevel_compare(f, 100.0, 0);
    auto b = sublevel_compare(f, 400.0, 0);
    CHECK(b.lhs == doctest::Approx(a.lhs / 2).epsilon(1e-6));
    CHECK(b.measure == doctest::Approx(a.measure / 2).epsilon(1e-10));
}

TEST_CASE("sublevel ratios stay bounded for l = 1 and for the quartic") {
    auto f2 = catalog_get("radial_power", {{"p", 2}, {"d", 1}});
    auto f4 = catalog_get("radial_power", {{"p", 4}, {"d", 1}});
    for (auto* f : {&f2, &f4}) {
        for (int l : {0, 1}) {
            std::vector<double> ratios;
            for (double lambda : {10.0, 100.0, 1000.0, 10000.0})
                ratios.push_back(sublevel_compare(*f, lambda, l).ratio);
            double lo = *std::min_element(ratios.begin(), ratios.end());
            double hi = *std::max_element(ratios.begin(), ratios.end());
            CHECK(lo > 0.0);
            CHECK(hi <= 2.0 * lo);
        }
    }
}

TEST_CASE("sublevel input validation") {
    auto f = catalog_get("radial_power", {{"p", 2}, {"d", 1}});
    CHECK_THROWS_AS(sublevel_compare(f, -1.0, 0), std::invalid_argument);
    auto conc = ScalarField::parse_field("-t^2", {"t"}, {}, Domain::box({-2}, {2}));
    CHECK_THROWS_AS(sublevel_compare(conc, 100.0, 0), ConvexityError);
    auto off = ScalarField::parse_field("t^2 + 1", {"t"}, {}, Domain::box({-2}, {2}));
    CHECK_THROWS_AS(sublevel_compare(off, 100.0, 0), std::invalid_argument);
}

TEST_CASE("theorem 1 pipeline: identity and stable pointwise constant") {
    auto atlas = bnw_atlas(1);
    auto region = log_grid(0.3, 3.0, 400);
    auto probes = log_grid(0.8, 1.2, 25);
    auto psi = bump1(0.25, 1.0);

    double K_prev = -1;
    for (double lambda : {100.0, 1000.0, 10000.0}) {
        auto f = scaled_square(lambda);
        auto R = bnw_scale_assignment(f, 0.5);
        auto rep = theorem1_verify(atlas, f, psi, R, 1.0, 3, region, probes);
        CHECK(rep.resolved);
        CHECK(rep.identity_rel_error <= 1e-6);
        CHECK(rep.identity_pass());
        CHECK(rep.active_cells > 0);
        CHECK(rep.reduced_cells > 0);  // these frequencies are all high
        CHECK(rep.pointwise_K > 0.0);
        if (K_prev > 0) {
            CHECK(rep.pointwise_K <= 3.0 * K_prev);
            CHECK(K_prev <= 3.0 * rep.pointwise_K);
        }
        K_prev = rep.pointwise_K;
    }
}

TEST_CASE("theorem 1 pipeline: low-frequency cells pass through untouched") {
    auto atlas = bnw_atlas(1);
    auto region = log_grid(0.3, 3.0, 400);
    auto probes = log_grid(0.8, 1.2, 15);
    auto psi = bump1(0.25, 1.0);
    auto f = scaled_square(0.05);
    auto R = bnw_scale_assignment(f, 0.5);
    auto rep = theorem1_verify(atlas, f, psi, R, 1.0, 3, region, probes);
    CHECK(rep.low_cells == rep.active_cells);
    CHECK(rep.reduced_cells == 0);
    CHECK(std::abs(rep.assembled_raw - rep.assembled_reduced) == 0.0);
    CHECK(rep.identity_pass());
}

TEST_CASE("theorem 1 pipeline: zero amplitude and hypothesis failure") {
    auto atlas = bnw_atlas(1);
    auto region = log_grid(0.3, 3.0, 200);
    auto probes = log_grid(0.8, 1.2, 9);
    auto f = scaled_square(100.0);
    auto R = bnw_scale_assignment(f, 0.5);

    auto zero = ScalarField::parse_field("0*t", {"t"}, {}, Domain::ball({1.0}, 0.25), 6, true);
    auto rep = theorem1_verify(atlas, f, zero, R, 1.0, 3, region, probes);
    CHECK(rep.active_cells == 0);
    CHECK(std::abs(rep.assembled_reduced) == 0.0);
    CHECK(rep.pointwise_K == 0.0);

    ScaleAssignment bad = R;
    bad.scale = [R](const VecD& x) {
        int r = R.scale(x);
        return (std::abs(x[0] - 1.0) < 0.05) ? r + 5 : r;
    };
    auto psi = bump1(0.25, 1.0);
    try {
        theorem1_verify(atlas, f, psi, bad, 1.0, 3, region, probes);
        FAIL("expected a hypothesis failure");
    } catch (const HypothesisFailure& e) {
        CHECK(!e.report.lipschitz_pass);
        CHECK(!e.report.witnesses.empty());
    }
}
