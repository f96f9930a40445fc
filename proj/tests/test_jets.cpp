#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oscgeo/field.hpp"
#include "oscgeo/jet.hpp"

using namespace oscgeo;

namespace {

// Nested 5-point central differences, used as the independent check against
// jet propagation. The wide stencil keeps roundoff below truncation up to
// order 4 (a two-point stencil at step 1e-4 is under the double-precision
// noise floor already at order 3).
double fd_partial(const std::function<double(const VecD&)>& f, VecD x, const MultiIndex& alpha,
                  double h) {
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] == 0) continue;
        MultiIndex rest = alpha;
        rest[i] -= 1;
        auto shifted = [&](double s) {
            VecD y = x;
            y[i] += s;
            return fd_partial(f, y, rest, h);
        };
        return (shifted(-2 * h) - 8 * shifted(-h) + 8 * shifted(h) - shifted(2 * h)) / (12 * h);
    }
    return f(x);
}

}  // namespace

TEST_CASE("polynomial jet is exact") {
    auto f = ScalarField::parse_field("x^2 + y^2", {"x", "y"}, {}, Domain::box({-9, -9}, {9, 9}));
    Jet j = jet_eval(f, {1.0, 2.0}, 2);
    CHECK(j.value() == 5.0);
    CHECK(j.coeff({1, 0}) == 2.0);
    CHECK(j.coeff({0, 1}) == 4.0);
    CHECK(j.coeff({2, 0}) == 2.0);
    CHECK(j.coeff({0, 2}) == 2.0);
    CHECK(j.coeff({1, 1}) == 0.0);
}

TEST_CASE("exp jet at 0 matches the identity series") {
    auto f = ScalarField::parse_field("exp(t)", {"t"}, {}, Domain::box({-9}, {9}));
    Jet j = jet_eval(f, {0.0}, 3);
    for (int k = 0; k <= 3; ++k) CHECK(j.coeff({k}) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sin(10t) jet at 0") {
    auto f = ScalarField::parse_field("sin(10*t)", {"t"}, {}, Domain::box({-9}, {9}));
    Jet j = jet_eval(f, {0.0}, 2);
    CHECK(j.coeff({0}) == doctest::Approx(0.0));
    CHECK(j.coeff({1}) == doctest::Approx(10.0));
    CHECK(j.coeff({2}) == doctest::Approx(0.0));
}

TEST_CASE("pullback through exponential chart") {
    // f(x) = x^2, chart Phi(t) = e^{3^j t} x0: derivative coeffs (x0^2, 2*3^j x0^2, 4*3^{2j} x0^2)
    auto f = ScalarField::parse_field("x^2", {"x"}, {}, Domain::box({-9}, {9}));
    for (int jscale : {0, -1, 2}) {
        double x0 = 1.7, s = std::pow(3.0, jscale);
        Jet t = Jet::variable(1, 2, 0, 0.0);
        Jet chart = jet_exp(t * s) * x0;
        Jet pull = f.jet_of(std::span<const Jet>(&chart, 1));
        CHECK(pull.value() == doctest::Approx(x0 * x0));
        CHECK(pull.coeff({1}) == doctest::Approx(2 * s * x0 * x0));
        CHECK(pull.coeff({2}) == doctest::Approx(4 * s * s * x0 * x0));
    }
}

TEST_CASE("dk_norm is the sup of low-order coefficients and is monotone") {
    auto f = ScalarField::parse_field("x^2", {"x"}, {}, Domain::box({-9}, {9}));
    Jet t = Jet::variable(1, 3, 0, 0.0);
    Jet chart = jet_exp(t);  // j = 0, x0 = 1
    Jet pull = f.jet_of(std::span<const Jet>(&chart, 1));
    CHECK(dk_norm(pull, 1) == doctest::Approx(2.0));
    CHECK(dk_norm(pull, 2) == doctest::Approx(4.0));
    CHECK(dk_norm(pull, 2) >= dk_norm(pull, 1));
    CHECK(dk_norm(pull, 3) >= dk_norm(pull, 2));

    auto c = ScalarField::parse_field("5", {"x"}, {}, Domain::box({-9}, {9}));
    Jet cj = jet_eval(c, {0.3}, 3);
    for (int k = 1; k <= 3; ++k) CHECK(dk_norm(cj, k) == 0.0);
}

TEST_CASE("jets agree with finite differences for smooth catalog fields") {
    std::vector<ScalarField> fields = {
        ScalarField::parse_field("exp(-(x^2+y^2))", {"x", "y"}, {}, Domain::box({-9, -9}, {9, 9})),
        ScalarField::parse_field("sin(x)*cos(2*y)", {"x", "y"}, {}, Domain::box({-9, -9}, {9, 9})),
        ScalarField::parse_field("log(2 + x + y^2)", {"x", "y"}, {}, Domain::box({-1, -9}, {9, 9})),
    };
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (const auto& f : fields) {
        for (int rep = 0; rep < 5; ++rep) {
            VecD x = {u(rng), u(rng)};
            Jet j = jet_eval(f, x, 4);
            auto fn = [&](const VecD& y) { return f(y); };
            const auto& set = j.index_set();
            for (int i = 0; i < set.size(); ++i) {
                const auto& alpha = set.at(i);
                int o = mi_order(alpha);
                double h = o <= 2 ? 1e-3 : 0.02;
                double fd = fd_partial(fn, x, alpha, h);
                double ex = j.coeffs()[i];
                CHECK(std::abs(fd - ex) <= 1e-5 * (1.0 + std::abs(ex)));
            }
        }
    }
}

TEST_CASE("error paths") {
    auto f = ScalarField::parse_field("abs(t)", {"t"}, {}, Domain::box({-9}, {9}));
    CHECK_THROWS(jet_eval(f, {0.0}, 2));
    CHECK(jet_eval(f, {-1.5}, 1).coeff({1}) == -1.0);

    auto g = ScalarField::parse_field("t", {"t"}, {}, Domain::box({0}, {1}));
    CHECK_THROWS_AS(jet_eval(g, {2.0}, 1), std::domain_error);
    CHECK_THROWS(jet_eval(g, {0.5}, 9));  // above m_max
}

TEST_CASE("jet division and powers") {
    Jet t = Jet::variable(1, 4, 0, 0.5);
    Jet r = jet_powi(t, 3) / t;  // t^2
    CHECK(r.value() == doctest::Approx(0.25));
    CHECK(r.coeff({1}) == doctest::Approx(1.0));
    CHECK(r.coeff({2}) == doctest::Approx(2.0));
    CHECK(r.coeff({3}) == doctest::Approx(0.0).epsilon(1e-12));

    Jet p = jet_pow(t, -1.5);
    CHECK(p.coeff({1}) == doctest::Approx(-1.5 * std::pow(0.5, -2.5)));
}
