#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <set>

#include "oscgeo/ibp.hpp"
#include "oscgeo/quadrature.hpp"

using namespace oscgeo;

namespace {

// oint e^{i f(t)} amp(t) dt on [a, b] by dense real quadrature of both parts.
template <typename Amp>
std::complex<double> osc_int(const ScalarField& f, Amp amp, double a, double b) {
    auto re = integrate_1d(
        [&](double t) {
            std::complex<double> c = amp(t);
            return std::cos(f(VecD{t})) * c.real() - std::sin(f(VecD{t})) * c.imag();
        },
        a, b, 1e-13);
    auto im = integrate_1d(
        [&](double t) {
            std::complex<double> c = amp(t);
            return std::sin(f(VecD{t})) * c.real() + std::cos(f(VecD{t})) * c.imag();
        },
        a, b, 1e-13);
    REQUIRE(re.converged);
    REQUIRE(im.converged);
    return {re.value, im.value};
}

ScalarField bump1(double w) { return catalog_get("gaussian_bump", {{"d", 1}, {"w", w}}); }

}  // namespace

TEST_CASE("order zero is the identity expansion") {
    const IbpExpansion& e = ibp_expand(0, 2);
    CHECK(e.term_count() == 1);
    const auto& terms = e.by_beta.at(MultiIndex{0, 0});
    CHECK(terms.size() == 1);
    CHECK(terms[0].coeff == 1);
    CHECK(terms[0].deg_u() == 0);
    CHECK(terms[0].gammas.empty());
    Jet fj = jet_eval(catalog_get("monomial", {{"n", 3}}), {0.7}, 1);
    CHECK(e.F(MultiIndex{0}, fj) == std::complex<double>(0, 0));  // wrong dim lookup
    const IbpExpansion& e1 = ibp_expand(0, 1);
    CHECK(e1.F(MultiIndex{0}, fj) == std::complex<double>(1, 0));
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(ibp_expand(6, 1), std::invalid_argument);
    CHECK_THROWS_AS(ibp_expand(-1, 1), std::invalid_argument);
    CHECK_THROWS_AS(ibp_expand(2, 4), std::invalid_argument);
    CHECK_THROWS_AS(ibp_expand(2, 0), std::invalid_argument);
}

TEST_CASE("single integration by parts in one dimension") {
    const IbpExpansion& e = ibp_expand(1, 1);
    // F_1 = i/f', F_0 = -i f''/(f')^2, assembled from three raw terms
    CHECK(e.term_count() == 3);

    auto f = ScalarField::parse_field("t^2 + 2*t", {"t"}, {}, Domain::box({-1}, {1}));
    Jet fj = jet_eval(f, {0.3}, 2);
    double fp = 2 * 0.3 + 2, fpp = 2.0;
    auto F1 = e.F(MultiIndex{1}, fj);
    auto F0 = e.F(MultiIndex{0}, fj);
    CHECK(F1.real() == doctest::Approx(0.0));
    CHECK(F1.imag() == doctest::Approx(1.0 / fp).epsilon(1e-14));
    CHECK(F0.real() == doctest::Approx(0.0));
    CHECK(F0.imag() == doctest::Approx(-fpp / (fp * fp)).epsilon(1e-14));
}

TEST_CASE("linear phase reduces to the classical formula") {
    const double a = 5.0;
    auto f = ScalarField::parse_field("a*t", {"t"}, {{"a", a}}, Domain::box({-1}, {1}));
    auto psi = bump1(0.5);

    ReducedAmplitude r1 = reduce_amplitude(f, psi, 1, 1.0);
    for (double x : {-0.3, 0.0, 0.21}) {
        std::complex<double> got = r1(VecD{x});
        double dpsi = jet_eval(psi, {x}, 1).coeff({1});
        CHECK(got.real() == doctest::Approx(0.0));
        CHECK(got.imag() == doctest::Approx(dpsi / a).epsilon(1e-12));
    }

    // k = 3: only the top beta survives, with |F| = |a|^{-3}
    const IbpExpansion& e3 = ibp_expand(3, 1);
    Jet fj = jet_eval(f, {0.1}, 4);
    CHECK(std::abs(e3.F(MultiIndex{3}, fj)) == doctest::Approx(std::pow(a, -3.0)).epsilon(1e-14));
    for (int b = 0; b < 3; ++b) CHECK(std::abs(e3.F(MultiIndex{b}, fj)) == 0.0);
}

TEST_CASE("bookkeeping identities hold for every generated term") {
    for (int d = 1; d <= 3; ++d) {
        int kmax = d == 3 ? 3 : (d == 2 ? 4 : 5);
        for (int k = 0; k <= kmax; ++k) {
            const IbpExpansion& e = ibp_expand(k, d);
            CHECK(e.bookkeeping_ok());
            CHECK(e.term_count() >= 1);
        }
    }
    // the acceptance-level instance, spelled out
    const IbpExpansion& e = ibp_expand(3, 2);
    for (const auto& [beta, terms] : e.by_beta) {
        for (const IbpTerm& t : terms) {
            int s = t.gamma_total(), n = static_cast<int>(t.gammas.size());
            CHECK(mi_order(beta) + t.deg_u() + s == 0);
            CHECK(t.deg_u() + n == -3);
            CHECK(mi_order(beta) + s >= 3);
            CHECK(mi_order(beta) + s <= 6);
            for (const auto& g : t.gammas) CHECK(mi_order(g) <= 4);
        }
    }
}

TEST_CASE("expansion serializes deterministically") {
    auto js = ibp_expand(1, 1).json();
    CHECK(js["k"] == 1);
    CHECK(js["term_count"] == 3);
    CHECK(js.dump() == ibp_expand(1, 1).json().dump());
    std::multiset<long long> coeffs;
    for (const auto& g : js["groups"])
        for (const auto& t : g["terms"]) coeffs.insert(t["coeff"].get<long long>());
    CHECK(coeffs == std::multiset<long long>({1, 1, -2}));
}

TEST_CASE("oscillatory integral identity for a quadratic phase") {
    auto f = ScalarField::parse_field("t^2 + 2*t", {"t"}, {}, Domain::box({-1}, {1}));
    auto psi = bump1(0.5);  // support [-0.5, 0.5], where f' ranges over [1, 3]

    std::complex<double> lhs = osc_int(f, [&](double t) {
        return std::complex<double>(psi(VecD{t}), 0.0);
    }, -0.5, 0.5);

    ReducedAmplitude r2 = reduce_amplitude(f, psi, 2, 0.4);
    std::complex<double> rhs = osc_int(f, [&](double t) { return r2(VecD{t}); }, -0.5, 0.5);
    CHECK(std::abs(lhs - rhs) <= 1e-8 * std::abs(lhs));
}

TEST_CASE("two reductions of order one compose to order two") {
    auto f = ScalarField::parse_field("t^2 + 2*t", {"t"}, {}, Domain::box({-1}, {1}));
    auto psi = bump1(0.5);

    std::complex<double> base = osc_int(f, [&](double t) {
        return std::complex<double>(psi(VecD{t}), 0.0);
    }, -0.5, 0.5);

    ReducedAmplitude once = reduce_amplitude(f, psi, 1, 0.4);
    ReducedAmplitude twice = reduce_amplitude(f, once, 1, 0.4);
    ReducedAmplitude direct = reduce_amplitude(f, psi, 2, 0.4);

    std::complex<double> a = osc_int(f, [&](double t) { return twice(VecD{t}); }, -0.5, 0.5);
    std::complex<double> b = osc_int(f, [&](double t) { return direct(VecD{t}); }, -0.5, 0.5);
    CHECK(std::abs(a - b) <= 1e-7 * std::abs(base));
    CHECK(std::abs(a - base) <= 1e-7 * std::abs(base));
}

TEST_CASE("identity holds in two dimensions") {
    auto f = ScalarField::parse_field("x + y + 0.2*x*y", {"x", "y"}, {},
                                      Domain::box({-1, -1}, {1, 1}));
    auto psi = catalog_get("gaussian_bump", {{"d", 2}, {"w", 0.6}});
    ReducedAmplitude r1 = reduce_amplitude(f, psi, 1, 1.0);

    auto phase = [&](double x, double y) { return f(VecD{x, y}); };
    double B = 0.62;
    auto lhs = oscillatory_integral_2d(phase, [&](double x, double y) {
        return psi(VecD{x, y});
    }, -B, B, -B, B, 1.0, 1e-9);
    auto rhs_re = oscillatory_integral_2d(phase, [&](double x, double y) {
        return r1(VecD{x, y}).real();
    }, -B, B, -B, B, 1.0, 1e-9);
    auto rhs_im = oscillatory_integral_2d(phase, [&](double x, double y) {
        return r1(VecD{x, y}).imag();
    }, -B, B, -B, B, 1.0, 1e-9);
    REQUIRE(lhs.converged);
    REQUIRE(rhs_re.converged);
    REQUIRE(rhs_im.converged);
    std::complex<double> rhs =
        rhs_re.value + std::complex<double>(0, 1) * rhs_im.value;
    CHECK(std::abs(lhs.value - rhs) <= 1e-6 * std::abs(lhs.value));
}

TEST_CASE("hypothesis violations carry witnesses") {
    auto psi = bump1(0.5);

    // stationary point of t^2 at the origin sits on the support
    auto f0 = ScalarField::parse_field("t^2", {"t"}, {}, Domain::box({-1}, {1}));
    try {
        reduce_amplitude(f0, psi, 1, 0.4);
        FAIL("expected a vanishing-gradient error");
    } catch (const GradientVanishes& e) {
        CHECK(e.grad_norm <= 1e-12 * e.sup_grad);
        CHECK(std::abs(e.x[0]) < 1e-9);
    }

    // omega too large for the second-derivative ratio of t^2 + 2t
    auto f = ScalarField::parse_field("t^2 + 2*t", {"t"}, {}, Domain::box({-1}, {1}));
    try {
        reduce_amplitude(f, psi, 2, 10.0);
        FAIL("expected an omega admissibility error");
    } catch (const OmegaViolation& e) {
        CHECK(e.omega == 10.0);
        CHECK(e.omega * e.required_inverse > 1.0);
    }
    CHECK_THROWS_AS(reduce_amplitude(f, psi, 2, -1.0), OmegaViolation);
    CHECK_THROWS_AS(reduce_amplitude(f, psi, 0, 0.4), std::invalid_argument);
}

TEST_CASE("derivative-ratio bound constant is stable under grid refinement") {
    auto f = ScalarField::parse_field("t^2 + 2*t", {"t"}, {}, Domain::box({-1}, {1}));
    auto psi = bump1(0.5);
    for (int k : {1, 2, 3}) {
        ReducedAmplitude coarse = reduce_amplitude(f, psi, k, 0.4, 65);
        ReducedAmplitude fine = reduce_amplitude(f, psi, k, 0.4, 257);
        CHECK(coarse.sharpjunk_constant() > 0.0);
        CHECK(fine.sharpjunk_constant() <= 2.0 * coarse.sharpjunk_constant());
        CHECK(coarse.sharpjunk_constant() <= 2.0 * fine.sharpjunk_constant());
    }
}
