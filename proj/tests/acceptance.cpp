// Acceptance gate: one pass/fail line per criterion, nonzero exit on failure.
// The CLI determinism criterion needs the binary path via --cli <path>.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oscgeo/cc.hpp"
#include "oscgeo/estimator.hpp"
#include "oscgeo/lp.hpp"
#include "oscgeo/tameness.hpp"

using namespace oscgeo;

namespace {

std::string g_cli;

std::complex<double> osc_int(const ScalarField& f,
                             const std::function<std::complex<double>(double)>& amp,
                             double a, double b) {
    auto re = integrate_1d(
        [&](double t) {
            auto v = amp(t);
            double p = f(VecD{t});
            return std::cos(p) * v.real() - std::sin(p) * v.imag();
        },
        a, b, 1e-13);
    auto im = integrate_1d(
        [&](double t) {
            auto v = amp(t);
            double p = f(VecD{t});
            return std::sin(p) * v.real() + std::cos(p) * v.imag();
        },
        a, b, 1e-13);
    return {re.value, im.value};
}

std::vector<VecD> log_grid(double lo, double hi, int n) {
    std::vector<VecD> out;
    for (int i = 0; i < n; ++i)
        out.push_back({lo * std::pow(hi / lo, double(i) / (n - 1))});
    return out;
}

bool monomial_tameness() {
    for (int n : {2, 3, 4, 6}) {
        auto f = catalog_get("monomial", {{"n", double(n)}});
        auto rep = tameness_constant(f, 1.0, n);
        double want = 0;
        for (int k = 2; k <= n; ++k) {
            double fall = 1.0;
            for (int i = 0; i < k; ++i) fall *= n - i;
            want = std::max(want, fall / std::pow(double(n), k));
        }
        if (!rep.finite() || std::abs(rep.C - want) > 1e-10) return false;
    }
    return true;
}

bool flat_exponential_tameness() {
    auto f = catalog_get("flat_exponential", {{"alpha", 1.0}});  // e^{-2/t} on (0,1]
    auto coarse = tameness_constant(f, 1.0, 4, 2048);
    auto fine = tameness_constant(f, 1.0, 4, 4096);
    if (!coarse.finite() || !fine.finite()) return false;
    return std::abs(fine.C / coarse.C - 1.0) <= 0.01;
}

bool lp_reproduction() {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int d : {1, 2}) {
        Mollifier phi = make_mollifier(d, 4);
        double worst = 0;
        for (int rep = 0; rep < 100; ++rep) {
            ScalarField f = [&] {
                if (d == 1) {
                    ParamMap coef;
                    for (int i = 0; i <= 4; ++i) coef["c" + std::to_string(i)] = u(rng);
                    return catalog_get("polynomial", coef);
                }
                std::ostringstream ex;
                ex.precision(17);
                bool first = true;
                for (int a = 0; a <= 4; ++a)
                    for (int b = 0; a + b <= 4; ++b) {
                        ex << (first ? "" : " + ") << u(rng) << "*x^" << a << "*y^" << b;
                        first = false;
                    }
                return ScalarField::parse_field(ex.str(), {"x", "y"}, {},
                                                Domain::box({-2, -2}, {2, 2}));
            }();
            for (int j : {2, 3, 4}) {
                double lim = 1.0 - std::pow(2.0, -j);
                VecD x(d), h(d), xh(d);
                for (int a = 0; a < d; ++a) {
                    x[a] = u(rng) * lim * 0.7;
                    h[a] = u(rng) * 0.2;
                    xh[a] = x[a] + h[a];
                }
                LPValue lp = lp_project(f, j, x, h, phi);
                worst = std::max(worst, std::abs(lp.value - f(xh)));
            }
        }
        if (worst > 1e-8) return false;
    }
    return true;
}

bool derivative_bound_endpoint() {
    std::vector<double> Ks;
    for (double K : {5.0, 10.0, 20.0}) {
        auto f = ScalarField::parse_field("sin(K*t)", {"t"}, {{"K", K}},
                                          Domain::box({-1.0000001}, {1.0000001}));
        auto cert = epsilon_for(f, 4, 1);
        for (int grid : {8, 16}) {
            auto rep = verify_finitetype(f, cert, 1, 4, grid);
            if (!rep.pass()) return false;
            Ks.push_back(rep.bigfinish_K);
        }
    }
    double lo = *std::min_element(Ks.begin(), Ks.end());
    double hi = *std::max_element(Ks.begin(), Ks.end());
    return lo > 0 && hi <= 3.0 * lo;
}

bool ibp_identity() {
    struct Case {
        ScalarField f;
        double w, omega;
    };
    std::vector<Case> cases = {
        {ScalarField::parse_field("t^2 + 2*t", {"t"}, {}, Domain::box({-2}, {2})), 0.4, 0.4},
        {ScalarField::parse_field("3*t + 0.2*t^3", {"t"}, {}, Domain::box({-2}, {2})), 0.5,
         0.5},
    };
    for (const auto& c : cases) {
        auto psi = catalog_get("gaussian_bump", {{"d", 1}, {"w", c.w}, {"c0", 0.0}});
        auto ref = osc_int(c.f, [&](double t) {
            return std::complex<double>(psi(VecD{t}), 0.0);
        }, -c.w, c.w);
        for (int k : {1, 2, 3}) {
            if (!ibp_expand(k, 1).bookkeeping_ok()) return false;
            auto red = reduce_amplitude(c.f, psi, k, c.omega);
            auto got = osc_int(c.f, [&](double t) { return red(VecD{t}); }, -c.w, c.w);
            if (std::abs(got - ref) > 1e-6 * std::abs(ref)) return false;
        }
    }
    return true;
}

bool bnw_scale_checks() {
    auto atlas = bnw_atlas(1);
    auto f = ScalarField::parse_field("t^2", {"t"}, {}, Domain::box({1e-9}, {64.0}));
    auto R = bnw_scale_assignment(f, 0.5);
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(0.1, 4.0);
    std::vector<VecD> probes;
    for (int i = 0; i < 1000; ++i) probes.push_back({u(rng)});
    for (const VecD& x : probes)
        if (R.scale(x) != -2) return false;
    auto rep = validate_hypotheses(*atlas, f, R, 1.0, 4, probes);
    if (!rep.all_pass() || R.N != 2) return false;
    CanonicalScaleParams P;
    for (const VecD& x : probes)
        if (std::abs(canonical_scale(*atlas, f, P, x) - (-2)) > 2) return false;
    return true;
}

bool partition_sums() {
    auto atlas = bnw_atlas(1);
    auto region = log_grid(0.3, 3.0, 1000);
    std::vector<std::function<int(const VecD&)>> assignments = {
        [](const VecD&) { return -2; },
        [](const VecD& x) { return x[0] < 1.0 ? -2 : -3; },
    };
    for (const auto& R : assignments) {
        Partition p = build_partition(atlas, R, region, 2);
        for (const VecD& y : region)
            if (std::abs(p.sum(y) - 1.0) > 1e-12) return false;
        for (const VecD& y : region) {
            int oc = p.overlap_count(y);
            if (oc < 1 || oc > 8) return false;
            for (std::size_t k = 0; k < p.cells().size(); ++k)
                if (!atlas->in_ball(p.cells()[k].scale, p.cells()[k].center, y) &&
                    p.value(k, y) != 0.0)
                    return false;
        }
    }
    return true;
}

bool decay_rates() {
    std::vector<double> ls;
    for (int i = 0; i < 8; ++i) ls.push_back(100.0 * std::pow(10.0, 3.0 * i / 7.0));
    auto psi = catalog_get("gaussian_bump", {{"d", 1}, {"w", 1.0}, {"c0", 0.0}});
    struct Want {
        const char* expr;
        double slope;
    };
    for (const Want& w : {Want{"t^2", -0.5}, Want{"t^4", -0.25}}) {
        auto f = ScalarField::parse_field(w.expr, {"t"}, {}, Domain::box({-2}, {2}));
        auto table = decay_scan(f, psi, ls, 0, 4);
        for (const auto& r : table.rows)
            if (!r.resolved) return false;
        if (std::abs(table.lhs_slope - w.slope) > 0.05) return false;
        if (std::abs(table.rhs_slope - table.lhs_slope) > 0.05) return false;
        if (table.ratio_max > 3.0 * table.ratio_min) return false;
    }
    return true;
}

bool sublevel_ratio() {
    auto f2 = catalog_get("radial_power", {{"p", 2}, {"d", 1}});
    for (double lambda : {1e2, 1e3, 1e4}) {
        auto rep = sublevel_compare(f2, lambda, 0);
        if (std::abs(rep.ratio - std::numbers::pi / 4) > 1e-4) return false;
        if (!rep.shells_geometric) return false;
    }
    auto f4 = catalog_get("radial_power", {{"p", 4}, {"d", 1}});
    for (auto* f : {&f2, &f4}) {
        for (int l : {0, 1}) {
            if (f == &f2 && l == 0) continue;  // covered above
            std::vector<double> ratios;
            for (double lambda : {1e2, 1e3, 1e4})
                ratios.push_back(sublevel_compare(*f, lambda, l).ratio);
            double lo = *std::min_element(ratios.begin(), ratios.end());
            double hi = *std::max_element(ratios.begin(), ratios.end());
            if (!(lo > 0) || hi > 2.0 * lo) return false;
        }
    }
    return true;
}

bool theorem1_end_to_end() {
    auto atlas = bnw_atlas(1);
    auto region = log_grid(0.3, 3.0, 400);
    auto probes = log_grid(0.8, 1.2, 25);
    auto psi = catalog_get("gaussian_bump", {{"d", 1}, {"w", 0.25}, {"c0", 1.0}});
    std::vector<double> Ks;
    for (double lambda : {1e2, 1e3, 1e4}) {
        auto f = ScalarField::parse_field("L*t^2", {"t"}, {{"L", lambda}},
                                          Domain::box({1e-4}, {64.0}));
        auto R = bnw_scale_assignment(f, 0.5);
        auto rep = theorem1_verify(atlas, f, psi, R, 1.0, 3, region, probes);
        if (!rep.identity_pass() || !(rep.pointwise_K > 0)) return false;
        Ks.push_back(rep.pointwise_K);
    }
    double lo = *std::min_element(Ks.begin(), Ks.end());
    double hi = *std::max_element(Ks.begin(), Ks.end());
    return hi <= 3.0 * lo;
}

bool cc_geometry() {
    auto heis = cc_system("heisenberg");
    auto rep = cc_axiom_check(heis, {0.0, 0.0, 0.0}, {0.25}, 100000, 11);
    if (!rep.all_pass()) return false;
    if (std::abs(rep.doubling_ratio / 16.0 - 1.0) > 0.10) return false;

    auto flat = cc_system("flat");
    VecD delta = {0.4, 0.2};
    auto cloud = cc_ball_sample(flat, {0.0, 0.0}, delta, 100000, 16, 7);
    double area = cloud_volume(cloud, 96);
    if (std::abs(area / (std::numbers::pi * delta[0] * delta[1]) - 1.0) > 0.05) return false;

    auto grushin = cc_system("grushin");
    auto grep = cc_axiom_check(grushin, {0.0, 0.0}, {0.25}, 200, 3);
    if (grep.integrability_pass || grep.all_pass()) return false;
    bool witness = false;
    for (const auto& w : grep.witnesses) witness = witness || w.axiom == "integrability";
    return witness;
}

int run_cli(const std::string& args) {
    std::string cmd = g_cli + " " + args + " > /dev/null 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

bool cli_determinism() {
    if (g_cli.empty()) return false;
    const std::string out = "/tmp/oscgeo_accept_out";
    const std::string csv = "/tmp/oscgeo_accept_csv";
    std::vector<std::string> cmds = {
        "tame-check --phase t^2 --order 4 --out " + out,
        "eps-find --phase 'sin(3*t)' --m 4 --l 1 --out " + out,
        "lp-verify --dim 1 --count 5 --seed 7 --out " + out,
        "axioms --atlas bnw --dim 1 --points 10 --seed 3 --out " + out,
        "partition --phase t^2 --C 0.5 --samples 150 --out " + out,
        "reduce --phase t^2+2*t --k 2 --omega 0.4 --out " + out,
        "decay --phase t^2 --lambda 1e2:1e3:geometric:3 --m 3 --csv " + csv + " --out " + out,
        "sublevel --phase t^2 --lambda 1e2 --l 0 --out " + out,
        "cc-check --system heisenberg --delta 0.25 --paths 2000 --seed 5 --csv " + csv +
            " --out " + out,
    };
    for (const std::string& c : cmds) {
        if (run_cli(c) != 0) return false;
        std::string first = slurp(out), first_csv = slurp(csv);
        if (run_cli(c) != 0) return false;
        if (slurp(out) != first || slurp(csv) != first_csv) return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--cli") g_cli = argv[i + 1];

    struct Criterion {
        const char* name;
        bool (*fn)();
    };
    const Criterion criteria[] = {
        {"monomial tameness closed form", monomial_tameness},
        {"non-finite-type tameness stability", flat_exponential_tameness},
        {"Littlewood-Paley polynomial reproduction", lp_reproduction},
        {"derivative bound endpoint constant", derivative_bound_endpoint},
        {"integration-by-parts identity and bookkeeping", ibp_identity},
        {"radial scale function and hypotheses", bnw_scale_checks},
        {"partition of unity sums", partition_sums},
        {"oscillatory decay rates", decay_rates},
        {"sublevel-set inequality", sublevel_ratio},
        {"end-to-end amplitude reduction", theorem1_end_to_end},
        {"Carnot-Caratheodory geometry", cc_geometry},
        {"CLI determinism", cli_determinism},
    };

    int failures = 0;
    int idx = 0;
    for (const Criterion& c : criteria) {
        ++idx;
        bool ok = false;
        try {
            ok = c.fn();
        } catch (const std::exception& e) {
            std::fprintf(stderr, "criterion %d threw: %s\n", idx, e.what());
        }
        std::printf("criterion %2d (%s): %s\n", idx, c.name, ok ? "PASS" : "FAIL");
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures;
}
