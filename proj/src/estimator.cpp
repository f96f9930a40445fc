#include "oscgeo/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oscgeo/tameness.hpp"

namespace oscgeo {

namespace {

void interval_of(const Domain& region, double& a, double& b) {
    if (region.dim() != 1) throw std::invalid_argument("expected a one-dimensional region");
    if (region.kind == Domain::Kind::Ball) {
        a = region.center[0] - region.radius;
        b = region.center[0] + region.radius;
    } else {
        a = region.lo[0];
        b = region.hi[0];
    }
}

struct SlopeFit {
    double slope = 0, residual = 0;
};

SlopeFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
    SlopeFit out;
    const std::size_t n = xs.size();
    if (n < 2) return out;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0) return out;
    out.slope = (n * sxy - sx * sy) / denom;
    double icpt = (sy - out.slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = ys[i] - (out.slope * xs[i] + icpt);
        ss += r * r;
    }
    out.residual = std::sqrt(ss / n);
    return out;
}

// Values of (x . grad)^k psi for k = 0..kmax, via the jet of s -> psi(e^s x).
std::vector<double> dilation_derivatives(const ScalarField& psi, const VecD& x, int kmax) {
    Jet es = jet_exp(Jet::variable(1, kmax, 0, 0.0));
    std::vector<Jet> comps;
    comps.reserve(x.size());
    for (double xi : x) comps.push_back(es * xi);
    Jet g = psi.jet_of(std::span<const Jet>(comps.data(), comps.size()));
    std::vector<double> out(kmax + 1);
    for (int k = 0; k <= kmax; ++k) out[k] = g.coeff({k});
    return out;
}

struct CplxOsc {
    std::complex<double> value{0.0, 0.0};
    bool converged = false;
};

CplxOsc osc_complex(const std::function<double(double)>& phase,
                    const std::function<std::complex<double>(double)>& amp, double a,
                    double b, double tol) {
    auto re = oscillatory_integral_1d(phase, [&](double t) { return amp(t).real(); }, a, b,
                                      1.0, tol);
    auto im = oscillatory_integral_1d(phase, [&](double t) { return amp(t).imag(); }, a, b,
                                      1.0, tol);
    CplxOsc out;
    out.value = re.value + std::complex<double>(0.0, 1.0) * im.value;
    out.converged = re.converged && im.converged;
    return out;
}

// Leaf measure of B_j(x): chart speed times the polar factor r^{d-1}.
double leaf_mass(const ChartAtlas& atlas, int j, const VecD& x, int d) {
    auto q = integrate_1d(
        [&](double t) {
            auto cj = atlas.chart_jets(j, x, VecD{t}, 1);
            double v2 = 0, r2 = 0;
            for (const Jet& c : cj) {
                v2 += c.coeff({1}) * c.coeff({1});
                r2 += c.value() * c.value();
            }
            return std::sqrt(v2) * std::pow(std::sqrt(r2), d - 1);
        },
        -1.0, 1.0, 1e-12);
    return q.value;
}

}  // namespace

OracleResult oracle_integral(const ScalarField& f, const ScalarField& psi, double lambda,
                             const Domain& region, double tol) {
    if (tol < 1e-10) throw std::invalid_argument("oracle_integral: tol must be >= 1e-10");
    if (f.arity() != region.dim() || psi.arity() != region.dim())
        throw std::invalid_argument("oracle_integral: dimension mismatch");
    if (region.dim() == 1) {
        double a, b;
        interval_of(region, a, b);
        auto r = oscillatory_integral_1d([&](double t) { return f(VecD{t}); },
                                         [&](double t) { return psi(VecD{t}); }, a, b,
                                         lambda, tol);
        return {r.value, r.converged, r.nodes_used};
    }
    if (region.dim() == 2) {
        double a0, b0, a1, b1;
        if (region.kind == Domain::Kind::Ball) {
            a0 = region.center[0] - region.radius;
            b0 = region.center[0] + region.radius;
            a1 = region.center[1] - region.radius;
            b1 = region.center[1] + region.radius;
        } else {
            a0 = region.lo[0]; b0 = region.hi[0];
            a1 = region.lo[1]; b1 = region.hi[1];
        }
        auto r = oscillatory_integral_2d(
            [&](double x, double y) { return f(VecD{x, y}); },
            [&](double x, double y) { return psi(VecD{x, y}); }, a0, b0, a1, b1, lambda,
            tol);
        return {r.value, r.converged, r.nodes_used};
    }
    throw std::invalid_argument("oracle_integral: only d <= 2 supported");
}

std::string DecayTable::csv() const {
    std::ostringstream os;
    os << "lambda,lhs_abs,rhs_bound,ratio,resolved\n";
    os.precision(12);
    for (const DecayRow& r : rows)
        os << r.lambda << ',' << r.lhs_abs << ',' << r.rhs_bound << ',' << r.ratio << ','
           << (r.resolved ? 1 : 0) << '\n';
    return os.str();
}

nlohmann::json DecayTable::json() const {
    nlohmann::json rws = nlohmann::json::array();
    for (const DecayRow& r : rows)
        rws.push_back({{"lambda", r.lambda},
                       {"lhs_abs", r.lhs_abs},
                       {"rhs_bound", r.rhs_bound},
                       {"ratio", r.ratio},
                       {"resolved", r.resolved}});
    return {{"phase", phase_id},     {"amplitude", amp_id},
            {"l", l},                {"m", m},
            {"rows", rws},           {"lhs_slope", lhs_slope},
            {"rhs_slope", rhs_slope}, {"lhs_residual", lhs_residual},
            {"rhs_residual", rhs_residual}, {"ratio_min", ratio_min},
            {"ratio_max", ratio_max}};
}

DecayTable decay_scan(const ScalarField& f, const ScalarField& psi,
                      const std::vector<double>& lambdas, int l, int m) {
    if (f.arity() != 1 || psi.arity() != 1)
        throw std::invalid_argument("decay_scan: one-dimensional phases only");
    if (m < 2) throw std::invalid_argument("decay_scan: m must be >= 2");
    if (l < 0) throw std::invalid_argument("decay_scan: l must be >= 0");

    std::vector<double> ls = lambdas;
    std::sort(ls.begin(), ls.end());
    ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
    if (!ls.empty() && ls.front() < 0)
        throw std::invalid_argument("decay_scan: lambda must be nonnegative");

    double a, b;
    interval_of(psi.domain(), a, b);

    DecayTable table;
    table.l = l;
    table.m = m;
    table.phase_id = to_string(*f.expr(), f.variables());
    table.amp_id = to_string(*psi.expr(), psi.variables());

    auto amp = [&](double t) {
        double v = psi(VecD{t});
        return l == 0 ? v : v * std::pow(f(VecD{t}), l);
    };
    auto rhs_integrand = [&](double t, double lambda) {
        VecD x = {t};
        double fx = f(x);
        auto dil = dilation_derivatives(psi, x, m - 1);
        double s = 0;
        for (int k = 0; k < m; ++k) s += std::abs(dil[k]);
        return std::pow(std::abs(fx), l) * s / std::pow(1 + std::abs(lambda * fx), m - 1);
    };

    for (double lambda : ls) {
        DecayRow row;
        row.lambda = lambda;
        if (lambda == 0) {
            auto q = integrate_1d(amp, a, b, 1e-11);
            row.lhs_abs = std::abs(q.value);
            row.resolved = q.converged;
        } else {
            auto q = oscillatory_integral_1d([&](double t) { return f(VecD{t}); }, amp, a, b,
                                             lambda, 1e-9);
            row.lhs_abs = std::abs(q.value);
            row.resolved = q.converged;
        }
        // the |.| kinks in the derivative sum limit the attainable accuracy
        auto qr = integrate_1d([&](double t) { return rhs_integrand(t, lambda); }, a, b, 1e-9);
        row.rhs_bound = qr.value;
        row.resolved = row.resolved && qr.converged;
        row.ratio = row.rhs_bound > 0 ? row.lhs_abs / row.rhs_bound : 0.0;
        table.rows.push_back(row);
    }

    std::vector<double> lx, ly, ry;
    bool first = true;
    for (const DecayRow& r : table.rows) {
        if (!r.resolved || r.lambda <= 0 || r.lhs_abs <= 0 || r.rhs_bound <= 0) continue;
        lx.push_back(std::log(r.lambda));
        ly.push_back(std::log(r.lhs_abs));
        ry.push_back(std::log(r.rhs_bound));
        if (first) {
            table.ratio_min = table.ratio_max = r.ratio;
            first = false;
        } else {
            table.ratio_min = std::min(table.ratio_min, r.ratio);
            table.ratio_max = std::max(table.ratio_max, r.ratio);
        }
    }
    auto lf = fit_loglog(lx, ly);
    auto rf = fit_loglog(lx, ry);
    table.lhs_slope = lf.slope;
    table.lhs_residual = lf.residual;
    table.rhs_slope = rf.slope;
    table.rhs_residual = rf.residual;
    return table;
}

nlohmann::json SublevelReport::json() const {
    return {{"lambda", lambda},   {"l", l},
            {"d", d},             {"lhs", lhs},
            {"measure", measure}, {"ratio", ratio},
            {"shell_measure", shell_measure}, {"shells_geometric", shells_geometric}};
}

SublevelReport sublevel_compare(const ScalarField& f, double lambda, int l, int d) {
    if (d != 1) throw std::invalid_argument("sublevel_compare: only d = 1 supported");
    if (f.arity() != 1) throw std::invalid_argument("sublevel_compare: f must be 1-D");
    if (!(lambda > 0)) throw std::invalid_argument("sublevel_compare: lambda must be > 0");

    double a, b;
    interval_of(f.domain(), a, b);
    if (!(a < 0 && b > 0))
        throw std::invalid_argument("sublevel_compare: domain must contain the origin");

    Jet at0 = jet_eval(f, {0.0}, 1);
    if (std::abs(at0.value()) > 1e-12 || std::abs(at0.coeff({1})) > 1e-12)
        throw std::invalid_argument("sublevel_compare: need f(0) = 0 and f'(0) = 0");
    for (int i = 0; i < 512; ++i) {
        double t = a + (b - a) * (i + 0.5) / 512;
        Jet j2 = jet_eval(f, {t}, 2);
        if (j2.coeff({2}) < -1e-9) throw ConvexityError({t}, {1.0}, j2.coeff({2}));
    }

    SublevelReport rep;
    rep.lambda = lambda;
    rep.l = l;
    rep.d = d;

    auto q = integrate_1d(
        [&](double t) {
            double fx = std::abs(f(VecD{t}));
            return std::pow(fx, l) / std::pow(1 + lambda * fx, l + d + 1);
        },
        a, b, 1e-12);
    rep.lhs = q.value;

    // f is nondecreasing on [0,b] and nonincreasing on [a,0], so the sublevel
    // set is an interval found by bisection on each side
    auto cut = [&](double side, double c) {
        if (std::abs(f(VecD{side})) < c) return std::abs(side);
        double lo = 0.0, hi = side;
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            (std::abs(f(VecD{mid})) < c ? lo : hi) = mid;
        }
        return std::abs(lo);
    };
    auto measure_below = [&](double c) { return cut(b * (1 - 1e-12), c) + cut(a * (1 - 1e-12), c); };

    rep.measure = measure_below(1.0 / lambda);
    for (int k = 0; k <= 10; ++k) {
        double mk = measure_below(std::pow(2.0, k) / lambda);
        rep.shell_measure.push_back(mk);
        if (mk > std::pow(2.0, k) * rep.shell_measure[0] * (1 + 1e-9))
            rep.shells_geometric = false;
    }
    double rhs = std::pow(lambda, -double(l)) * rep.measure;
    rep.ratio = rhs > 0 ? rep.lhs / rhs : 0.0;
    return rep;
}

HypothesisFailure::HypothesisFailure(HypothesisReport rep)
    : std::runtime_error("theorem hypotheses failed on the probe set"),
      report(std::move(rep)) {}

nlohmann::json Theorem1Report::json() const {
    return {{"m", m},
            {"eps", eps},
            {"ambient", {ambient.real(), ambient.imag()}},
            {"assembled_raw", {assembled_raw.real(), assembled_raw.imag()}},
            {"assembled_reduced", {assembled_reduced.real(), assembled_reduced.imag()}},
            {"identity_rel_error", identity_rel_error},
            {"pointwise_K", pointwise_K},
            {"cells", cells},
            {"active_cells", active_cells},
            {"low_cells", low_cells},
            {"reduced_cells", reduced_cells},
            {"resolved", resolved},
            {"identity_pass", identity_pass()}};
}

Theorem1Report theorem1_verify(std::shared_ptr<const ChartAtlas> atlas, const ScalarField& f,
                               const ScalarField& psi, const ScaleAssignment& R, double eps,
                               int m, const std::vector<VecD>& region,
                               const std::vector<VecD>& probes, double C_low, double tol) {
    if (m < 2 || m > 5) throw std::invalid_argument("theorem1_verify: m must be in 2..5");

    auto hyp = validate_hypotheses(*atlas, f, R, eps, m, probes);
    if (!hyp.all_pass()) throw HypothesisFailure(std::move(hyp));

    Partition part = build_partition(atlas, R.scale, region, R.N);
    const int kk = m - 1;
    const int d = f.arity();
    const IbpExpansion& expn = ibp_expand(kk, 1);

    Theorem1Report rep;
    rep.m = m;
    rep.eps = eps;
    rep.cells = static_cast<int>(part.cells().size());

    auto amb = oracle_integral(f, psi, 1.0, psi.domain(), std::max(tol * 1e-2, 1e-10));
    rep.ambient = amb.value;
    rep.resolved = amb.converged;

    const int S = 33;
    const double ctol = std::max(tol * 1e-2, 1e-10);
    double l1_mass = 0;  // assembled L1 norm of the cell amplitudes
    std::vector<char> is_low(part.cells().size(), 1), is_active(part.cells().size(), 0);

    for (std::size_t ci = 0; ci < part.cells().size(); ++ci) {
        const int j = part.cells()[ci].scale;
        const VecD& x = part.cells()[ci].center;

        bool hit = false;
        for (int s = 0; s < S && !hit; ++s) {
            double t = -1.0 + 2.0 * (s + 0.5) / S;
            hit = psi(atlas->chart(j, x, VecD{t})) != 0.0;
        }
        if (!hit) continue;
        is_active[ci] = 1;
        ++rep.active_cells;

        double sup_freq = 0;
        for (int s = 0; s < S; ++s) {
            double t = -1.0 + 2.0 * (s + 0.5) / S;
            VecD y = atlas->chart(j, x, VecD{t});
            sup_freq = std::max(sup_freq,
                                eps * dk_norm_at(f, *atlas, R.scale(y), y, y, 1));
        }
        bool low = sup_freq <= C_low;
        is_low[ci] = low ? 1 : 0;
        (low ? rep.low_cells : rep.reduced_cells)++;

        double mass = leaf_mass(*atlas, j, x, d);
        auto psi_tilde = [&](double t, int order) {
            Jet pa = pullback_jet(psi, *atlas, j, x, VecD{t}, order);
            Jet pb = part.jet(ci, j, x, VecD{t}, order);
            Jet pw = atlas->measure_weight(j, x, VecD{t}, order);
            return pa * pb * pw;
        };
        auto phase = [&](double t) { return f(atlas->chart(j, x, VecD{t})); };

        auto raw = oscillatory_integral_1d(phase, [&](double t) {
            return psi_tilde(t, 0).value();
        }, -1.0, 1.0, 1.0, ctol);
        rep.resolved = rep.resolved && raw.converged;
        rep.assembled_raw += mass * raw.value;
        l1_mass += mass * integrate_1d([&](double t) {
            return std::abs(psi_tilde(t, 0).value());
        }, -1.0, 1.0, 1e-8).value;

        if (low) {
            rep.assembled_reduced += mass * raw.value;
        } else {
            auto red = osc_complex(phase, [&](double t) {
                Jet fj = pullback_jet(f, *atlas, j, x, VecD{t}, kk + 1);
                Jet pj = psi_tilde(t, kk);
                std::complex<double> out = 0;
                for (const auto& [beta, terms] : expn.by_beta)
                    out += pj.coeff(beta) * expn.F(beta, fj);
                return out;
            }, -1.0, 1.0, ctol);
            rep.resolved = rep.resolved && red.converged;
            rep.assembled_reduced += mass * red.value;
        }
    }

    // Away from stationary points the integral can sink below any fixed
    // relative precision, so normalize by the amplitude mass in that regime.
    double ref = std::max(std::abs(rep.ambient), l1_mass);
    rep.identity_rel_error =
        ref > 0 ? std::abs(rep.ambient - rep.assembled_reduced) / ref
                : std::abs(rep.assembled_reduced);

    // pointwise bound: |sum_x psi_x(y)| against the scale-adapted derivative sum
    for (const VecD& y : probes) {
        std::complex<double> pm = 0;
        for (std::size_t ci = 0; ci < part.cells().size(); ++ci) {
            if (!is_active[ci]) continue;
            const int j = part.cells()[ci].scale;
            const VecD& x = part.cells()[ci].center;
            if (!atlas->same_leaf(x, y) || !atlas->in_ball(j, x, y)) continue;
            if (is_low[ci]) {
                pm += psi(y) * part.value(ci, y);
            } else {
                VecD t = atlas->chart_inverse(j, x, y);
                Jet fj = pullback_jet(f, *atlas, j, x, t, kk + 1);
                Jet pa = pullback_jet(psi, *atlas, j, x, t, kk);
                Jet pb = part.jet(ci, j, x, t, kk);
                Jet pw = atlas->measure_weight(j, x, t, kk);
                Jet pj = pa * pb * pw;
                std::complex<double> v = 0;
                for (const auto& [beta, terms] : expn.by_beta)
                    v += pj.coeff(beta) * expn.F(beta, fj);
                pm += v / pw.value();
            }
        }
        int ry = R.scale(y);
        double num = std::abs(psi(y));
        for (int k = 1; k < m; ++k)
            num += std::pow(eps, k) * dk_norm_at(psi, *atlas, ry, y, y, k);
        double den = std::pow(1 + eps * dk_norm_at(f, *atlas, ry, y, y, 1), m - 1);
        if (num > 0) rep.pointwise_K = std::max(rep.pointwise_K, std::abs(pm) * den / num);
    }
    return rep;
}

}  // namespace oscgeo
