#include "oscgeo/tameness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace oscgeo {

namespace {

constexpr double kConvexSlack = 1e-10;

std::vector<double> mixed_grid(double T, int n) {
    // uniform half plus a geometric tail toward the singular endpoint 0
    std::vector<double> g;
    int half = std::max(2, n / 2);
    for (int i = 1; i <= half; ++i) g.push_back(T * i / half);
    for (int i = 0; i < half; ++i) g.push_back(T * std::exp(-12.0 * (i + 1) / half));
    std::sort(g.begin(), g.end());
    return g;
}

// One-dimensional tameness sweep over precomputed derivative rows.
// rows[i] = {t, f, f', ..., f^(m)} (recentred values).
void sweep(const std::vector<std::vector<double>>& rows, int m, const VecD& direction,
           TamenessReport& rep) {
    for (const auto& row : rows) {
        double t = row[0];
        double f = row[1], fp = row[2];
        // below the normal floating range the jet has no relative accuracy
        // left; such points are treated as flat
        if (std::abs(f) < std::numeric_limits<double>::min()) f = 0.0;
        if (std::abs(fp) < std::numeric_limits<double>::min()) fp = 0.0;
        if (fp == 0.0) {
            if (f != 0.0) {
                rep.violation_points.push_back(t);
                rep.C = std::numeric_limits<double>::infinity();
            }
            continue;  // flat at the minimum: every ratio is 0 by convention
        }
        for (int k = 2; k <= m; ++k) {
            double fk = row[1 + k];
            // log space: |f|^{k-1} and |f'|^k underflow long before the ratio does
            double ratio = (f == 0.0 || fk == 0.0)
                               ? 0.0
                               : std::exp((k - 1) * std::log(std::abs(f)) +
                                          std::log(std::abs(fk)) -
                                          k * std::log(std::abs(fp)));
            auto it = rep.per_k.find(k);
            if (it == rep.per_k.end())
                rep.per_k[k] = ratio;
            else
                it->second = std::max(it->second, ratio);
            rep.C = std::max(rep.C, ratio);
        }
        (void)direction;
    }
}

std::vector<VecD> directions(int d, int rays) {
    std::vector<VecD> out;
    if (d == 1) {
        out.push_back({1.0});
        out.push_back({-1.0});
        return out;
    }
    if (d == 2) {
        for (int i = 0; i < rays; ++i) {
            double a = 2 * std::numbers::pi * i / rays;
            out.push_back({std::cos(a), std::sin(a)});
        }
        return out;
    }
    // Fibonacci sphere for d = 3
    double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < rays; ++i) {
        double z = 1.0 - 2.0 * (i + 0.5) / rays;
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        out.push_back({r * std::cos(golden * i), r * std::sin(golden * i), z});
    }
    return out;
}

double ray_extent(const ScalarField& f, const VecD& x0, const VecD& w) {
    double cap = 0.0;
    const Domain& dom = f.domain();
    if (dom.kind == Domain::Kind::Ball) {
        cap = 2.0 * dom.radius;
    } else {
        for (int i = 0; i < dom.dim(); ++i) cap += dom.hi[i] - dom.lo[i];
    }
    auto inside = [&](double t) {
        VecD y = x0;
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += t * w[i];
        return dom.contains(y, 1e-9);
    };
    if (!inside(0.0)) return 0.0;
    double lo = 0.0, hi = cap;
    if (inside(hi)) return hi;
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (inside(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace

nlohmann::json TamenessReport::json() const {
    nlohmann::json perk = nlohmann::json::object();
    for (const auto& [k, v] : per_k) perk[std::to_string(k)] = v;
    return {{"m", m},
            {"T", T},
            {"C", std::isfinite(C) ? nlohmann::json(C) : nlohmann::json("inf")},
            {"per_k", perk},
            {"grid_points", grid_points},
            {"rays", rays},
            {"violations", violation_points},
            {"finite", finite()}};
}

TamenessReport tameness_constant(const ScalarField& f, double T, int m, int grid) {
    if (m < 2) throw std::invalid_argument("tameness_constant: m must be >= 2");
    if (f.arity() != 1) throw std::invalid_argument("tameness_constant: f must be 1-D");
    if (T <= 0) throw std::invalid_argument("tameness_constant: T must be positive");

    TamenessReport rep;
    rep.m = m;
    rep.T = T;

    std::vector<std::vector<double>> rows;
    for (double t : mixed_grid(T, grid)) {
        if (!f.domain().contains({t})) continue;
        Jet j = jet_eval(f, {t}, m);
        if (j.coeff({2}) < -kConvexSlack) throw ConvexityError({t}, {1.0}, j.coeff({2}));
        std::vector<double> row = {t};
        for (int k = 0; k <= m; ++k) row.push_back(j.coeff({k}));
        rows.push_back(std::move(row));
    }
    rep.grid_points = static_cast<int>(rows.size());
    sweep(rows, m, {1.0}, rep);
    return rep;
}

TamenessReport radial_tameness(const ScalarField& f, const VecD& x0, int m, int rays,
                               int grid) {
    if (m < 2) throw std::invalid_argument("radial_tameness: m must be >= 2");
    const int d = f.arity();
    if (static_cast<int>(x0.size()) != d)
        throw std::invalid_argument("radial_tameness: origin dimension mismatch");
    if (!f.domain().contains(x0))
        throw std::domain_error("radial_tameness: origin outside domain");

    TamenessReport rep;
    rep.m = m;

    for (const VecD& w : directions(d, rays)) {
        double T = ray_extent(f, x0, w);
        if (T <= 0) continue;
        rep.T = std::max(rep.T, T);
        ++rep.rays;

        auto ray_jet = [&](double t, int order) {
            std::vector<Jet> comps;
            for (int i = 0; i < d; ++i) {
                Jet ti = Jet::variable(1, order, 0, t) * w[i] + x0[i];
                comps.push_back(ti);
            }
            return f.jet_of(std::span<const Jet>(comps.data(), comps.size()));
        };
        // recentring: drop value and slope at the origin so that tangent-plane
        // contact, not absolute size, is measured
        Jet base = ray_jet(0.0, 1);
        double g0 = base.value(), g1 = base.coeff({1});

        std::vector<std::vector<double>> rows;
        for (double t : mixed_grid(T, grid)) {
            Jet j = ray_jet(t, m);
            if (j.coeff({2}) < -kConvexSlack) {
                VecD y = x0;
                for (int i = 0; i < d; ++i) y[i] += t * w[i];
                throw ConvexityError(y, w, j.coeff({2}));
            }
            std::vector<double> row = {t, j.value() - g0 - t * g1, j.coeff({1}) - g1};
            for (int k = 2; k <= m; ++k) row.push_back(j.coeff({k}));
            rows.push_back(std::move(row));
        }
        rep.grid_points = std::max(rep.grid_points, static_cast<int>(rows.size()));
        sweep(rows, m, w, rep);
    }
    return rep;
}

nlohmann::json EpsilonCertificate::json() const {
    nlohmann::json sups = nlohmann::json::object();
    for (const auto& [k, v] : sup_by_order) sups[std::to_string(k)] = v;
    return {{"eps", eps},     {"m", m},
            {"l", l},         {"lhs", lhs},
            {"rhs", rhs},     {"sup_by_order", sups},
            {"degenerate", degenerate}, {"sound", sound()}};
}

EpsilonCertificate epsilon_for(const ScalarField& f, int m, int l, int grid_per_axis) {
    if (l >= m || l < 0) throw std::invalid_argument("epsilon_for: need 0 <= l < m");
    const int d = f.arity();
    if (grid_per_axis <= 0) grid_per_axis = d == 1 ? 512 : (d == 2 ? 64 : 24);

    EpsilonCertificate cert;
    cert.m = m;
    cert.l = l;

    // grid suprema of |d^a f| by order over the unit ball (within the domain)
    std::map<int, double> S;
    for (int k = l; k <= m; ++k) S[k] = 0.0;
    std::vector<int> idx(d, 0);
    long total = 1;
    for (int i = 0; i < d; ++i) total *= grid_per_axis;
    for (long flat = 0; flat < total; ++flat) {
        long r = flat;
        VecD x(d);
        double rho = 0;
        for (int i = 0; i < d; ++i) {
            int q = static_cast<int>(r % grid_per_axis);
            r /= grid_per_axis;
            x[i] = -1.0 + 2.0 * (q + 0.5) / grid_per_axis;
            rho += x[i] * x[i];
        }
        if (rho >= 1.0 || !f.domain().contains(x)) continue;
        Jet j = jet_eval(f, x, m);
        const auto& set = j.index_set();
        for (int i = 0; i < set.size(); ++i) {
            int o = mi_order(set.at(i));
            if (o >= l && o <= m) S[o] = std::max(S[o], std::abs(j.coeffs()[i]));
        }
    }
    cert.sup_by_order = S;

    bool all_zero = true;
    for (int k = l; k <= m; ++k) all_zero = all_zero && S[k] == 0.0;
    if (all_zero) {
        cert.degenerate = true;
        cert.eps = 1.0;
        return cert;
    }

    auto ok = [&](double eps) {
        double lhs = std::pow(eps, m) * S[m];
        double rhs = 0.0;
        for (int k = l; k < m; ++k) rhs = std::max(rhs, std::pow(eps, k) * S[k]);
        return lhs <= rhs * (1 + 1e-12);
    };

    // condition is monotone in eps, so bisect on the log lattice
    if (ok(1.0)) {
        cert.eps = 1.0;
    } else {
        double loglo = std::log(1e-12), loghi = 0.0;
        while (loghi - loglo > 1e-3) {
            double mid = 0.5 * (loglo + loghi);
            (ok(std::exp(mid)) ? loglo : loghi) = mid;
        }
        cert.eps = std::exp(loglo);
    }
    cert.lhs = std::pow(cert.eps, m) * S[m];
    for (int k = l; k < m; ++k) cert.rhs = std::max(cert.rhs, std::pow(cert.eps, k) * S[k]);
    return cert;
}

}  // namespace oscgeo
