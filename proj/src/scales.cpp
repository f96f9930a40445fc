#include "oscgeo/scales.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oscgeo {

namespace {

double radial_ratio(const ScalarField& f, const VecD& x) {
    Jet j1 = jet_eval(f, x, 1);
    const int d = f.arity();
    double g = 0, nrm = 0;
    for (int i = 0; i < d; ++i) {
        MultiIndex e(d, 0);
        e[i] = 1;
        g += x[i] * j1.coeff(e);
        nrm += x[i] * x[i];
    }
    if (nrm == 0) throw std::domain_error("bnw_scale: undefined at the origin");
    if (g <= 0) throw std::domain_error("bnw_scale: x . grad f <= 0, point outside E");
    return j1.value() / g;
}

// dk_norm for k = 1..m from one pullback jet at the ball center.
std::vector<double> center_norms(const ScalarField& f, const ChartAtlas& atlas, int j,
                                 const VecD& x, int m) {
    Jet pj = pullback_jet(f, atlas, j, x, VecD{0.0}, m);
    std::vector<double> out(m + 1, 0.0);
    for (int k = 1; k <= m; ++k) out[k] = dk_norm(pj, k);
    return out;
}

// Membership of the ball B_j(x) in the collection I: the derivative
// inequality at the center and gradient comparability over the ball.
bool in_collection(const ChartAtlas& atlas, const ScalarField& f,
                   const CanonicalScaleParams& P, int j, const VecD& x) {
    if (!atlas.exists(j, x)) return false;
    auto nrm = center_norms(f, atlas, j, x, P.m);
    double lhs = nrm[P.m], rhs = 0;
    for (int k = 1; k < P.m; ++k) rhs += std::pow(P.eps, k - P.m) * nrm[k];
    if (lhs > P.K_highderiv * rhs + 1e-300) return false;

    double sup = 0, inf = std::numeric_limits<double>::infinity();
    for (int s = 0; s < P.ball_samples; ++s) {
        double t = -1.0 + 2.0 * (s + 0.5) / P.ball_samples;
        VecD y = atlas.chart(j, x, VecD{t});
        Jet g = pullback_jet(f, atlas, j - 1, y, VecD{0.0}, 1);
        double v = dk_norm(g, 1);
        sup = std::max(sup, v);
        inf = std::min(inf, v);
    }
    return sup <= P.K_firstderiv * inf + 1e-300;
}

}  // namespace

int bnw_scale(const ScalarField& f, const VecD& x, double C_tame, double radix) {
    if (!(C_tame > 0)) throw std::invalid_argument("bnw_scale: C_tame must be positive");
    double thr = radial_ratio(f, x) / (4.0 * C_tame);
    if (!(thr > 0)) throw std::domain_error("bnw_scale: nonpositive scale threshold");
    int j = static_cast<int>(std::floor(std::log(thr) / std::log(radix)));
    while (std::pow(radix, j + 1) <= thr * (1 + 1e-12)) ++j;
    while (std::pow(radix, j) > thr * (1 + 1e-12)) --j;
    return j;
}

ScaleAssignment bnw_scale_assignment(const ScalarField& f, double C_tame, double radix) {
    ScaleAssignment a;
    a.N = 2;
    a.scale = [f, C_tame, radix](const VecD& x) { return bnw_scale(f, x, C_tame, radix); };
    a.valid = [f](const VecD& x) {
        try {
            radial_ratio(f, x);
            return true;
        } catch (const std::domain_error&) {
            return false;
        }
    };
    return a;
}

int canonical_scale(const ChartAtlas& atlas, const ScalarField& f,
                    const CanonicalScaleParams& params, const VecD& x) {
    if (!(params.eps > 0) || params.eps > 1)
        throw std::invalid_argument("canonical_scale: eps must be in (0, 1]");
    const int cap = atlas.scale_cap();
    for (int j = cap; j >= params.jmin; --j) {
        if (!atlas.exists(j, x)) continue;
        // candidates are enclosed in B_{j+1}(x); at the cap the atlas has no
        // larger ball, so the top scale is checked against itself
        int je = std::min(j + 1, cap);
        if (!atlas.exists(je, x)) continue;
        bool ok = true;
        for (int s = 0; s < params.sub_samples && ok; ++s) {
            double t = params.sub_samples == 1
                           ? 0.0
                           : -0.95 + 1.9 * s / (params.sub_samples - 1);
            VecD xp = atlas.chart(je, x, VecD{t});
            for (int jp = j; jp >= std::max(j - params.depth, params.jmin) && ok; --jp) {
                if (!atlas.exists(jp, xp)) continue;
                VecD hi = atlas.chart(jp, xp, VecD{0.999});
                VecD lo = atlas.chart(jp, xp, VecD{-0.999});
                if (!atlas.in_ball(je, x, hi) || !atlas.in_ball(je, x, lo)) continue;
                if (!in_collection(atlas, f, params, jp, xp)) ok = false;
            }
        }
        if (ok) return j;
    }
    throw std::domain_error("canonical_scale: no admissible scale above the search floor");
}

nlohmann::json HypothesisWitness::json() const {
    return {{"which", which}, {"x", x}, {"y", y}, {"value", value}};
}

nlohmann::json HypothesisReport::json() const {
    nlohmann::json ws = nlohmann::json::array();
    for (const auto& w : witnesses) ws.push_back(w.json());
    return {{"m", m},
            {"eps", eps},
            {"K_highderiv", K_highderiv},
            {"K_firstderiv", K_firstderiv},
            {"lipschitz_pass", lipschitz_pass},
            {"highderiv_pass", highderiv_pass},
            {"firstderiv_pass", firstderiv_pass},
            {"max_scale_jump", max_scale_jump},
            {"highderiv_ratio", highderiv_ratio},
            {"firstderiv_ratio", firstderiv_ratio},
            {"all_pass", all_pass()},
            {"witnesses", ws}};
}

HypothesisReport validate_hypotheses(const ChartAtlas& atlas, const ScalarField& f,
                                     const ScaleAssignment& R, double eps, int m,
                                     const std::vector<VecD>& probes, double K_highderiv,
                                     double K_firstderiv, int ball_samples) {
    HypothesisReport rep;
    rep.m = m;
    rep.eps = eps;
    rep.K_highderiv = K_highderiv;
    rep.K_firstderiv = K_firstderiv;

    std::vector<int> scale(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i) scale[i] = R.scale(probes[i]);

    for (std::size_t i = 0; i < probes.size(); ++i) {
        for (std::size_t l = i + 1; l < probes.size(); ++l) {
            if (!atlas.balls_intersect(scale[i], probes[i], scale[l], probes[l])) continue;
            int diff = std::abs(scale[i] - scale[l]);
            rep.max_scale_jump = std::max(rep.max_scale_jump, diff);
            if (diff > R.N) {
                rep.lipschitz_pass = false;
                rep.witnesses.push_back(
                    {"lipschitz", probes[i], probes[l], static_cast<double>(diff)});
            }
        }
    }

    for (std::size_t i = 0; i < probes.size(); ++i) {
        Jet pj = pullback_jet(f, atlas, scale[i], probes[i], VecD{0.0}, m);
        double lhs = dk_norm(pj, m), rhs = 0;
        for (int k = 1; k < m; ++k) rhs += std::pow(eps, k - m) * dk_norm(pj, k);
        double ratio = rhs > 0 ? lhs / rhs
                               : (lhs > 0 ? std::numeric_limits<double>::infinity() : 0.0);
        rep.highderiv_ratio = std::max(rep.highderiv_ratio, ratio);
        if (ratio > K_highderiv) {
            rep.highderiv_pass = false;
            rep.witnesses.push_back({"highderiv", probes[i], probes[i], ratio});
        }

        double sup = 0, inf = std::numeric_limits<double>::infinity();
        VecD ymin = probes[i];
        for (int s = 0; s < ball_samples; ++s) {
            double t = -1.0 + 2.0 * (s + 0.5) / ball_samples;
            VecD y = atlas.chart(scale[i], probes[i], VecD{t});
            if (!R.valid(y)) {
                rep.firstderiv_pass = false;
                rep.witnesses.push_back({"firstderiv", probes[i], y,
                                         std::numeric_limits<double>::infinity()});
                continue;
            }
            Jet g = pullback_jet(f, atlas, R.scale(y), y, VecD{0.0}, 1);
            double v = eps * dk_norm(g, 1);
            sup = std::max(sup, v);
            if (v < inf) {
                inf = v;
                ymin = y;
            }
        }
        double fratio = sup / (1.0 + inf);
        rep.firstderiv_ratio = std::max(rep.firstderiv_ratio, fratio);
        if (fratio > K_firstderiv) {
            rep.firstderiv_pass = false;
            rep.witnesses.push_back({"firstderiv", probes[i], ymin, fratio});
        }
    }
    return rep;
}

}  // namespace oscgeo
