#include "oscgeo/axioms.hpp"

#include <algorithm>
#include <cmath>

#include "oscgeo/quadrature.hpp"

namespace oscgeo {

namespace {

std::vector<VecD> local_grid(int dim, int per_axis, double scale) {
    std::vector<VecD> out;
    if (dim == 1) {
        for (int i = 0; i < per_axis; ++i)
            out.push_back({scale * (-1.0 + 2.0 * i / (per_axis - 1))});
        return out;
    }
    for (int i = 0; i < per_axis; ++i)
        for (int k = 0; k < per_axis; ++k) {
            double u = -1.0 + 2.0 * i / (per_axis - 1);
            double v = -1.0 + 2.0 * k / (per_axis - 1);
            if (u * u + v * v < 1.0) out.push_back({scale * u, scale * v});
        }
    return out;
}

double dist(const VecD& a, const VecD& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

nlohmann::json vec_json(const VecD& v) { return nlohmann::json(v); }

}  // namespace

nlohmann::json AxiomReport::json() const {
    nlohmann::json j;
    j["compatibility"] = compatibility;
    j["engulfing"] = engulfing;
    j["weak_doubling"] = weak_doubling;
    j["nesting"] = nesting;
    j["smooth_engulfing"] = smooth_engulfing;
    j["measure"] = measure;
    j["all_pass"] = all_pass();
    j["nesting_c"] = nesting_c;
    j["doubling_multiplicity"] = doubling_multiplicity;
    nlohmann::json norms = nlohmann::json::object();
    for (const auto& [k, v] : engulfing_norms) norms[std::to_string(k)] = v;
    j["engulfing_norms"] = norms;
    nlohmann::json ws = nlohmann::json::array();
    for (const auto& w : witnesses) {
        ws.push_back({{"axiom", w.axiom},
                      {"j", w.j},
                      {"jp", w.jp},
                      {"x", vec_json(w.x)},
                      {"xp", vec_json(w.xp)},
                      {"value", w.value},
                      {"note", w.note}});
    }
    j["witnesses"] = ws;
    return j;
}

AxiomReport check_axioms(const ChartAtlas& atlas, const AxiomProbe& probe) {
    AxiomReport rep;
    rep.compatibility = true;
    rep.engulfing = true;
    rep.weak_doubling = true;
    rep.nesting = true;
    rep.smooth_engulfing = true;
    rep.measure = true;

    auto add = [&](AxiomWitness w) {
        if (rep.witnesses.size() < 32) rep.witnesses.push_back(std::move(w));
    };

    // (i) x in B_j(x), chart(j,x)(0) = x, inverse round trip on the local grid
    for (const auto& x : probe.points) {
        int bd = atlas.ball_dim(x);
        auto grid = local_grid(bd, probe.ball_samples, 0.999);
        for (int j = probe.jmin; j <= probe.jmax; ++j) {
            if (!atlas.exists(j, x)) continue;
            VecD zero(bd, 0.0);
            VecD c0 = atlas.chart(j, x, zero);
            if (dist(c0, x) > 1e-9 * (1.0 + dist(x, VecD(x.size(), 0.0))) ||
                !atlas.in_ball(j, x, x)) {
                rep.compatibility = false;
                add({"compatibility", j, j, x, x, dist(c0, x), "chart(0) != x or x not in ball"});
            }
            for (const auto& t : grid) {
                VecD y = atlas.chart(j, x, t);
                if (!atlas.in_ball(j, x, y)) {
                    rep.compatibility = false;
                    add({"compatibility", j, j, x, y, 0.0, "chart image leaves the ball"});
                    break;
                }
                VecD back = atlas.chart_inverse(j, x, y);
                if (dist(back, t) > 1e-8) {
                    add({"infrastructure", j, j, x, y, dist(back, t),
                         "chart inversion failure"});
                    break;
                }
            }
        }
    }

    // (iv) nesting: sup |Phi_{j,x}^{-1} o Phi_{j-1,x}| over the closed unit ball
    for (const auto& x : probe.points) {
        int bd = atlas.ball_dim(x);
        auto grid = local_grid(bd, probe.ball_samples, 1.0);
        for (int j = probe.jmin + 1; j <= probe.jmax; ++j) {
            if (!atlas.exists(j, x) || !atlas.exists(j - 1, x)) continue;
            for (const auto& t : grid) {
                auto tr = atlas.transition_jets(j, x, j - 1, x, t, 0);
                double r = 0;
                for (const auto& comp : tr) r += comp.value() * comp.value();
                rep.nesting_c = std::max(rep.nesting_c, std::sqrt(r));
            }
        }
    }
    if (rep.nesting_c >= 1.0 - 1e-9) {
        rep.nesting = false;
        add({"nesting", 0, 0, {}, {}, rep.nesting_c, "image of smaller ball not contracted"});
    }

    // (ii) engulfing, set-theoretically on sampled ball pairs
    for (const auto& x : probe.points) {
        for (const auto& xp : probe.points) {
            for (int j = probe.jmin + 1; j <= probe.jmax; ++j) {
                if (!atlas.exists(j, x) || !atlas.exists(j - 1, x)) continue;
                for (int jp = probe.jmin; jp <= j - 1; ++jp) {
                    if (!atlas.exists(jp, xp)) continue;
                    if (!atlas.balls_intersect(j - 1, x, jp, xp)) continue;
                    auto grid = local_grid(atlas.ball_dim(xp), probe.ball_samples, 0.999);
                    for (const auto& t : grid) {
                        VecD y = atlas.chart(jp, xp, t);
                        if (!atlas.in_ball(j, x, y)) {
                            rep.engulfing = false;
                            add({"engulfing", j, jp, x, xp, t[0],
                                 "point of B_jp(xp) escapes B_j(x)"});
                            break;
                        }
                    }
                }
            }
        }
    }

    // (iii) weak doubling: greedy disjoint packing, then covering multiplicity
    for (int j = probe.jmin; j <= probe.jmax; ++j) {
        std::vector<VecD> centers;
        for (const auto& x : probe.points) {
            if (!atlas.exists(j, x) || !atlas.exists(j - 2, x)) continue;
            bool clear = true;
            for (const auto& z : centers)
                if (atlas.balls_intersect(j - 2, z, j - 2, x)) {
                    clear = false;
                    break;
                }
            if (clear) centers.push_back(x);
        }
        for (const auto& y : probe.points) {
            int count = 0;
            for (const auto& z : centers)
                if (atlas.in_ball(j, z, y)) ++count;
            rep.doubling_multiplicity = std::max(rep.doubling_multiplicity, count);
        }
    }
    if (rep.doubling_multiplicity > probe.doubling_cap) {
        rep.weak_doubling = false;
        add({"weak_doubling", 0, 0, {}, {}, double(rep.doubling_multiplicity),
             "covering multiplicity exceeds cap"});
    }

    // (v) smooth engulfing: jet norms of transitions on intersecting pairs
    for (const auto& x : probe.points) {
        for (const auto& xp : probe.points) {
            for (int j = probe.jmin; j <= probe.jmax; ++j) {
                if (!atlas.exists(j, x)) continue;
                for (int jp = probe.jmin; jp <= j; ++jp) {
                    if (!atlas.exists(jp, xp)) continue;
                    if (!atlas.balls_intersect(j, x, jp, xp)) continue;
                    auto grid = local_grid(atlas.ball_dim(xp), 9, 0.9);
                    double sup = 0;
                    for (const auto& t : grid) {
                        auto tr = atlas.transition_jets(j, x, jp, xp, t, probe.m);
                        for (const auto& comp : tr)
                            sup = std::max(sup, dk_norm(comp, probe.m));
                    }
                    int k = j - jp;
                    auto it = rep.engulfing_norms.find(k);
                    if (it == rep.engulfing_norms.end())
                        rep.engulfing_norms[k] = sup;
                    else
                        it->second = std::max(it->second, sup);
                    if (!std::isfinite(sup)) {
                        rep.smooth_engulfing = false;
                        add({"smooth_engulfing", j, jp, x, xp, sup, "non-finite jet norm"});
                    }
                }
            }
        }
    }

    // (vi) measure weight: normalized on the unit ball, strictly positive
    for (const auto& x : probe.points) {
        int bd = atlas.ball_dim(x);
        if (bd != 1) continue;  // higher-dimensional leaves handled by the CC checker
        for (int j = probe.jmin; j <= probe.jmax; ++j) {
            if (!atlas.exists(j, x)) continue;
            auto f = [&](double t) {
                return atlas.measure_weight(j, x, {t}, 0).value();
            };
            auto q = integrate_1d(f, -1.0, 1.0, 1e-12);
            if (!q.converged || std::abs(q.value - 1.0) > 1e-10) {
                rep.measure = false;
                add({"measure", j, j, x, x, q.value, "weight does not integrate to 1"});
            }
            for (double t = -0.999; t <= 0.999; t += 0.111)
                if (f(t) <= 0.0) {
                    rep.measure = false;
                    add({"measure", j, j, x, x, f(t), "weight not positive"});
                    break;
                }
        }
    }

    return rep;
}

}  // namespace oscgeo
