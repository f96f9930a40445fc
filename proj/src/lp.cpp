#include "oscgeo/lp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "oscgeo/quadrature.hpp"

namespace oscgeo {

namespace {

double smooth_bump(double s) { return s < 1.0 ? std::exp(-1.0 / (1.0 - s)) : 0.0; }

// Gaussian elimination with partial pivoting, for the tiny moment systems.
VecD solve_dense(std::vector<VecD> A, VecD b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-14)
            throw std::runtime_error("moment system is singular");
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (int r = col + 1; r < n; ++r) {
            double f = A[r][col] / A[col][col];
            for (int c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    VecD x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= A[r][c] * x[c];
        x[r] = s / A[r][r];
    }
    return x;
}

double poly_eval(const VecD& p, double s) {
    double v = 0;
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i) v = v * s + p[i];
    return v;
}

struct KernelNode {
    VecD w;
    double weight;
    Jet phi;  // mollifier jet of order m at w
};

// The bump's high derivatives develop features on the scale of the distance
// to the support boundary, so the mesh is graded geometrically toward it:
// uniform panels would need hundreds of subdivisions for the same accuracy.
void graded_interval(int levels, int subdiv, int order, std::vector<double>& pts,
                     std::vector<double>& wts) {
    // nodes on [0, 1], panels shrinking geometrically toward 1
    std::vector<double> edges = {0.0};
    for (int i = 1; i <= levels; ++i) edges.push_back(1.0 - std::pow(2.0, -i));
    edges.push_back(1.0);
    const auto& xs = gl_nodes(order);
    const auto& ws = gl_weights(order);
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        double h = (edges[e + 1] - edges[e]) / subdiv;
        for (int s = 0; s < subdiv; ++s) {
            double c = edges[e] + (s + 0.5) * h;
            for (int i = 0; i < order; ++i) {
                pts.push_back(c + 0.5 * h * xs[i]);
                wts.push_back(0.5 * h * ws[i]);
            }
        }
    }
}

// q is the refinement level (1 = base, 2 = consistency check).
const std::vector<KernelNode>& kernel_nodes(const Mollifier& phi, int q) {
    static std::map<std::tuple<int, int, int, double>, std::vector<KernelNode>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(phi.d, phi.m, q, phi.poly.empty() ? 0.0 : phi.poly[0]);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<KernelNode> nodes;
    if (phi.d == 1) {
        // two graded halves, refined toward +-1
        std::vector<double> xs, ws;
        graded_interval(12, q, 16, xs, ws);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            nodes.push_back({{xs[i]}, ws[i], phi.jet({xs[i]}, phi.m)});
            nodes.push_back({{-xs[i]}, ws[i], phi.jet({-xs[i]}, phi.m)});
        }
    } else {
        // polar nodes: the features follow the circle, so grade the radius
        std::vector<double> rs, rws;
        graded_interval(12, q, 10, rs, rws);
        int nang = 64 + 32 * q;
        for (std::size_t i = 0; i < rs.size(); ++i) {
            double r = rs[i];
            if (r >= 1.0) continue;
            for (int k = 0; k < nang; ++k) {
                double th = 2 * std::numbers::pi * (k + 0.5) / nang;
                VecD w = {r * std::cos(th), r * std::sin(th)};
                double W = rws[i] * r * 2 * std::numbers::pi / nang;
                nodes.push_back({w, W, phi.jet(w, phi.m)});
            }
        }
    }
    return cache.emplace(key, std::move(nodes)).first->second;
}

std::vector<double> lp_coeffs(const ScalarField& f, int j, const VecD& x,
                              const Mollifier& phi, int panels) {
    const auto& set = MultiIndexSet::get(phi.d, phi.m);
    std::vector<double> c(set.size(), 0.0);
    double scale = std::pow(2.0, -j);
    for (const auto& node : kernel_nodes(phi, panels)) {
        VecD y = x;
        for (int i = 0; i < phi.d; ++i) y[i] -= scale * node.w[i];
        double fv = f(y);
        if (fv == 0.0) continue;
        for (int i = 0; i < set.size(); ++i)
            c[i] += node.weight * fv * node.phi.coeffs()[i];
    }
    for (int i = 0; i < set.size(); ++i) {
        const auto& a = set.at(i);
        c[i] *= std::pow(2.0, mi_order(a) * j) / mi_factorial(a);
    }
    return c;
}

}  // namespace

double Mollifier::operator()(const VecD& t) const {
    double s = 0;
    for (double ti : t) s += ti * ti;
    if (s >= 1.0) return 0.0;
    return poly_eval(poly, s) * smooth_bump(s);
}

Jet Mollifier::jet(const VecD& t, int order) const {
    double s = 0;
    for (double ti : t) s += ti * ti;
    if (s >= 1.0) return Jet::constant(d, order, 0.0);
    Jet rho = Jet::constant(d, order, 0.0);
    for (int i = 0; i < d; ++i) {
        Jet ti = Jet::variable(d, order, i, t[i]);
        rho += ti * ti;
    }
    Jet p = Jet::constant(d, order, 0.0);
    for (int i = static_cast<int>(poly.size()) - 1; i >= 0; --i) p = p * rho + poly[i];
    return p * jet_exp(-jet_inv(1.0 - rho));
}

nlohmann::json Mollifier::json() const {
    return {{"d", d}, {"m", m}, {"poly", poly}};
}

Mollifier make_mollifier(int d, int m) {
    if (d < 1 || d > 2) throw std::invalid_argument("make_mollifier: d must be 1 or 2");
    if (m < 2 || m > 6) throw std::invalid_argument("make_mollifier: need 2 <= m <= 6");

    const int q = m / 2 + 1;  // radial conditions at orders 0, 2, ..., 2*floor(m/2)
    double sigma = d == 1 ? 2.0 : 2.0 * std::numbers::pi;

    std::vector<VecD> A(q, VecD(q));
    for (int i = 0; i < q; ++i)
        for (int k = 0; k < q; ++k) {
            auto integrand = [&](double r) {
                return std::pow(r, 2 * i + 2 * k + d - 1) * smooth_bump(r * r);
            };
            auto res = integrate_1d(integrand, 0.0, 1.0, 1e-14);
            if (!res.converged) throw std::runtime_error("make_mollifier: quadrature failed");
            A[i][k] = res.value;
        }
    VecD rhs(q, 0.0);
    rhs[0] = 1.0 / sigma;

    Mollifier phi;
    phi.d = d;
    phi.m = m;
    phi.poly = solve_dense(std::move(A), std::move(rhs));
    return phi;
}

double mollifier_moment_error(const Mollifier& phi, int quad_order) {
    const auto& set = MultiIndexSet::get(phi.d, phi.m);
    std::vector<double> mom(set.size(), 0.0);
    for (const auto& node : kernel_nodes(phi, std::max(2, quad_order / 24))) {
        double v = node.phi.value();
        if (v == 0.0) continue;
        for (int r = 0; r < set.size(); ++r) {
            const auto& a = set.at(r);
            double mono = 1;
            for (int i = 0; i < phi.d; ++i) mono *= std::pow(node.w[i], a[i]);
            mom[r] += node.weight * v * mono;
        }
    }
    double err = std::abs(mom[0] - 1.0);
    for (int r = 1; r < set.size(); ++r) err = std::max(err, std::abs(mom[r]));
    return err;
}

double LPValue::coeff(const MultiIndex& a) const {
    return coeffs[MultiIndexSet::get(d, m).rank(a)];
}

double LPValue::derivative_estimate(const MultiIndex& a) const {
    return mi_factorial(a) * coeff(a);
}

double LPValue::eval(const VecD& hh) const {
    const auto& set = MultiIndexSet::get(d, m);
    double v = 0;
    for (int i = 0; i < set.size(); ++i) {
        const auto& a = set.at(i);
        double mono = 1;
        for (int k = 0; k < d; ++k) mono *= std::pow(hh[k], a[k]);
        v += coeffs[i] * mono;
    }
    return v;
}

LPValue lp_project(const ScalarField& f, int j, const VecD& x, const VecD& h,
                   const Mollifier& phi, int quad_order) {
    if (j < 0) throw std::invalid_argument("lp_project: j must be nonnegative");
    double r = 0;
    for (double xi : x) r += xi * xi;
    if (std::sqrt(r) > 1.0 - std::pow(2.0, -j) + 1e-12)
        throw std::domain_error("lp_project: |x| must be at most 1 - 2^{-j}");

    LPValue out;
    out.j = j;
    out.d = phi.d;
    out.m = phi.m;
    out.x = x;
    out.h = h;
    int q = std::max(1, quad_order / 24);
    out.coeffs = lp_coeffs(f, j, x, phi, q);
    auto refined = lp_coeffs(f, j, x, phi, q + 1);
    out.resolved = true;
    for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
        if (std::abs(out.coeffs[i] - refined[i]) > 1e-6 * (1.0 + std::abs(refined[i])))
            out.resolved = false;
        out.coeffs[i] = refined[i];
    }
    out.value = out.eval(h);
    return out;
}

nlohmann::json FiniteTypeReport::json() const {
    return {{"l", l},
            {"m", m},
            {"eps", eps},
            {"sup_l", sup_l},
            {"lpest1_K", lpest1_K},
            {"bigfinish_K", bigfinish_K},
            {"lpbdd_K", lpbdd_K},
            {"resolved_j", resolved_j},
            {"excluded_j", excluded_j},
            {"trivial", trivial},
            {"pass", pass()}};
}

FiniteTypeReport verify_finitetype(const ScalarField& f, const EpsilonCertificate& cert,
                                   int l, int m, int grid) {
    const int d = f.arity();
    if (d > 2) throw std::invalid_argument("verify_finitetype: d must be 1 or 2");
    FiniteTypeReport rep;
    rep.l = l;
    rep.m = m;
    rep.eps = cert.eps;

    // reference suprema of derivatives by order, from jets on a dense grid
    std::map<int, double> S;
    for (int k = 0; k <= m; ++k) S[k] = 0.0;
    std::vector<VecD> dense;
    int n = d == 1 ? 512 : 48;
    if (d == 1) {
        for (int i = 0; i < n; ++i) dense.push_back({-0.95 + 1.9 * i / (n - 1)});
    } else {
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                VecD p = {-0.95 + 1.9 * i / (n - 1), -0.95 + 1.9 * k / (n - 1)};
                if (p[0] * p[0] + p[1] * p[1] < 0.9) dense.push_back(p);
            }
    }
    double supf = 0;
    for (const auto& p : dense) {
        if (!f.domain().contains(p)) continue;
        Jet jt = jet_eval(f, p, m);
        supf = std::max(supf, std::abs(jt.value()));
        const auto& set = jt.index_set();
        for (int i = 0; i < set.size(); ++i)
            S[mi_order(set.at(i))] =
                std::max(S[mi_order(set.at(i))], std::abs(jt.coeffs()[i]));
    }
    rep.sup_l = S[l];
    if (supf == 0.0) {
        rep.trivial = true;
        return rep;
    }

    // empirical constant of the derivative bound with the certified eps
    for (int k = l; k <= m; ++k) {
        if (S[l] == 0.0) break;
        double K = S[k] * std::pow(cert.eps, k) / (std::pow(cert.eps, l) * S[l]);
        rep.bigfinish_K = std::max(rep.bigfinish_K, K);
    }

    Mollifier phi = make_mollifier(d, m);
    const auto& set = MultiIndexSet::get(d, m);

    for (int j = 2; j <= 6; ++j) {
        double twoj = std::pow(2.0, -j);
        std::vector<VecD> xs;
        double lim = 1.0 - twoj - 0.05;
        int g = std::max(2, d == 1 ? grid : grid / 2);
        if (d == 1) {
            for (int i = 0; i < g; ++i) xs.push_back({-lim + 2 * lim * i / (g - 1)});
        } else {
            for (int i = 0; i < g; ++i)
                for (int k = 0; k < g; ++k) {
                    VecD p = {-lim + 2 * lim * i / (g - 1), -lim + 2 * lim * k / (g - 1)};
                    if (p[0] * p[0] + p[1] * p[1] < lim * lim) xs.push_back(p);
                }
        }
        bool all_resolved = true;
        double K1 = rep.lpest1_K, Kb = rep.lpbdd_K;
        for (const auto& x : xs) {
            for (double hs : {0.0, 0.4 * twoj}) {
                VecD h(d, 0.0);
                h[0] = hs;
                LPValue lp = lp_project(f, j, x, h, phi);
                if (!lp.resolved) {
                    all_resolved = false;
                    break;
                }
                VecD xh = x;
                xh[0] += hs;
                double err = std::abs(lp.value - f(xh));
                if (S[l] > 0) {
                    double bound = std::pow(2.0, -j * l) *
                                   (1.0 + std::pow(std::pow(2.0, j) * hs, m)) * S[l];
                    K1 = std::max(K1, err / bound);
                }
                // uniform boundedness of the h-derivatives at h = 0,
                // where d^b_h P is exactly b! times the b coefficient
                if (hs == 0.0) {
                    for (int i = 0; i < set.size(); ++i) {
                        const auto& b = set.at(i);
                        int ob = mi_order(b);
                        double db = std::abs(lp.coeffs[i]) * mi_factorial(b);
                        double denom = std::pow(2.0, j * ob) * supf;
                        Kb = std::max(Kb, db / denom);
                    }
                }
            }
            if (!all_resolved) break;
        }
        if (all_resolved) {
            rep.resolved_j.push_back(j);
            rep.lpest1_K = K1;
            rep.lpbdd_K = Kb;
        } else {
            rep.excluded_j.push_back(j);
        }
    }
    return rep;
}

}  // namespace oscgeo
