#include "oscgeo/ibp.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

namespace oscgeo {

namespace {

// Canonical key of a term shape (everything but the coefficient).
std::vector<int> term_key(const IbpTerm& t) {
    std::vector<int> key;
    key.insert(key.end(), t.beta.begin(), t.beta.end());
    key.insert(key.end(), t.grad_pows.begin(), t.grad_pows.end());
    key.push_back(t.q);
    for (const auto& g : t.gammas) {
        key.push_back(-1);  // separator; multiindex entries are nonnegative
        key.insert(key.end(), g.begin(), g.end());
    }
    return key;
}

void add_term(std::map<std::vector<int>, IbpTerm>& acc, IbpTerm t) {
    std::sort(t.gammas.begin(), t.gammas.end());
    auto key = term_key(t);
    auto it = acc.find(key);
    if (it == acc.end())
        acc.emplace(std::move(key), std::move(t));
    else
        it->second.coeff += t.coeff;
}

// One integration by parts applied to every term: the derivative in the
// divergence lands on d^beta psi, on u_l(grad f), or on one of the d^gamma f.
std::vector<IbpTerm> ibp_step(const std::vector<IbpTerm>& in, int d) {
    std::map<std::vector<int>, IbpTerm> acc;
    for (const IbpTerm& t : in) {
        for (int l = 0; l < d; ++l) {
            {
                IbpTerm a = t;
                ++a.beta[l];
                ++a.grad_pows[l];
                ++a.q;
                add_term(acc, std::move(a));
            }
            // u_l = y^{p'} |y|^{-2q'} with p' = p + e_l, q' = q + 1;
            // d_k u_l = p'_k y^{p'-e_k}|y|^{-2q'} - 2q' y^{p'+e_k}|y|^{-2(q'+1)},
            // each paired with the new second-derivative factor d^2_{lk} f.
            MultiIndex pp = t.grad_pows;
            ++pp[l];
            int qp = t.q + 1;
            for (int k2 = 0; k2 < d; ++k2) {
                MultiIndex gamma(d, 0);
                ++gamma[l];
                ++gamma[k2];
                if (pp[k2] > 0) {
                    IbpTerm b1 = t;
                    b1.grad_pows = pp;
                    --b1.grad_pows[k2];
                    b1.q = qp;
                    b1.coeff *= pp[k2];
                    b1.gammas.push_back(gamma);
                    add_term(acc, std::move(b1));
                }
                IbpTerm b2 = t;
                b2.grad_pows = pp;
                ++b2.grad_pows[k2];
                b2.q = qp + 1;
                b2.coeff *= -2 * qp;
                b2.gammas.push_back(gamma);
                add_term(acc, std::move(b2));
            }
            for (std::size_t j = 0; j < t.gammas.size(); ++j) {
                IbpTerm c = t;
                c.grad_pows = pp;
                c.q = qp;
                ++c.gammas[j][l];
                add_term(acc, std::move(c));
            }
        }
    }
    std::vector<IbpTerm> out;
    out.reserve(acc.size());
    for (auto& [key, t] : acc)
        if (t.coeff != 0) out.push_back(std::move(t));
    return out;
}

// Real part of the term sum (before the global i^k), as a jet.
Jet expansion_sum_jet(const std::vector<IbpTerm>& terms, const Jet& fjet, int d, int order) {
    std::vector<Jet> grad;
    for (int i = 0; i < d; ++i) {
        MultiIndex e(d, 0);
        e[i] = 1;
        grad.push_back(derivative_jet(fjet, e, order));
    }
    Jet g2(d, order, 0.0);
    for (int i = 0; i < d; ++i) g2 += grad[i] * grad[i];

    Jet sum(d, order, 0.0);
    for (const IbpTerm& t : terms) {
        Jet v(d, order, static_cast<double>(t.coeff));
        for (int i = 0; i < d; ++i)
            if (t.grad_pows[i] > 0) v = v * jet_powi(grad[i], t.grad_pows[i]);
        if (t.q > 0) v = v * jet_powi(g2, -t.q);
        for (const auto& g : t.gammas) v = v * derivative_jet(fjet, g, order);
        sum += v;
    }
    return sum;
}

std::complex<double> i_pow(int k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return {1, 0};
        case 1: return {0, 1};
        case 2: return {-1, 0};
        default: return {0, -1};
    }
}

JetC rotate(const Jet& re, int k) {
    Jet zero(re.dim(), re.order(), 0.0);
    switch (((k % 4) + 4) % 4) {
        case 0: return JetC(re, zero);
        case 1: return JetC(zero, re);
        case 2: return JetC(-re, zero);
        default: return JetC(zero, -re);
    }
}

nlohmann::json mi_json(const MultiIndex& a) { return nlohmann::json(a); }

std::vector<VecD> domain_grid(const Domain& dom, int n) {
    const int d = dom.dim();
    VecD lo(d), hi(d);
    if (dom.kind == Domain::Kind::Ball) {
        for (int i = 0; i < d; ++i) {
            lo[i] = dom.center[i] - dom.radius;
            hi[i] = dom.center[i] + dom.radius;
        }
    } else {
        lo = dom.lo;
        hi = dom.hi;
    }
    std::vector<VecD> pts;
    long total = 1;
    for (int i = 0; i < d; ++i) total *= n;
    for (long flat = 0; flat < total; ++flat) {
        long r = flat;
        VecD x(d);
        for (int i = 0; i < d; ++i) {
            int q = static_cast<int>(r % n);
            r /= n;
            x[i] = lo[i] + (hi[i] - lo[i]) * (q + 0.5) / n;
        }
        if (dom.contains(x)) pts.push_back(std::move(x));
    }
    return pts;
}

}  // namespace

int IbpTerm::gamma_total() const {
    int s = 0;
    for (const auto& g : gammas) s += mi_order(g);
    return s;
}

nlohmann::json IbpTerm::json() const {
    nlohmann::json gs = nlohmann::json::array();
    for (const auto& g : gammas) gs.push_back(mi_json(g));
    return {{"coeff", coeff},       {"grad_pows", mi_json(grad_pows)}, {"q", q},
            {"gammas", gs},         {"beta", mi_json(beta)},           {"deg_u", deg_u()}};
}

bool IbpExpansion::bookkeeping_ok() const {
    for (const auto& [beta, terms] : by_beta) {
        for (const IbpTerm& t : terms) {
            int n = static_cast<int>(t.gammas.size());
            int s = t.gamma_total();
            int b = mi_order(t.beta);
            if (t.beta != beta) return false;
            if (b + t.deg_u() + s != 0) return false;
            if (t.deg_u() + n != -k) return false;
            if (b + s < k || b + s > 2 * k) return false;
            for (const auto& g : t.gammas)
                if (mi_order(g) < 2 || mi_order(g) > k + 1) return false;
        }
    }
    return true;
}

long long IbpExpansion::term_count() const {
    long long n = 0;
    for (const auto& [beta, terms] : by_beta) n += static_cast<long long>(terms.size());
    return n;
}

std::complex<double> IbpExpansion::F(const MultiIndex& beta, const Jet& fjet) const {
    auto it = by_beta.find(beta);
    if (it == by_beta.end()) return {0.0, 0.0};
    VecD grad(d);
    double g2 = 0;
    for (int i = 0; i < d; ++i) {
        MultiIndex e(d, 0);
        e[i] = 1;
        grad[i] = fjet.coeff(e);
        g2 += grad[i] * grad[i];
    }
    double sum = 0;
    for (const IbpTerm& t : it->second) {
        double v = static_cast<double>(t.coeff);
        for (int i = 0; i < d; ++i)
            for (int r = 0; r < t.grad_pows[i]; ++r) v *= grad[i];
        v *= std::pow(g2, -t.q);
        for (const auto& g : t.gammas) v *= fjet.coeff(g);
        sum += v;
    }
    return i_pow(k) * sum;
}

JetC IbpExpansion::F_jet(const MultiIndex& beta, const Jet& fjet, int order) const {
    auto it = by_beta.find(beta);
    if (it == by_beta.end()) return JetC(Jet(d, order, 0.0), Jet(d, order, 0.0));
    return rotate(expansion_sum_jet(it->second, fjet, d, order), k);
}

nlohmann::json IbpExpansion::json() const {
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& [beta, terms] : by_beta) {
        nlohmann::json ts = nlohmann::json::array();
        for (const IbpTerm& t : terms) ts.push_back(t.json());
        groups.push_back({{"beta", mi_json(beta)}, {"terms", ts}});
    }
    return {{"k", k}, {"d", d}, {"term_count", term_count()}, {"groups", groups}};
}

const IbpExpansion& ibp_expand(int k, int d) {
    if (k < 0 || k > 5) throw std::invalid_argument("ibp_expand: k must be in 0..5");
    if (d < 1 || d > 3) throw std::invalid_argument("ibp_expand: d must be in {1,2,3}");

    static std::map<std::pair<int, int>, IbpExpansion> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({k, d});
    if (it != cache.end()) return it->second;

    IbpTerm base;
    base.beta = MultiIndex(d, 0);
    base.grad_pows = MultiIndex(d, 0);
    std::vector<IbpTerm> terms = {base};
    for (int step = 0; step < k; ++step) terms = ibp_step(terms, d);

    IbpExpansion exp;
    exp.k = k;
    exp.d = d;
    for (IbpTerm& t : terms) exp.by_beta[t.beta].push_back(std::move(t));
    if (!exp.bookkeeping_ok())
        throw std::logic_error("ibp_expand: internal bookkeeping identity failed");
    return cache.emplace(std::make_pair(k, d), std::move(exp)).first->second;
}

GradientVanishes::GradientVanishes(VecD where, double g, double s)
    : std::domain_error("gradient of the phase vanishes on the amplitude support"),
      x(std::move(where)),
      grad_norm(g),
      sup_grad(s) {}

OmegaViolation::OmegaViolation(VecD where, double w, double req)
    : std::domain_error("omega exceeds the admissible derivative-ratio bound"),
      x(std::move(where)),
      omega(w),
      required_inverse(req) {}

ReducedAmplitude::ReducedAmplitude(ScalarField f, AmpJetFn amp, Domain support, int k,
                                   double junk_K)
    : f_(std::move(f)),
      amp_(std::move(amp)),
      support_(std::move(support)),
      k_(k),
      d_(f_.arity()),
      junk_K_(junk_K) {}

const IbpExpansion& ReducedAmplitude::expansion() const { return ibp_expand(k_, d_); }

JetC ReducedAmplitude::jet(const VecD& x, int order) const {
    Jet zero(d_, order, 0.0);
    if (!support_.contains(x)) return JetC(zero, zero);
    Jet fj = f_.jet(x, k_ + 1 + order);
    JetC aj = amp_(x, k_ + order);
    const IbpExpansion& exp = expansion();
    JetC out(zero, zero);
    for (const auto& [beta, terms] : exp.by_beta) {
        JetC fb = exp.F_jet(beta, fj, order);
        JetC dpsi(derivative_jet(aj.re, beta, order), derivative_jet(aj.im, beta, order));
        out += dpsi * fb;
    }
    return out;
}

std::complex<double> ReducedAmplitude::operator()(const VecD& x) const {
    JetC j = jet(x, 0);
    return {j.re.value(), j.im.value()};
}

namespace {

// Shared validation + construction path. `amp` already returns complex jets.
ReducedAmplitude reduce_impl(const ScalarField& f, ReducedAmplitude::AmpJetFn amp,
                             const Domain& support, int k,
                             const std::function<double(const VecD&)>& omega,
                             int grid_per_axis) {
    if (k < 1 || k > 5) throw std::invalid_argument("reduce_amplitude: k must be in 1..5");
    const int d = f.arity();
    const IbpExpansion& exp = ibp_expand(k, d);

    if (grid_per_axis <= 0) grid_per_axis = d == 1 ? 65 : (d == 2 ? 21 : 9);
    std::vector<VecD> grid = domain_grid(support, grid_per_axis);
    if (grid.empty()) throw std::invalid_argument("reduce_amplitude: empty support grid");

    std::vector<Jet> fjets;
    std::vector<double> gradnorm;
    double sup_grad = 0;
    fjets.reserve(grid.size());
    for (const VecD& x : grid) {
        Jet fj = f.jet(x, k + 1);
        double g2 = 0;
        for (int i = 0; i < d; ++i) {
            MultiIndex e(d, 0);
            e[i] = 1;
            g2 += fj.coeff(e) * fj.coeff(e);
        }
        gradnorm.push_back(std::sqrt(g2));
        sup_grad = std::max(sup_grad, gradnorm.back());
        fjets.push_back(std::move(fj));
    }

    for (std::size_t p = 0; p < grid.size(); ++p)
        if (gradnorm[p] <= 1e-12 * sup_grad)
            throw GradientVanishes(grid[p], gradnorm[p], sup_grad);

    const MultiIndexSet& set = MultiIndexSet::get(d, k + 1);
    double junk_K = 0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        double w = omega(grid[p]);
        if (!(w > 0)) throw OmegaViolation(grid[p], w, 0.0);
        // admissibility: 1/w >= sup_{2 <= |g| <= k+1} (|d^g f| / |grad f|)^{1/(|g|-1)}
        double bound = 0;
        for (int i = 0; i < set.size(); ++i) {
            int o = mi_order(set.at(i));
            if (o < 2) continue;
            double r = std::abs(fjets[p].coeff(set.at(i))) / gradnorm[p];
            bound = std::max(bound, std::pow(r, 1.0 / (o - 1)));
        }
        if (w * bound > 1 + 1e-9) throw OmegaViolation(grid[p], w, bound);
        for (const auto& [beta, terms] : exp.by_beta) {
            double fb = std::abs(exp.F(beta, fjets[p]));
            double scale = std::pow(w, mi_order(beta)) / std::pow(w * gradnorm[p], k);
            if (scale > 0) junk_K = std::max(junk_K, fb / scale);
        }
    }
    return ReducedAmplitude(f, std::move(amp), support, k, junk_K);
}

}  // namespace

ReducedAmplitude reduce_amplitude(const ScalarField& f, const ScalarField& psi, int k,
                                  const std::function<double(const VecD&)>& omega,
                                  int grid_per_axis) {
    Domain support = psi.compact_support() ? psi.domain() : f.domain();
    ReducedAmplitude::AmpJetFn amp = [psi](const VecD& x, int order) {
        Jet re = psi.jet(x, order);
        return JetC(re, Jet(re.dim(), re.order(), 0.0));
    };
    return reduce_impl(f, std::move(amp), support, k, omega, grid_per_axis);
}

ReducedAmplitude reduce_amplitude(const ScalarField& f, const ScalarField& psi, int k,
                                  double omega, int grid_per_axis) {
    return reduce_amplitude(
        f, psi, k, [omega](const VecD&) { return omega; }, grid_per_axis);
}

ReducedAmplitude reduce_amplitude(const ScalarField& f, const ReducedAmplitude& psi, int k,
                                  double omega, int grid_per_axis) {
    ReducedAmplitude::AmpJetFn amp = [psi](const VecD& x, int order) {
        return psi.jet(x, order);
    };
    return reduce_impl(
        f, std::move(amp), psi.support(), k, [omega](const VecD&) { return omega; },
        grid_per_axis);
}

}  // namespace oscgeo
