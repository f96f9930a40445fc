#include "oscgeo/jet.hpp"

#include <cmath>
#include <stdexcept>

namespace oscgeo {

Jet::Jet(int dim, int order, double value) : dim_(dim), order_(order) {
    c_.assign(MultiIndexSet::get(dim, order).size(), 0.0);
    c_[0] = value;
}

Jet Jet::variable(int dim, int order, int i, double x) {
    Jet j(dim, order, x);
    if (order >= 1) {
        MultiIndex e(dim, 0);
        e[i] = 1;
        j.set_coeff(e, 1.0);
    }
    return j;
}

const MultiIndexSet& Jet::index_set() const { return MultiIndexSet::get(dim_, order_); }

double Jet::coeff(const MultiIndex& a) const {
    int r = index_set().rank(a);
    if (r < 0) throw std::out_of_range("Jet::coeff: index outside jet order");
    return c_[r];
}

void Jet::set_coeff(const MultiIndex& a, double v) {
    int r = index_set().rank(a);
    if (r < 0) throw std::out_of_range("Jet::set_coeff: index outside jet order");
    c_[r] = v;
}

Jet Jet::truncated(int order) const {
    Jet r(dim_, order);
    const auto& src = index_set();
    const auto& dst = r.index_set();
    for (int i = 0; i < dst.size(); ++i) r.c_[i] = c_[src.rank(dst.at(i))];
    return r;
}

Jet Jet::operator-() const {
    Jet r = *this;
    for (double& v : r.c_) v = -v;
    return r;
}

Jet& Jet::operator+=(const Jet& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Jet& Jet::operator*=(double v) {
    for (double& x : c_) x *= v;
    return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
    const auto& set = a.index_set();
    Jet r(a.dim(), a.order());
    // Leibniz: ∂^α(fg) = Σ_{β<=α} C(α,β) ∂^β f ∂^{α-β} g
    for (int ia = 0; ia < set.size(); ++ia) {
        const MultiIndex& alpha = set.at(ia);
        double acc = 0.0;
        for (int ib = 0; ib < set.size(); ++ib) {
            const MultiIndex& beta = set.at(ib);
            if (mi_order(beta) > mi_order(alpha)) break;
            if (!mi_leq(beta, alpha)) continue;
            int ic = set.rank(mi_sub(alpha, beta));
            acc += mi_binom(alpha, beta) * a.coeffs()[ib] * b.coeffs()[ic];
        }
        r.coeffs()[ia] = acc;
    }
    return r;
}

Jet Jet::compose_univariate(std::span<const double> derivs) const {
    Jet w = *this;
    w.c_[0] = 0.0;  // u - u0
    Jet r(dim_, order_, derivs[0]);
    Jet wk(dim_, order_, 1.0);
    for (int k = 1; k <= order_; ++k) {
        wk = wk * w;
        double ck = derivs[k] / factorial(k);
        if (ck == 0.0) continue;
        Jet t = wk;
        t *= ck;
        r += t;
    }
    return r;
}

Jet jet_exp(const Jet& u) {
    std::vector<double> d(u.order() + 1, std::exp(u.value()));
    return u.compose_univariate(d);
}

Jet jet_sin(const Jet& u) {
    double s = std::sin(u.value()), c = std::cos(u.value());
    std::vector<double> d(u.order() + 1);
    const double cyc[4] = {s, c, -s, -c};
    for (int k = 0; k <= u.order(); ++k) d[k] = cyc[k % 4];
    return u.compose_univariate(d);
}

Jet jet_cos(const Jet& u) {
    double s = std::sin(u.value()), c = std::cos(u.value());
    std::vector<double> d(u.order() + 1);
    const double cyc[4] = {c, -s, -c, s};
    for (int k = 0; k <= u.order(); ++k) d[k] = cyc[k % 4];
    return u.compose_univariate(d);
}

Jet jet_log(const Jet& u) {
    double u0 = u.value();
    if (!(u0 > 0.0)) throw std::domain_error("jet_log: argument must be positive");
    std::vector<double> d(u.order() + 1);
    d[0] = std::log(u0);
    double p = 1.0 / u0;
    for (int k = 1; k <= u.order(); ++k) {
        d[k] = (k % 2 == 1 ? 1.0 : -1.0) * factorial(k - 1) * p;
        p /= u0;
    }
    return u.compose_univariate(d);
}

Jet jet_inv(const Jet& u) {
    double u0 = u.value();
    if (u0 == 0.0) throw std::domain_error("jet_inv: division by zero");
    std::vector<double> d(u.order() + 1);
    double p = 1.0 / u0;
    for (int k = 0; k <= u.order(); ++k) {
        d[k] = (k % 2 == 0 ? 1.0 : -1.0) * factorial(k) * p;
        p /= u0;
    }
    return u.compose_univariate(d);
}

Jet jet_sqrt(const Jet& u) { return jet_pow(u, 0.5); }

Jet jet_abs(const Jet& u) {
    double u0 = u.value();
    if (u0 == 0.0) throw std::domain_error("jet_abs: not differentiable at 0");
    return u0 > 0.0 ? u : -u;
}

Jet jet_powi(Jet u, int n) {
    if (n < 0) return jet_powi(jet_inv(u), -n);
    Jet r(u.dim(), u.order(), 1.0);
    while (n > 0) {
        if (n & 1) r = r * u;
        u = u * u;
        n >>= 1;
    }
    return r;
}

Jet jet_pow(const Jet& u, double p) {
    if (p == std::floor(p) && std::abs(p) <= 64.0) return jet_powi(u, static_cast<int>(p));
    double u0 = u.value();
    if (!(u0 > 0.0)) throw std::domain_error("jet_pow: non-integer power of non-positive base");
    std::vector<double> d(u.order() + 1);
    double fall = 1.0;
    for (int k = 0; k <= u.order(); ++k) {
        d[k] = fall * std::pow(u0, p - k);
        fall *= (p - k);
    }
    return u.compose_univariate(d);
}

Jet operator/(const Jet& a, const Jet& b) { return a * jet_inv(b); }
Jet operator/(double v, const Jet& b) { Jet r = jet_inv(b); r *= v; return r; }

Jet derivative_jet(const Jet& f, const MultiIndex& gamma, int order) {
    if (mi_order(gamma) + order > f.order())
        throw std::invalid_argument("derivative_jet: source jet order too small");
    Jet r(f.dim(), order);
    const auto& dst = r.index_set();
    const auto& src = f.index_set();
    for (int i = 0; i < dst.size(); ++i)
        r.coeffs()[i] = f.coeffs()[src.rank(mi_add(dst.at(i), gamma))];
    return r;
}

double dk_norm(const Jet& jet, int k) {
    if (k < 1 || k > jet.order()) throw std::out_of_range("dk_norm: k out of range");
    const auto& set = jet.index_set();
    double sup = 0.0;
    for (int i = 0; i < set.size(); ++i) {
        int o = mi_order(set.at(i));
        if (o >= 1 && o <= k) sup = std::max(sup, std::abs(jet.coeffs()[i]));
    }
    return sup;
}

}  // namespace oscgeo
