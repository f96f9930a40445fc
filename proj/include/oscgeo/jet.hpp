#pragma once

#include <span>
#include <vector>

#include "oscgeo/multiindex.hpp"

namespace oscgeo {

/// Truncated Taylor data of a scalar function at a point: raw mixed partials
/// ∂^α (not divided by α!) for all |α| <= order. Arithmetic propagates exact
/// derivatives, so polynomial inputs of degree <= order come out exact.
class Jet {
public:
    Jet() : dim_(0), order_(0) {}
    Jet(int dim, int order, double value = 0.0);

    static Jet constant(int dim, int order, double v) { return Jet(dim, order, v); }
    // The coordinate function x_i, expanded at the point with value x.
    static Jet variable(int dim, int order, int i, double x);

    int dim() const { return dim_; }
    int order() const { return order_; }
    double value() const { return c_[0]; }

    double coeff(const MultiIndex& a) const;
    void set_coeff(const MultiIndex& a, double v);
    const std::vector<double>& coeffs() const { return c_; }
    std::vector<double>& coeffs() { return c_; }
    const MultiIndexSet& index_set() const;

    Jet truncated(int order) const;  // drop coefficients above `order`

    Jet operator-() const;
    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator+=(double v) { c_[0] += v; return *this; }
    Jet& operator*=(double v);

    friend Jet operator+(Jet a, const Jet& b) { a += b; return a; }
    friend Jet operator-(Jet a, const Jet& b) { a -= b; return a; }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator+(Jet a, double v) { a += v; return a; }
    friend Jet operator+(double v, Jet a) { a += v; return a; }
    friend Jet operator-(Jet a, double v) { a += -v; return a; }
    friend Jet operator-(double v, const Jet& a) { Jet r = -a; r += v; return r; }
    friend Jet operator*(Jet a, double v) { a *= v; return a; }
    friend Jet operator*(double v, Jet a) { a *= v; return a; }
    friend Jet operator/(const Jet& a, const Jet& b);
    friend Jet operator/(Jet a, double v) { a *= 1.0 / v; return a; }
    friend Jet operator/(double v, const Jet& b);

    // h(u) where derivs[k] = h^(k)(u.value()), k = 0..order.
    Jet compose_univariate(std::span<const double> derivs) const;

private:
    int dim_, order_;
    std::vector<double> c_;
};

Jet jet_exp(const Jet& u);
Jet jet_sin(const Jet& u);
Jet jet_cos(const Jet& u);
Jet jet_log(const Jet& u);   // requires u.value() > 0
Jet jet_sqrt(const Jet& u);  // requires u.value() > 0
Jet jet_inv(const Jet& u);   // requires u.value() != 0
Jet jet_abs(const Jet& u);   // requires u.value() != 0
Jet jet_powi(Jet u, int n);  // exact integer power (n may be negative)
Jet jet_pow(const Jet& u, double p);

// The jet of the function ∂^γ f, extracted by index shift.
// Requires f.order() >= |γ| + order.
Jet derivative_jet(const Jet& f, const MultiIndex& gamma, int order);

// |d^k f| at the expansion point: sup over 1 <= |α| <= k of |coeff(α)|.
double dk_norm(const Jet& jet, int k);

// Complex-valued jet as a pair of real jets.
struct JetC {
    Jet re, im;

    JetC() = default;
    JetC(Jet r) : re(std::move(r)), im(Jet(re.dim(), re.order(), 0.0)) {}
    JetC(Jet r, Jet i) : re(std::move(r)), im(std::move(i)) {}

    JetC& operator+=(const JetC& o) { re += o.re; im += o.im; return *this; }
    friend JetC operator+(JetC a, const JetC& b) { a += b; return a; }
    friend JetC operator*(const JetC& a, const JetC& b) {
        return JetC(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
    }
    friend JetC operator*(const JetC& a, const Jet& b) { return JetC(a.re * b, a.im * b); }
    friend JetC operator*(const Jet& a, const JetC& b) { return b * a; }
    JetC times_i() const { return JetC(-im, re); }
};

}  // namespace oscgeo
