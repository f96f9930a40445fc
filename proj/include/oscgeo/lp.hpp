#pragma once

#include <map>

#include <json.hpp>

#include "oscgeo/field.hpp"
#include "oscgeo/tameness.hpp"

namespace oscgeo {

/// Even mollifier phi(t) = p(|t|^2) e^{-1/(1-|t|^2)} supported in the unit
/// ball, with p chosen so that all moments int t^a phi vanish for
/// 1 <= |a| <= m (the odd ones by symmetry, the even ones by the radial
/// linear system). Killing the order-m moments too makes degree-m polynomial
/// reproduction exact rather than exact-up-to-2^{-jm}.
struct Mollifier {
    int d = 1, m = 2;
    VecD poly;  // coefficients of p in s = |t|^2

    double operator()(const VecD& t) const;
    Jet jet(const VecD& t, int order) const;
    nlohmann::json json() const;
};

Mollifier make_mollifier(int d, int m);

// Worst absolute moment int t^a phi (a != 0, |a| <= m), by tensor quadrature.
double mollifier_moment_error(const Mollifier& phi, int quad_order = 48);

/// P_j f(x, h): degree-m polynomial in h with coefficients
/// c_a = 2^{|a| j} / a! * int f(x - 2^{-j} w) (d^a phi)(w) dw.
struct LPValue {
    int j = 0, d = 1, m = 2;
    VecD x, h;
    double value = 0.0;
    std::vector<double> coeffs;  // by MultiIndexSet(d, m) rank
    bool resolved = false;       // two-level quadrature agreement

    double coeff(const MultiIndex& a) const;
    // a! c_a, the estimate of d^a f(x); tends to it as j grows for C^m f.
    double derivative_estimate(const MultiIndex& a) const;
    double eval(const VecD& h) const;
};

LPValue lp_project(const ScalarField& f, int j, const VecD& x, const VecD& h,
                   const Mollifier& phi, int quad_order = 24);

struct FiniteTypeReport {
    int l = 0, m = 0;
    double eps = 1.0;
    double sup_l = 0.0;          // sup_{|b|=l} |d^b f|
    double lpest1_K = 0.0;       // empirical constant of the projection error bound
    double bigfinish_K = 0.0;    // empirical constant of the derivative bound
    double lpbdd_K = 0.0;        // empirical constant of uniform boundedness
    std::vector<int> resolved_j, excluded_j;
    bool trivial = false;        // f vanishes at all probed orders

    bool pass() const {
        return trivial || (std::isfinite(lpest1_K) && std::isfinite(bigfinish_K));
    }
    nlohmann::json json() const;
};

FiniteTypeReport verify_finitetype(const ScalarField& f, const EpsilonCertificate& cert,
                                   int l, int m, int grid = 16);

}  // namespace oscgeo
