#pragma once

#include <map>
#include <stdexcept>

#include <json.hpp>

#include "oscgeo/field.hpp"

namespace oscgeo {

struct ConvexityError : std::runtime_error {
    ConvexityError(VecD w, VecD dir, double second)
        : std::runtime_error("function is not convex on the probe grid"),
          where(std::move(w)), direction(std::move(dir)), second_derivative(second) {}
    VecD where, direction;
    double second_derivative;
};

struct TamenessReport {
    int m = 0;
    double T = 0.0;
    double C = 0.0;                 // sup of |f|^{k-1}|f^(k)| / |f'|^k, inf on violation
    std::map<int, double> per_k;    // k -> sup ratio
    int grid_points = 0;
    int rays = 0;                   // 0 for the 1-D report
    std::vector<double> violation_points;  // f' = 0 with f != 0

    bool finite() const { return std::isfinite(C) && violation_points.empty(); }
    nlohmann::json json() const;
};

// C = sup over k in {2..m} and the grid of |f(t)|^{k-1} |f^(k)(t)| / |f'(t)|^k
// on (0, T]. The grid mixes uniform points with a geometric tail at 0.
// Flat points (f = f' = 0) contribute 0; f' = 0 with f != 0 is a violation.
TamenessReport tameness_constant(const ScalarField& f, double T, int m, int grid = 2048);

// Sup of the 1-D constant over rays t -> f(x0 + t w) (recentred at x0), with
// per-ray T capped where the ray leaves the domain.
TamenessReport radial_tameness(const ScalarField& f, const VecD& x0, int m, int rays = 64,
                               int grid = 512);

struct EpsilonCertificate {
    double eps = 1.0;
    int m = 0, l = 0;
    double lhs = 0.0;   // eps^m * sup_{|a|=m} |d^a f|
    double rhs = 0.0;   // max_{l <= k < m} eps^k * sup_{|a|=k} |d^a f|
    std::map<int, double> sup_by_order;
    bool degenerate = false;

    bool sound() const { return degenerate || lhs <= rhs * (1 + 1e-12); }
    nlohmann::json json() const;
};

// Largest eps in (0, 1] on a log lattice (resolution 1e-3) such that
// eps^m S_m <= max_{l <= k < m} eps^k S_k, where S_k are grid suprema of the
// order-k derivatives over the unit ball intersected with the domain.
EpsilonCertificate epsilon_for(const ScalarField& f, int m, int l, int grid_per_axis = 0);

}  // namespace oscgeo
