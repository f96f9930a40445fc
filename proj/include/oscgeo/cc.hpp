#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oscgeo/axioms.hpp"
#include "oscgeo/field.hpp"

namespace oscgeo {

// A finite collection of vector fields with formal degrees; the degree of
// field i is a multi-exponent over the scale parameters, so the weight of
// X_i at scale delta is prod_k delta_k^{degrees[i][k]}.
struct CCSystem {
    std::string name;
    int dim = 0;
    int scale_dim = 1;
    std::vector<std::vector<ScalarField>> fields;  // q fields by dim components
    std::vector<std::vector<double>> degrees;      // q rows of scale_dim exponents
    std::function<bool(const VecD&)> admissible;   // the scale set A
    Domain domain = Domain::box({-4.0}, {4.0});
    int rk4_steps = 64;

    int q() const { return static_cast<int>(fields.size()); }
    void validate() const;
};

double cc_weight(const CCSystem& sys, int i, const VecD& delta);

// Built-in systems: "heisenberg", "flat" (delta1/delta2 anisotropy),
// "grushin" (non-integrable pair), "grushin_full" (bracket field included).
CCSystem cc_system(const std::string& name);

struct CCBallCloud {
    VecD x0;
    VecD delta;
    std::uint64_t seed = 0;
    int n_steps = 0;
    int n_pieces = 0;
    std::vector<VecD> endpoints;
    long discarded = 0;

    std::string csv() const;
};

// Endpoints of RK4-flowed paths gamma' = sum_i delta^{d_i} a_i(s) X_i(gamma)
// with piecewise-constant controls, ||a||_2 < 1 by construction. Paths that
// leave the system domain are discarded and counted.
CCBallCloud cc_ball_sample(const CCSystem& sys, const VecD& x0, const VecD& delta,
                           int n_paths, int n_steps = 64, std::uint64_t seed = 1,
                           int n_pieces = 16);

// Occupied-cell volume of the cloud on a per-axis normalized grid.
double cloud_volume(const CCBallCloud& cloud, int grid = 24);

// Exponential chart u -> exp(sum_{i in basis} u_i delta^{d_i} X_i) x0, over a
// greedily chosen maximal-volume subcollection of the fields.
struct CCChart {
    CCSystem sys;
    VecD x0;
    VecD delta;
    std::vector<int> basis;  // field indices, size n0
    int n0 = 0;

    VecD operator()(const VecD& u) const;
    // Gram volume of the u-Jacobian at u, by the variational equation.
    double jacobian_volume(const VecD& u) const;
    // |det of the selected delta X(x0) minor| (Gram volume of the basis).
    double reference_volume() const;
};

CCChart cc_exp_chart(const CCSystem& sys, const VecD& x0, const VecD& delta);

struct CCAxiomReport {
    std::string system;
    int M = 0, p = 0;
    bool integrability_pass = false;
    bool doubling_pass = false;
    bool jacobian_pass = false;

    double volume = 0, volume_doubled = 0;
    double doubling_ratio = 0, expected_doubling = 0, doubling_slack = 0;
    double jacobian_K = 0, jacobian_K_refined = 0;
    long paths = 0, discarded = 0;
    std::vector<AxiomWitness> witnesses;

    bool all_pass() const { return integrability_pass && doubling_pass && jacobian_pass; }
    nlohmann::json json() const;
};

// p from the formal degrees (smallest p with p * |d_i| >= 1 for every i) and
// the smallest power of two M with M^{-1} <= 2^{-p} rho.
int cc_engulfing_exponent(const CCSystem& sys);
int cc_choose_M(const CCSystem& sys, double rho);

// Bracket integrability at sampled points, Monte-Carlo volume doubling at
// delta vs 2 delta, and Jacobian comparability over the chart ball.
CCAxiomReport cc_axiom_check(const CCSystem& sys, const VecD& x0, const VecD& delta,
                             int n_paths, std::uint64_t seed, int grid = 24,
                             double slack = 0.10);

}  // namespace oscgeo
