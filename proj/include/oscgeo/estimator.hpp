#pragma once

#include <complex>
#include <string>

#include <json.hpp>

#include "oscgeo/ibp.hpp"
#include "oscgeo/partition.hpp"
#include "oscgeo/quadrature.hpp"
#include "oscgeo/scales.hpp"

namespace oscgeo {

struct OracleResult {
    std::complex<double> value{0.0, 0.0};
    bool converged = false;
    long nodes_used = 0;
};

// Brute-force oint e^{i lambda f} psi over the region (d <= 2), resolved to
// tol * (1 + |value|) by panel doubling with >= 20 nodes per wavelength.
OracleResult oracle_integral(const ScalarField& f, const ScalarField& psi, double lambda,
                             const Domain& region, double tol = 1e-9);

struct DecayRow {
    double lambda = 0, lhs_abs = 0, rhs_bound = 0, ratio = 0;
    bool resolved = true;
};

struct DecayTable {
    std::string phase_id, amp_id;
    int l = 0, m = 2;
    std::vector<DecayRow> rows;
    double lhs_slope = 0, rhs_slope = 0;
    double lhs_residual = 0, rhs_residual = 0;
    double ratio_min = 0, ratio_max = 0;  // over resolved rows

    std::string csv() const;  // lambda, lhs_abs, rhs_bound, ratio, resolved_flag
    nlohmann::json json() const;
};

// |oint e^{i lambda f} f^l psi| against the derivative-weighted bound
// oint |f|^l sum_{k<m} |(x.grad)^k psi| (1+|lambda f|)^{-(m-1)}, with log-log
// slopes fitted over the resolved rows.
DecayTable decay_scan(const ScalarField& f, const ScalarField& psi,
                      const std::vector<double>& lambdas, int l, int m);

struct SublevelReport {
    double lambda = 0;
    int l = 0, d = 1;
    double lhs = 0;       // oint |f|^l (1 + lambda |f|)^{-(l+d+1)}
    double measure = 0;   // |{ |f| < 1/lambda }|
    double ratio = 0;     // lhs / (lambda^{-l} measure)
    std::vector<double> shell_measure;  // |{ |f| < 2^k/lambda }|, k = 0..
    bool shells_geometric = true;       // measure_k <= 2^k measure_0

    nlohmann::json json() const;
};

// Requires f convex with f(0) = 0, grad f(0) = 0 (one-dimensional).
SublevelReport sublevel_compare(const ScalarField& f, double lambda, int l, int d = 1);

struct HypothesisFailure : std::runtime_error {
    explicit HypothesisFailure(HypothesisReport rep);
    HypothesisReport report;
};

struct Theorem1Report {
    int m = 2;
    double eps = 1.0;
    std::complex<double> ambient, assembled_raw, assembled_reduced;
    // |ambient - assembled_reduced| over max(|ambient|, L1 amplitude mass)
    double identity_rel_error = 0;
    double pointwise_K = 0;         // empirical constant of the cell-amplitude bound
    int cells = 0, active_cells = 0, low_cells = 0, reduced_cells = 0;
    bool resolved = false;

    bool identity_pass() const { return resolved && identity_rel_error <= 1e-6; }
    nlohmann::json json() const;
};

// End-to-end verification on a one-parameter atlas: hypothesis validation,
// partition, per-cell chart pullback, amplitude reduction on high-frequency
// cells, and oracle comparison of the reassembled integral; the pointwise
// amplitude bound is measured at the probe points.
Theorem1Report theorem1_verify(std::shared_ptr<const ChartAtlas> atlas, const ScalarField& f,
                               const ScalarField& psi, const ScaleAssignment& R, double eps,
                               int m, const std::vector<VecD>& region,
                               const std::vector<VecD>& probes, double C_low = 10.0,
                               double tol = 1e-7);

}  // namespace oscgeo
