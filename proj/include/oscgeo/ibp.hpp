#pragma once

#include <complex>
#include <functional>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "oscgeo/field.hpp"

namespace oscgeo {

/// One summand of F_beta: coeff * y^p |y|^{-2q} (at y = grad f) times a
/// product of higher derivatives d^{gamma_j} f, with gamma_j >= 2 each.
/// A global factor i^k (one i per integration by parts) is carried by the
/// expansion, not the term.
struct IbpTerm {
    long long coeff = 1;
    MultiIndex grad_pows;             // p: exponents of the components of grad f
    int q = 0;                        // power of |grad f|^{-2}
    std::vector<MultiIndex> gammas;   // sorted; each of order >= 2
    MultiIndex beta;

    int deg_u() const { return mi_order(grad_pows) - 2 * q; }
    int gamma_total() const;
    nlohmann::json json() const;
};

/// The full expansion at order k: psi_k = sum_{|beta| <= k} d^beta psi * F_beta,
/// F_beta = i^k * sum of its terms.
struct IbpExpansion {
    int k = 0, d = 1;
    std::map<MultiIndex, std::vector<IbpTerm>> by_beta;

    // |beta| + deg u + sum|gamma_j| = 0, deg u + n = -k,
    // k <= |beta| + sum|gamma_j| <= 2k, |gamma_j| <= k+1, exactly, on every term.
    bool bookkeeping_ok() const;
    long long term_count() const;

    // F_beta from a jet of f at the point; fjet.order() >= k + 1.
    std::complex<double> F(const MultiIndex& beta, const Jet& fjet) const;
    // Jet of F_beta; fjet.order() >= k + 1 + order.
    JetC F_jet(const MultiIndex& beta, const Jet& fjet, int order) const;

    nlohmann::json json() const;
};

// Cached per (k, d); 0 <= k <= 5, d in {1,2,3}. k = 0 is the identity expansion.
const IbpExpansion& ibp_expand(int k, int d);

struct GradientVanishes : std::domain_error {
    VecD x;
    double grad_norm = 0.0, sup_grad = 0.0;
    GradientVanishes(VecD where, double g, double s);
};

struct OmegaViolation : std::domain_error {
    VecD x;
    double omega = 0.0, required_inverse = 0.0;
    OmegaViolation(VecD where, double w, double req);
};

/// psi_k(x) = sum_{|beta| <= k} d^beta psi(x) F_beta(x), complex valued,
/// evaluable as a jet so reductions compose.
class ReducedAmplitude {
public:
    using AmpJetFn = std::function<JetC(const VecD&, int)>;

    ReducedAmplitude(ScalarField f, AmpJetFn amp, Domain support, int k, double junk_K);

    std::complex<double> operator()(const VecD& x) const;
    JetC jet(const VecD& x, int order) const;

    int order() const { return k_; }
    int dim() const { return d_; }
    const Domain& support() const { return support_; }
    const IbpExpansion& expansion() const;
    // max over the validation grid and beta of |F_beta| (omega |grad f|)^k / omega^{|beta|}
    double sharpjunk_constant() const { return junk_K_; }

private:
    ScalarField f_;
    AmpJetFn amp_;
    Domain support_;
    int k_, d_;
    double junk_K_;
};

ReducedAmplitude reduce_amplitude(const ScalarField& f, const ScalarField& psi, int k,
                                  const std::function<double(const VecD&)>& omega,
                                  int grid_per_axis = 0);
ReducedAmplitude reduce_amplitude(const ScalarField& f, const ScalarField& psi, int k,
                                  double omega, int grid_per_axis = 0);
// Compose reductions: psi is itself a reduced amplitude.
ReducedAmplitude reduce_amplitude(const ScalarField& f, const ReducedAmplitude& psi, int k,
                                  double omega, int grid_per_axis = 0);

}  // namespace oscgeo
