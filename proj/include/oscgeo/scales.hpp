#pragma once

#include <functional>
#include <string>

#include <json.hpp>

#include "oscgeo/atlas.hpp"

namespace oscgeo {

/// A scale function R on the validity region E (where the defining ratio
/// makes sense), together with its Lipschitz constant for the intersecting-
/// balls condition.
struct ScaleAssignment {
    std::function<int(const VecD&)> scale;   // throws std::domain_error outside E
    std::function<bool(const VecD&)> valid;  // membership in E
    int N = 2;
};

// Largest integer j with radix^j <= (1/(4C)) f(x) / (x . grad f(x)).
int bnw_scale(const ScalarField& f, const VecD& x, double C_tame, double radix = 3.0);

ScaleAssignment bnw_scale_assignment(const ScalarField& f, double C_tame,
                                     double radix = 3.0);

struct CanonicalScaleParams {
    double eps = 1.0;
    double K_highderiv = 10.0;  // implicit constant of the derivative inequality
    double K_firstderiv = 10.0; // implicit constant of the gradient comparability
    int m = 4;
    int ball_samples = 64;      // membership grid per ball
    int sub_samples = 9;        // candidate sub-ball centers per enclosing ball
    int depth = 2;              // scales below j checked for sub-balls
    int jmin = -8;              // search floor
};

// Largest j (up to the atlas cap) such that every checked sub-ball of the
// enclosing ball satisfies both defining inequalities of the collection I.
int canonical_scale(const ChartAtlas& atlas, const ScalarField& f,
                    const CanonicalScaleParams& params, const VecD& x);

struct HypothesisWitness {
    std::string which;  // "lipschitz", "highderiv", "firstderiv"
    VecD x, y;
    double value = 0.0;
    nlohmann::json json() const;
};

struct HypothesisReport {
    int m = 0;
    double eps = 1.0;
    double K_highderiv = 10.0, K_firstderiv = 10.0;  // pass thresholds
    bool lipschitz_pass = true, highderiv_pass = true, firstderiv_pass = true;
    int max_scale_jump = 0;
    double highderiv_ratio = 0.0;   // measured sup of lhs / rhs-sum
    double firstderiv_ratio = 0.0;  // measured sup of sup/(1 + inf)
    std::vector<HypothesisWitness> witnesses;

    bool all_pass() const { return lipschitz_pass && highderiv_pass && firstderiv_pass; }
    nlohmann::json json() const;
};

HypothesisReport validate_hypotheses(const ChartAtlas& atlas, const ScalarField& f,
                                     const ScaleAssignment& R, double eps, int m,
                                     const std::vector<VecD>& probes,
                                     double K_highderiv = 10.0, double K_firstderiv = 10.0,
                                     int ball_samples = 33);

}  // namespace oscgeo
