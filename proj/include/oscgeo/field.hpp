#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oscgeo/expr.hpp"
#include "oscgeo/jet.hpp"

namespace oscgeo {

using VecD = std::vector<double>;

struct Domain {
    enum class Kind { Box, Ball };
    Kind kind = Kind::Box;
    VecD lo, hi;        // Box
    VecD center;        // Ball
    double radius = 1;  // Ball

    static Domain box(VecD lo, VecD hi);
    static Domain ball(VecD center, double radius);
    static Domain unit_ball(int d);

    int dim() const;
    bool contains(const VecD& x, double shrink = 0.0) const;  // open test, margin `shrink`
};

/// A jet-evaluable scalar function of d variables: parsed AST plus bound
/// parameters and a declared domain. Fields marked compactly supported
/// evaluate to the zero jet outside their domain.
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(ExprPtr expr, std::vector<std::string> vars, ParamMap params, Domain domain,
                int m_max = 6, bool compact_support = false);

    static ScalarField parse_field(const std::string& text, std::vector<std::string> vars,
                                   ParamMap params, Domain domain, int m_max = 6,
                                   bool compact_support = false);

    int arity() const { return static_cast<int>(vars_.size()); }
    int max_order() const { return m_max_; }
    const Domain& domain() const { return domain_; }
    bool compact_support() const { return compact_support_; }
    const ExprPtr& expr() const { return expr_; }
    const std::vector<std::string>& variables() const { return vars_; }
    const ParamMap& params() const { return params_; }

    double operator()(const VecD& x) const;
    Jet jet(const VecD& x, int order) const;
    // Composition: arguments are jets of the coordinate functions (pullbacks).
    Jet jet_of(std::span<const Jet> args) const;

private:
    ExprPtr expr_;
    std::vector<std::string> vars_;
    ParamMap params_;
    Domain domain_;
    int m_max_ = 6;
    bool compact_support_ = false;
};

// jet_eval / pullback-style entry points used throughout.
Jet jet_eval(const ScalarField& f, const VecD& x, int order);

// Catalog of named phases/amplitudes. Throws std::invalid_argument on
// unknown names or bad parameters.
ScalarField catalog_get(const std::string& name, const ParamMap& params);

}  // namespace oscgeo
