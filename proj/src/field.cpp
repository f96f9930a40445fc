#include "oscgeo/field.hpp"

#include <cmath>
#include <stdexcept>

namespace oscgeo {

Domain Domain::box(VecD lo, VecD hi) {
    Domain d;
    d.kind = Kind::Box;
    d.lo = std::move(lo);
    d.hi = std::move(hi);
    return d;
}

Domain Domain::ball(VecD center, double radius) {
    Domain d;
    d.kind = Kind::Ball;
    d.center = std::move(center);
    d.radius = radius;
    return d;
}

Domain Domain::unit_ball(int n) { return ball(VecD(n, 0.0), 1.0); }

int Domain::dim() const {
    return static_cast<int>(kind == Kind::Box ? lo.size() : center.size());
}

bool Domain::contains(const VecD& x, double shrink) const {
    if (kind == Kind::Box) {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(x[i] > lo[i] + shrink && x[i] < hi[i] - shrink)) return false;
        return true;
    }
    double r2 = 0.0;
    for (std::size_t i = 0; i < center.size(); ++i)
        r2 += (x[i] - center[i]) * (x[i] - center[i]);
    double r = radius - shrink;
    return r2 < r * r;
}

ScalarField::ScalarField(ExprPtr expr, std::vector<std::string> vars, ParamMap params,
                         Domain domain, int m_max, bool compact_support)
    : expr_(std::move(expr)),
      vars_(std::move(vars)),
      params_(std::move(params)),
      domain_(std::move(domain)),
      m_max_(m_max),
      compact_support_(compact_support) {}

ScalarField ScalarField::parse_field(const std::string& text, std::vector<std::string> vars,
                                     ParamMap params, Domain domain, int m_max,
                                     bool compact_support) {
    ExprPtr e = parse(text, vars);
    return ScalarField(std::move(e), std::move(vars), std::move(params), std::move(domain),
                       m_max, compact_support);
}

double ScalarField::operator()(const VecD& x) const {
    if (compact_support_ && !domain_.contains(x)) return 0.0;
    return eval(*expr_, x, params_);
}

Jet ScalarField::jet(const VecD& x, int order) const {
    if (order > m_max_) throw std::invalid_argument("ScalarField::jet: order exceeds m_max");
    if (!domain_.contains(x)) {
        if (compact_support_) return Jet(arity(), order, 0.0);
        throw std::domain_error("ScalarField::jet: point outside field domain");
    }
    std::vector<Jet> args;
    args.reserve(vars_.size());
    for (int i = 0; i < arity(); ++i) args.push_back(Jet::variable(arity(), order, i, x[i]));
    return eval_jet(*expr_, args, params_);
}

Jet ScalarField::jet_of(std::span<const Jet> args) const {
    if (static_cast<int>(args.size()) != arity())
        throw std::invalid_argument("ScalarField::jet_of: arity mismatch");
    if (compact_support_) {
        VecD x(arity());
        for (int i = 0; i < arity(); ++i) x[i] = args[i].value();
        if (!domain_.contains(x)) return Jet(args[0].dim(), args[0].order(), 0.0);
    }
    return eval_jet(*expr_, args, params_);
}

Jet jet_eval(const ScalarField& f, const VecD& x, int order) { return f.jet(x, order); }

namespace {

double need(const ParamMap& p, const std::string& key) {
    auto it = p.find(key);
    if (it == p.end()) throw std::invalid_argument("catalog: missing parameter '" + key + "'");
    return it->second;
}

double get_or(const ParamMap& p, const std::string& key, double dflt) {
    auto it = p.find(key);
    return it == p.end() ? dflt : it->second;
}

std::vector<std::string> var_names(int d) {
    if (d == 1) return {"t"};
    if (d == 2) return {"x", "y"};
    if (d == 3) return {"x", "y", "z"};
    throw std::invalid_argument("catalog: dimension must be 1..3");
}

ExprPtr radius_sq(int d) {
    ExprPtr s = Expr::binary(Expr::Kind::Pow, Expr::variable(0), Expr::num(2));
    for (int i = 1; i < d; ++i)
        s = Expr::binary(Expr::Kind::Add, s,
                         Expr::binary(Expr::Kind::Pow, Expr::variable(i), Expr::num(2)));
    return s;
}

}  // namespace

ScalarField catalog_get(const std::string& name, const ParamMap& params) {
    if (name == "monomial") {
        int n = static_cast<int>(need(params, "n"));
        if (n < 0) throw std::invalid_argument("monomial: n must be >= 0");
        ExprPtr e = Expr::binary(Expr::Kind::Pow, Expr::variable(0), Expr::num(n));
        return ScalarField(e, var_names(1), {}, Domain::box({-8.0}, {8.0}));
    }
    if (name == "sum_of_even_powers") {
        int d = static_cast<int>(get_or(params, "d", 1));
        int p = static_cast<int>(need(params, "p"));
        if (p < 1) throw std::invalid_argument("sum_of_even_powers: p must be >= 1");
        ExprPtr e = Expr::binary(Expr::Kind::Pow, Expr::variable(0), Expr::num(2 * p));
        for (int i = 1; i < d; ++i)
            e = Expr::binary(Expr::Kind::Add, e,
                             Expr::binary(Expr::Kind::Pow, Expr::variable(i), Expr::num(2 * p)));
        return ScalarField(e, var_names(d), {}, Domain::box(VecD(d, -8.0), VecD(d, 8.0)));
    }
    if (name == "radial_power") {
        int d = static_cast<int>(get_or(params, "d", 1));
        double p = need(params, "p");
        if (!(p > 0)) throw std::invalid_argument("radial_power: p must be positive");
        ExprPtr e = Expr::binary(Expr::Kind::Pow, radius_sq(d), Expr::num(p / 2.0));
        return ScalarField(e, var_names(d), {}, Domain::box(VecD(d, -8.0), VecD(d, 8.0)));
    }
    if (name == "flat_exponential") {
        double alpha = need(params, "alpha");
        if (!(alpha > 0)) throw std::invalid_argument("flat_exponential: alpha must be > 0");
        ExprPtr e = parse("exp(-(1 + 1/alpha) * t^(-alpha))", {"t"});
        return ScalarField(e, {"t"}, {{"alpha", alpha}}, Domain::box({0.0}, {1.0 + 1e-12}));
    }
    if (name == "gaussian_bump") {
        int d = static_cast<int>(get_or(params, "d", 1));
        double w = get_or(params, "w", 1.0);
        if (!(w > 0)) throw std::invalid_argument("gaussian_bump: w must be > 0");
        VecD c(d, 0.0);
        for (int i = 0; i < d; ++i) c[i] = get_or(params, "c" + std::to_string(i), 0.0);
        // exp(1 - 1/(1 - rho)), rho = |x-c|^2/w^2; equals 1 at the center, 0 outside.
        ExprPtr rho = nullptr;
        for (int i = 0; i < d; ++i) {
            ExprPtr term = Expr::binary(
                Expr::Kind::Pow,
                Expr::binary(Expr::Kind::Div,
                             Expr::binary(Expr::Kind::Sub, Expr::variable(i), Expr::num(c[i])),
                             Expr::num(w)),
                Expr::num(2));
            rho = rho ? Expr::binary(Expr::Kind::Add, rho, term) : term;
        }
        ExprPtr e = Expr::call(
            "exp", {Expr::binary(Expr::Kind::Sub, Expr::num(1),
                                 Expr::binary(Expr::Kind::Div, Expr::num(1),
                                              Expr::binary(Expr::Kind::Sub, Expr::num(1), rho)))});
        return ScalarField(e, var_names(d), {}, Domain::ball(c, w), 6, true);
    }
    if (name == "polynomial") {
        ExprPtr e = nullptr;
        for (int k = 0; k < 32; ++k) {
            auto it = params.find("c" + std::to_string(k));
            if (it == params.end()) continue;
            ExprPtr term = Expr::binary(Expr::Kind::Mul, Expr::num(it->second),
                                        Expr::binary(Expr::Kind::Pow, Expr::variable(0),
                                                     Expr::num(k)));
            e = e ? Expr::binary(Expr::Kind::Add, e, term) : term;
        }
        if (!e) throw std::invalid_argument("polynomial: no coefficients c0..c31 given");
        return ScalarField(e, var_names(1), {}, Domain::box({-8.0}, {8.0}));
    }
    throw std::invalid_argument("catalog: unknown field '" + name + "'");
}

}  // namespace oscgeo
