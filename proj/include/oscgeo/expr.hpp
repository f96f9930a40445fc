#pragma once

#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "oscgeo/jet.hpp"

namespace oscgeo {

using ParamMap = std::map<std::string, double>;

struct ParseError : std::runtime_error {
    std::size_t offset;
    ParseError(const std::string& msg, std::size_t off)
        : std::runtime_error(msg + " at offset " + std::to_string(off)), offset(off) {}
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression AST. Variables are indices into the declared
/// variable list; parameters are free names bound at field construction.
struct Expr {
    enum class Kind { Number, Variable, Parameter, Neg, Add, Sub, Mul, Div, Pow, Call };

    Kind kind;
    double number = 0.0;
    int var = -1;
    std::string name;  // parameter name or called function
    std::vector<ExprPtr> kids;

    static ExprPtr num(double v);
    static ExprPtr variable(int i);
    static ExprPtr param(std::string name);
    static ExprPtr unary(Kind k, ExprPtr a);
    static ExprPtr binary(Kind k, ExprPtr a, ExprPtr b);
    static ExprPtr call(std::string fn, std::vector<ExprPtr> args);
};

// Infix grammar with ^ for powers (right associative, binds tighter than
// unary minus) and call syntax for {exp,sin,cos,log,sqrt,abs,pow}.
ExprPtr parse(const std::string& text, const std::vector<std::string>& variables);

std::string to_string(const Expr& e, const std::vector<std::string>& variables);

double eval(const Expr& e, std::span<const double> vars, const ParamMap& params);
Jet eval_jet(const Expr& e, std::span<const Jet> vars, const ParamMap& params);

}  // namespace oscgeo
