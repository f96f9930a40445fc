#include "oscgeo/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace oscgeo {

ExprPtr Expr::num(double v) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Number;
    e->number = v;
    return e;
}

ExprPtr Expr::variable(int i) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Variable;
    e->var = i;
    return e;
}

ExprPtr Expr::param(std::string name) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Parameter;
    e->name = std::move(name);
    return e;
}

ExprPtr Expr::unary(Kind k, ExprPtr a) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->kids = {std::move(a)};
    return e;
}

ExprPtr Expr::binary(Kind k, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->kids = {std::move(a), std::move(b)};
    return e;
}

ExprPtr Expr::call(std::string fn, std::vector<ExprPtr> args) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Call;
    e->name = std::move(fn);
    e->kids = std::move(args);
    return e;
}

namespace {

int call_arity(const std::string& fn) {
    if (fn == "pow") return 2;
    if (fn == "exp" || fn == "sin" || fn == "cos" || fn == "log" || fn == "sqrt" ||
        fn == "abs")
        return 1;
    return -1;
}

class Parser {
public:
    Parser(const std::string& text, const std::vector<std::string>& vars)
        : s_(text), vars_(vars) {}

    ExprPtr run() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("empty expression", 0);
        ExprPtr e = expr();
        skip_ws();
        if (pos_ < s_.size()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    const std::string& s_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    ExprPtr expr() {
        ExprPtr e = term();
        for (;;) {
            if (accept('+'))
                e = Expr::binary(Expr::Kind::Add, e, term());
            else if (accept('-'))
                e = Expr::binary(Expr::Kind::Sub, e, term());
            else
                return e;
        }
    }

    ExprPtr term() {
        ExprPtr e = unary();
        for (;;) {
            if (accept('*'))
                e = Expr::binary(Expr::Kind::Mul, e, unary());
            else if (accept('/'))
                e = Expr::binary(Expr::Kind::Div, e, unary());
            else
                return e;
        }
    }

    ExprPtr unary() {
        if (accept('-')) return Expr::unary(Expr::Kind::Neg, unary());
        return power();
    }

    ExprPtr power() {
        ExprPtr base = atom();
        if (accept('^')) return Expr::binary(Expr::Kind::Pow, base, unary());
        return base;
    }

    ExprPtr atom() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
        throw ParseError("unexpected character", pos_);
    }

    ExprPtr number() {
        std::size_t start = pos_;
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("malformed number", start);
        pos_ += static_cast<std::size_t>(end - begin);
        return Expr::num(v);
    }

    ExprPtr ident() {
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        std::string name = s_.substr(start, pos_ - start);
        if (peek() == '(') {
            int arity = call_arity(name);
            if (arity < 0) throw ParseError("unknown function '" + name + "'", start);
            expect('(');
            std::vector<ExprPtr> args;
            args.push_back(expr());
            while (accept(',')) args.push_back(expr());
            expect(')');
            if (static_cast<int>(args.size()) != arity)
                throw ParseError("wrong arity for '" + name + "'", start);
            return Expr::call(name, std::move(args));
        }
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i] == name) return Expr::variable(static_cast<int>(i));
        return Expr::param(name);
    }
};

bool depends_on_vars(const Expr& e) {
    if (e.kind == Expr::Kind::Variable) return true;
    for (const auto& k : e.kids)
        if (depends_on_vars(*k)) return true;
    return false;
}

}  // namespace

ExprPtr parse(const std::string& text, const std::vector<std::string>& variables) {
    return Parser(text, variables).run();
}

std::string to_string(const Expr& e, const std::vector<std::string>& vars) {
    using K = Expr::Kind;
    std::ostringstream os;
    switch (e.kind) {
        case K::Number:
            os.precision(17);
            // negative literals need parens so they survive under '^'
            if (e.number < 0)
                os << "(" << e.number << ")";
            else
                os << e.number;
            break;
        case K::Variable:
            os << vars[e.var];
            break;
        case K::Parameter:
            os << e.name;
            break;
        case K::Neg:
            os << "(-" << to_string(*e.kids[0], vars) << ")";
            break;
        case K::Add:
            os << "(" << to_string(*e.kids[0], vars) << " + " << to_string(*e.kids[1], vars) << ")";
            break;
        case K::Sub:
            os << "(" << to_string(*e.kids[0], vars) << " - " << to_string(*e.kids[1], vars) << ")";
            break;
        case K::Mul:
            os << "(" << to_string(*e.kids[0], vars) << " * " << to_string(*e.kids[1], vars) << ")";
            break;
        case K::Div:
            os << "(" << to_string(*e.kids[0], vars) << " / " << to_string(*e.kids[1], vars) << ")";
            break;
        case K::Pow:
            os << "(" << to_string(*e.kids[0], vars) << " ^ " << to_string(*e.kids[1], vars) << ")";
            break;
        case K::Call: {
            os << e.name << "(";
            for (std::size_t i = 0; i < e.kids.size(); ++i)
                os << (i ? ", " : "") << to_string(*e.kids[i], vars);
            os << ")";
            break;
        }
    }
    return os.str();
}

double eval(const Expr& e, std::span<const double> vars, const ParamMap& params) {
    using K = Expr::Kind;
    switch (e.kind) {
        case K::Number: return e.number;
        case K::Variable: return vars[e.var];
        case K::Parameter: {
            auto it = params.find(e.name);
            if (it == params.end())
                throw std::runtime_error("unbound parameter '" + e.name + "'");
            return it->second;
        }
        case K::Neg: return -eval(*e.kids[0], vars, params);
        case K::Add: return eval(*e.kids[0], vars, params) + eval(*e.kids[1], vars, params);
        case K::Sub: return eval(*e.kids[0], vars, params) - eval(*e.kids[1], vars, params);
        case K::Mul: return eval(*e.kids[0], vars, params) * eval(*e.kids[1], vars, params);
        case K::Div: return eval(*e.kids[0], vars, params) / eval(*e.kids[1], vars, params);
        case K::Pow:
            return std::pow(eval(*e.kids[0], vars, params), eval(*e.kids[1], vars, params));
        case K::Call: {
            double a = eval(*e.kids[0], vars, params);
            if (e.name == "exp") return std::exp(a);
            if (e.name == "sin") return std::sin(a);
            if (e.name == "cos") return std::cos(a);
            if (e.name == "log") return std::log(a);
            if (e.name == "sqrt") return std::sqrt(a);
            if (e.name == "abs") return std::abs(a);
            if (e.name == "pow") return std::pow(a, eval(*e.kids[1], vars, params));
            throw std::runtime_error("unknown function '" + e.name + "'");
        }
    }
    throw std::logic_error("eval: bad expression node");
}

Jet eval_jet(const Expr& e, std::span<const Jet> vars, const ParamMap& params) {
    using K = Expr::Kind;
    const int dim = vars[0].dim();
    const int ord = vars[0].order();
    switch (e.kind) {
        case K::Number: return Jet::constant(dim, ord, e.number);
        case K::Variable: return vars[e.var];
        case K::Parameter: {
            auto it = params.find(e.name);
            if (it == params.end())
                throw std::runtime_error("unbound parameter '" + e.name + "'");
            return Jet::constant(dim, ord, it->second);
        }
        case K::Neg: return -eval_jet(*e.kids[0], vars, params);
        case K::Add: return eval_jet(*e.kids[0], vars, params) + eval_jet(*e.kids[1], vars, params);
        case K::Sub: return eval_jet(*e.kids[0], vars, params) - eval_jet(*e.kids[1], vars, params);
        case K::Mul: return eval_jet(*e.kids[0], vars, params) * eval_jet(*e.kids[1], vars, params);
        case K::Div: return eval_jet(*e.kids[0], vars, params) / eval_jet(*e.kids[1], vars, params);
        case K::Pow:
        case K::Call: {
            if (e.kind == K::Pow || e.name == "pow") {
                const Expr& ex = *e.kids[1];
                if (depends_on_vars(ex)) {
                    // a^b with variable exponent: exp(b log a)
                    return jet_exp(eval_jet(ex, vars, params) *
                                   jet_log(eval_jet(*e.kids[0], vars, params)));
                }
                double p = eval(ex, std::span<const double>(), params);
                return jet_pow(eval_jet(*e.kids[0], vars, params), p);
            }
            Jet a = eval_jet(*e.kids[0], vars, params);
            if (e.name == "exp") return jet_exp(a);
            if (e.name == "sin") return jet_sin(a);
            if (e.name == "cos") return jet_cos(a);
            if (e.name == "log") return jet_log(a);
            if (e.name == "sqrt") return jet_sqrt(a);
            if (e.name == "abs") return jet_abs(a);
            throw std::runtime_error("unknown function '" + e.name + "'");
        }
    }
    throw std::logic_error("eval_jet: bad expression node");
}

}  // namespace oscgeo
