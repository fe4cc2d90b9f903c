#include "escna/expr.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

namespace escna::expr {

VariableSet VariableSet::state_time(int dim) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(dim) + 1);
    names.emplace_back("t");
    for (int i = 1; i <= dim; ++i) names.push_back("x" + std::to_string(i));
    return VariableSet(std::move(names));
}

std::optional<int> VariableSet::find(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<int>(i);
    return std::nullopt;
}

namespace {

struct FuncInfo {
    std::string_view name;
    Func fn;
    int arity;
};

constexpr std::array<FuncInfo, 8> kFunctions{{
    {"cos", Func::Cos, 1},
    {"sin", Func::Sin, 1},
    {"exp", Func::Exp, 1},
    {"abs", Func::Abs, 1},
    {"sgn", Func::Sgn, 1},
    {"sqrt", Func::Sqrt, 1},
    {"min", Func::Min, 2},
    {"max", Func::Max, 2},
}};

const FuncInfo* lookup_function(std::string_view name) {
    for (const auto& info : kFunctions)
        if (info.name == name) return &info;
    return nullptr;
}

std::string_view function_name(Func fn) {
    for (const auto& info : kFunctions)
        if (info.fn == fn) return info.name;
    return "?";
}

bool is_constant(const Expr& e, double* out = nullptr) {
    if (const auto* c = std::get_if<Expr::Constant>(&e.node())) {
        if (out) *out = c->value;
        return true;
    }
    return false;
}

bool is_constant_value(const ExprPtr& e, double v) {
    double c;
    return is_constant(*e, &c) && c == v;
}

ExprPtr make_node(Expr::Node node) {
    return std::make_shared<const Expr>(std::move(node));
}

double ipow(double base, long long n) {
    double r = 1.0;
    double b = base;
    for (long long e = n; e > 0; e >>= 1) {
        if (e & 1) r *= b;
        if (e > 1) b *= b;
    }
    return r;
}

double apply_binary(BinaryOp op, double a, double b) {
    switch (op) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div:
            if (b == 0.0) throw EvalError("division by zero");
            return a / b;
        case BinaryOp::Pow: {
            double i;
            if (std::modf(b, &i) == 0.0 && std::abs(b) <= 64.0) {
                if (b >= 0.0) return ipow(a, static_cast<long long>(b));
                if (a == 0.0) throw EvalError("zero raised to a negative power");
                return 1.0 / ipow(a, -static_cast<long long>(b));
            }
            double r = std::pow(a, b);
            if (std::isnan(r) && !std::isnan(a) && !std::isnan(b))
                throw EvalError("invalid power: negative base with non-integer exponent");
            return r;
        }
    }
    throw EvalError("unreachable binary op");
}

double apply_call(Func fn, std::span<const double> a) {
    switch (fn) {
        case Func::Cos: return std::cos(a[0]);
        case Func::Sin: return std::sin(a[0]);
        case Func::Exp: return std::exp(a[0]);
        case Func::Abs: return std::abs(a[0]);
        case Func::Sgn: return a[0] > 0.0 ? 1.0 : (a[0] < 0.0 ? -1.0 : 0.0);
        case Func::Sqrt:
            if (a[0] < 0.0) throw EvalError("sqrt of a negative value");
            return std::sqrt(a[0]);
        case Func::Min: return a[0] < a[1] ? a[0] : a[1];
        case Func::Max: return a[0] > a[1] ? a[0] : a[1];
    }
    throw EvalError("unreachable function");
}

} // namespace

ExprPtr constant(double value) { return make_node(Expr::Constant{value}); }

ExprPtr variable(int slot, std::string name) {
    return make_node(Expr::Variable{slot, std::move(name)});
}

ExprPtr neg(ExprPtr e) {
    double c;
    if (is_constant(*e, &c)) return constant(-c);
    if (const auto* u = std::get_if<Expr::Unary>(&e->node()); u && u->op == UnaryOp::Neg)
        return u->operand;
    return make_node(Expr::Unary{UnaryOp::Neg, std::move(e)});
}

ExprPtr add(ExprPtr a, ExprPtr b) {
    double ca, cb;
    if (is_constant(*a, &ca) && is_constant(*b, &cb)) return constant(ca + cb);
    if (is_constant_value(a, 0.0)) return b;
    if (is_constant_value(b, 0.0)) return a;
    return make_node(Expr::Binary{BinaryOp::Add, std::move(a), std::move(b)});
}

ExprPtr sub(ExprPtr a, ExprPtr b) {
    double ca, cb;
    if (is_constant(*a, &ca) && is_constant(*b, &cb)) return constant(ca - cb);
    if (is_constant_value(b, 0.0)) return a;
    if (is_constant_value(a, 0.0)) return neg(std::move(b));
    return make_node(Expr::Binary{BinaryOp::Sub, std::move(a), std::move(b)});
}

ExprPtr mul(ExprPtr a, ExprPtr b) {
    double ca, cb;
    if (is_constant(*a, &ca) && is_constant(*b, &cb)) return constant(ca * cb);
    if (is_constant_value(a, 0.0) || is_constant_value(b, 0.0)) return constant(0.0);
    if (is_constant_value(a, 1.0)) return b;
    if (is_constant_value(b, 1.0)) return a;
    return make_node(Expr::Binary{BinaryOp::Mul, std::move(a), std::move(b)});
}

ExprPtr divide(ExprPtr a, ExprPtr b) {
    double ca, cb;
    if (is_constant(*b, &cb) && cb != 0.0 && is_constant(*a, &ca)) return constant(ca / cb);
    if (is_constant_value(b, 1.0)) return a;
    if (is_constant_value(a, 0.0) && !is_constant_value(b, 0.0)) return constant(0.0);
    return make_node(Expr::Binary{BinaryOp::Div, std::move(a), std::move(b)});
}

ExprPtr pow(ExprPtr base, ExprPtr exponent) {
    double cb, ce;
    if (is_constant(*exponent, &ce)) {
        if (ce == 1.0) return base;
        if (ce == 0.0) return constant(1.0);
        if (is_constant(*base, &cb)) {
            try {
                return constant(apply_binary(BinaryOp::Pow, cb, ce));
            } catch (const EvalError&) {
                // leave unfolded; evaluation will report the domain error
            }
        }
    }
    return make_node(Expr::Binary{BinaryOp::Pow, std::move(base), std::move(exponent)});
}

ExprPtr call(Func fn, std::vector<ExprPtr> args) {
    bool all_const = true;
    std::vector<double> values;
    values.reserve(args.size());
    for (const auto& a : args) {
        double c;
        if (is_constant(*a, &c)) {
            values.push_back(c);
        } else {
            all_const = false;
            break;
        }
    }
    if (all_const) {
        try {
            return constant(apply_call(fn, values));
        } catch (const EvalError&) {
            // leave unfolded
        }
    }
    return make_node(Expr::Call{fn, std::move(args)});
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct Token {
    enum class Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };
    Kind kind;
    std::size_t offset;
    double number = 0.0;
    std::string ident;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::size_t at = pos_;
        if (pos_ >= src_.size()) return {Token::Kind::End, at};
        const char c = src_[pos_];
        switch (c) {
            case '+': ++pos_; return {Token::Kind::Plus, at};
            case '-': ++pos_; return {Token::Kind::Minus, at};
            case '*': ++pos_; return {Token::Kind::Star, at};
            case '/': ++pos_; return {Token::Kind::Slash, at};
            case '^': ++pos_; return {Token::Kind::Caret, at};
            case '(': ++pos_; return {Token::Kind::LParen, at};
            case ')': ++pos_; return {Token::Kind::RParen, at};
            case ',': ++pos_; return {Token::Kind::Comma, at};
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos_ + 1 < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
            return lex_number(at);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
                ++end;
            Token tok{Token::Kind::Ident, at};
            tok.ident = std::string(src_.substr(pos_, end - pos_));
            pos_ = end;
            return tok;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", at);
    }

private:
    Token lex_number(std::size_t at) {
        std::size_t end = pos_;
        while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
        if (end < src_.size() && src_[end] == '.') {
            ++end;
            while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
        }
        if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
            std::size_t exp = end + 1;
            if (exp < src_.size() && (src_[exp] == '+' || src_[exp] == '-')) ++exp;
            if (exp < src_.size() && std::isdigit(static_cast<unsigned char>(src_[exp]))) {
                ++exp;
                while (exp < src_.size() && std::isdigit(static_cast<unsigned char>(src_[exp]))) ++exp;
                end = exp;
            }
        }
        const std::string text(src_.substr(pos_, end - pos_));
        Token tok{Token::Kind::Number, at};
        tok.number = std::strtod(text.c_str(), nullptr);
        pos_ = end;
        return tok;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    Parser(std::string_view src, const VariableSet& vars) : lexer_(src), vars_(vars) { advance(); }

    ExprPtr parse() {
        ExprPtr e = additive();
        expect(Token::Kind::End, "unexpected trailing input");
        return e;
    }

private:
    void advance() { tok_ = lexer_.next(); }

    void expect(Token::Kind kind, const char* message) {
        if (tok_.kind != kind) throw ParseError(message, tok_.offset);
        if (kind != Token::Kind::End) advance();
    }

    ExprPtr additive() {
        ExprPtr e = multiplicative();
        while (tok_.kind == Token::Kind::Plus || tok_.kind == Token::Kind::Minus) {
            const BinaryOp op =
                tok_.kind == Token::Kind::Plus ? BinaryOp::Add : BinaryOp::Sub;
            advance();
            e = make_node(Expr::Binary{op, std::move(e), multiplicative()});
        }
        return e;
    }

    ExprPtr multiplicative() {
        ExprPtr e = unary();
        while (tok_.kind == Token::Kind::Star || tok_.kind == Token::Kind::Slash) {
            const BinaryOp op =
                tok_.kind == Token::Kind::Star ? BinaryOp::Mul : BinaryOp::Div;
            advance();
            e = make_node(Expr::Binary{op, std::move(e), unary()});
        }
        return e;
    }

    ExprPtr unary() {
        if (tok_.kind == Token::Kind::Minus) {
            advance();
            ExprPtr operand = unary();
            // A minus applied directly to a literal is a negative constant.
            double c;
            if (is_constant(*operand, &c)) return constant(-c);
            return make_node(Expr::Unary{UnaryOp::Neg, std::move(operand)});
        }
        return power();
    }

    ExprPtr power() {
        ExprPtr base = primary();
        if (tok_.kind == Token::Kind::Caret) {
            advance();
            // Right-associative; the exponent may carry its own unary minus.
            return make_node(Expr::Binary{BinaryOp::Pow, std::move(base), unary()});
        }
        return base;
    }

    ExprPtr primary() {
        switch (tok_.kind) {
            case Token::Kind::Number: {
                const double v = tok_.number;
                advance();
                return constant(v);
            }
            case Token::Kind::LParen: {
                advance();
                ExprPtr e = additive();
                expect(Token::Kind::RParen, "expected ')'");
                return e;
            }
            case Token::Kind::Ident: {
                const std::string name = tok_.ident;
                const std::size_t at = tok_.offset;
                advance();
                if (tok_.kind == Token::Kind::LParen) return finish_call(name, at);
                if (auto slot = vars_.find(name)) return variable(*slot, name);
                if (lookup_function(name))
                    throw ParseError("function '" + name + "' requires an argument list", at);
                throw ParseError("unknown identifier '" + name + "'", at);
            }
            default:
                throw ParseError("expected a value", tok_.offset);
        }
    }

    ExprPtr finish_call(const std::string& name, std::size_t at) {
        const FuncInfo* info = lookup_function(name);
        if (!info) throw ParseError("unknown function '" + name + "'", at);
        advance(); // consume '('
        std::vector<ExprPtr> args;
        if (tok_.kind != Token::Kind::RParen) {
            args.push_back(additive());
            while (tok_.kind == Token::Kind::Comma) {
                advance();
                args.push_back(additive());
            }
        }
        if (tok_.kind != Token::Kind::RParen) throw ParseError("expected ')'", tok_.offset);
        advance();
        if (static_cast<int>(args.size()) != info->arity)
            throw ParseError("function '" + name + "' expects " + std::to_string(info->arity) +
                                 " argument(s), got " + std::to_string(args.size()),
                             at);
        return make_node(Expr::Call{info->fn, std::move(args)});
    }

    Lexer lexer_;
    const VariableSet& vars_;
    Token tok_{Token::Kind::End, 0};
};

} // namespace

ExprPtr parse_expr(std::string_view source, const VariableSet& vars) {
    return Parser(source, vars).parse();
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

double eval_expr(const Expr& e, std::span<const double> values) {
    struct Visitor {
        std::span<const double> values;

        double operator()(const Expr::Constant& c) const { return c.value; }
        double operator()(const Expr::Variable& v) const {
            if (v.slot < 0 || static_cast<std::size_t>(v.slot) >= values.size())
                throw EvalError("unbound variable '" + v.name + "'");
            return values[static_cast<std::size_t>(v.slot)];
        }
        double operator()(const Expr::Unary& u) const {
            return -eval_expr(*u.operand, values);
        }
        double operator()(const Expr::Binary& b) const {
            return apply_binary(b.op, eval_expr(*b.lhs, values), eval_expr(*b.rhs, values));
        }
        double operator()(const Expr::Call& c) const {
            double args[2];
            for (std::size_t i = 0; i < c.args.size(); ++i)
                args[i] = eval_expr(*c.args[i], values);
            return apply_call(c.fn, std::span<const double>(args, c.args.size()));
        }
    };
    return std::visit(Visitor{values}, e.node());
}

double eval_expr(const Expr& e, const VariableSet& vars,
                 const std::map<std::string, double>& bindings) {
    std::vector<double> values(static_cast<std::size_t>(vars.size()), 0.0);
    std::vector<bool> bound(values.size(), false);
    for (const auto& [name, value] : bindings) {
        if (auto slot = vars.find(name)) {
            values[static_cast<std::size_t>(*slot)] = value;
            bound[static_cast<std::size_t>(*slot)] = true;
        }
    }
    for (int slot : free_slots(e))
        if (!bound[static_cast<std::size_t>(slot)])
            throw EvalError("unbound variable '" + vars.name(slot) + "'");
    return eval_expr(e, values);
}

std::vector<int> free_slots(const Expr& e) {
    std::set<int> slots;
    struct Visitor {
        std::set<int>& slots;
        void operator()(const Expr::Constant&) const {}
        void operator()(const Expr::Variable& v) const { slots.insert(v.slot); }
        void operator()(const Expr::Unary& u) const { std::visit(*this, u.operand->node()); }
        void operator()(const Expr::Binary& b) const {
            std::visit(*this, b.lhs->node());
            std::visit(*this, b.rhs->node());
        }
        void operator()(const Expr::Call& c) const {
            for (const auto& a : c.args) std::visit(*this, a->node());
        }
    };
    std::visit(Visitor{slots}, e.node());
    return {slots.begin(), slots.end()};
}

// ---------------------------------------------------------------------------
// Differentiation
// ---------------------------------------------------------------------------

namespace {

ExprPtr diff_node(const ExprPtr& e, int slot);

ExprPtr diff_call(const Expr::Call& c, const ExprPtr& self, int slot) {
    (void)self;
    const ExprPtr& a0 = c.args[0];
    ExprPtr da0 = diff_node(a0, slot);
    switch (c.fn) {
        case Func::Cos:
            return mul(neg(call(Func::Sin, {a0})), da0);
        case Func::Sin:
            return mul(call(Func::Cos, {a0}), da0);
        case Func::Exp:
            return mul(call(Func::Exp, {a0}), da0);
        case Func::Abs:
            // d|a| = sgn(a) da; the kink at 0 takes sgn(0) = 0.
            return mul(call(Func::Sgn, {a0}), da0);
        case Func::Sgn:
            return constant(0.0);
        case Func::Sqrt:
            return divide(da0, mul(constant(2.0), call(Func::Sqrt, {a0})));
        case Func::Min:
        case Func::Max: {
            // min(a,b) = (a + b - |a-b|)/2 and max flips the sign, so the
            // derivative routes through sgn(a-b); ties average both branches.
            const ExprPtr& b0 = c.args[1];
            ExprPtr db0 = diff_node(b0, slot);
            ExprPtr s = call(Func::Sgn, {sub(a0, b0)});
            ExprPtr diffpart = mul(s, sub(da0, db0));
            ExprPtr base = add(da0, db0);
            ExprPtr num = c.fn == Func::Min ? sub(base, diffpart) : add(base, diffpart);
            return divide(num, constant(2.0));
        }
    }
    throw Error("unreachable function in diff");
}

ExprPtr diff_node(const ExprPtr& e, int slot) {
    struct Visitor {
        const ExprPtr& self;
        int slot;

        ExprPtr operator()(const Expr::Constant&) const { return constant(0.0); }
        ExprPtr operator()(const Expr::Variable& v) const {
            return constant(v.slot == slot ? 1.0 : 0.0);
        }
        ExprPtr operator()(const Expr::Unary& u) const {
            return neg(diff_node(u.operand, slot));
        }
        ExprPtr operator()(const Expr::Binary& b) const {
            switch (b.op) {
                case BinaryOp::Add:
                    return add(diff_node(b.lhs, slot), diff_node(b.rhs, slot));
                case BinaryOp::Sub:
                    return sub(diff_node(b.lhs, slot), diff_node(b.rhs, slot));
                case BinaryOp::Mul:
                    return add(mul(diff_node(b.lhs, slot), b.rhs),
                               mul(b.lhs, diff_node(b.rhs, slot)));
                case BinaryOp::Div:
                    return divide(sub(mul(diff_node(b.lhs, slot), b.rhs),
                                      mul(b.lhs, diff_node(b.rhs, slot))),
                                  pow(b.rhs, constant(2.0)));
                case BinaryOp::Pow: {
                    double c;
                    if (!is_constant(*b.rhs, &c))
                        throw EvalError("cannot differentiate a power with a non-constant exponent");
                    if (c == 0.0) return constant(0.0);
                    return mul(mul(constant(c), pow(b.lhs, constant(c - 1.0))),
                               diff_node(b.lhs, slot));
                }
            }
            throw Error("unreachable binary op in diff");
        }
        ExprPtr operator()(const Expr::Call& c) const { return diff_call(c, self, slot); }
    };
    return std::visit(Visitor{e, slot}, e->node());
}

} // namespace

ExprPtr diff_expr(const Expr& e, int slot) {
    // Wrap in a shared node so subtree sharing works uniformly.
    ExprPtr self = std::make_shared<const Expr>(e.node());
    return diff_node(self, slot);
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

int precedence_of(const Expr& e) {
    struct Visitor {
        int operator()(const Expr::Constant& c) const { return c.value < 0.0 ? 3 : 5; }
        int operator()(const Expr::Variable&) const { return 5; }
        int operator()(const Expr::Unary&) const { return 3; }
        int operator()(const Expr::Binary& b) const {
            switch (b.op) {
                case BinaryOp::Add:
                case BinaryOp::Sub: return 1;
                case BinaryOp::Mul:
                case BinaryOp::Div: return 2;
                case BinaryOp::Pow: return 4;
            }
            return 5;
        }
        int operator()(const Expr::Call&) const { return 5; }
    };
    return std::visit(Visitor{}, e.node());
}

std::string format_constant(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void print_node(const Expr& e, std::string& out);

void print_child(const Expr& child, int min_prec, std::string& out) {
    if (precedence_of(child) < min_prec) {
        out += '(';
        print_node(child, out);
        out += ')';
    } else {
        print_node(child, out);
    }
}

void print_node(const Expr& e, std::string& out) {
    struct Visitor {
        std::string& out;

        void operator()(const Expr::Constant& c) const { out += format_constant(c.value); }
        void operator()(const Expr::Variable& v) const { out += v.name; }
        void operator()(const Expr::Unary& u) const {
            out += '-';
            // Parenthesize anything that binds no tighter than unary minus,
            // and nested negations for readability.
            const bool parens = precedence_of(*u.operand) <= 3;
            if (parens) out += '(';
            print_node(*u.operand, out);
            if (parens) out += ')';
        }
        void operator()(const Expr::Binary& b) const {
            switch (b.op) {
                case BinaryOp::Add:
                    print_child(*b.lhs, 1, out);
                    out += '+';
                    print_child(*b.rhs, 2, out);
                    break;
                case BinaryOp::Sub:
                    print_child(*b.lhs, 1, out);
                    out += '-';
                    print_child(*b.rhs, 2, out);
                    break;
                case BinaryOp::Mul:
                    print_child(*b.lhs, 2, out);
                    out += '*';
                    print_child(*b.rhs, 3, out);
                    break;
                case BinaryOp::Div:
                    print_child(*b.lhs, 2, out);
                    out += '/';
                    print_child(*b.rhs, 3, out);
                    break;
                case BinaryOp::Pow:
                    print_child(*b.lhs, 5, out);
                    out += '^';
                    print_child(*b.rhs, 4, out);
                    break;
            }
        }
        void operator()(const Expr::Call& c) const {
            out += function_name(c.fn);
            out += '(';
            for (std::size_t i = 0; i < c.args.size(); ++i) {
                if (i) out += ',';
                print_node(*c.args[i], out);
            }
            out += ')';
        }
    };
    std::visit(Visitor{out}, e.node());
}

} // namespace

std::string print_expr(const Expr& e) {
    std::string out;
    print_node(e, out);
    return out;
}

// ---------------------------------------------------------------------------
// Constant folding and structural equality
// ---------------------------------------------------------------------------

ExprPtr fold_constants(const ExprPtr& e) {
    struct Visitor {
        const ExprPtr& self;

        ExprPtr operator()(const Expr::Constant&) const { return self; }
        ExprPtr operator()(const Expr::Variable&) const { return self; }
        ExprPtr operator()(const Expr::Unary& u) const { return neg(fold_constants(u.operand)); }
        ExprPtr operator()(const Expr::Binary& b) const {
            ExprPtr l = fold_constants(b.lhs);
            ExprPtr r = fold_constants(b.rhs);
            switch (b.op) {
                case BinaryOp::Add: return add(std::move(l), std::move(r));
                case BinaryOp::Sub: return sub(std::move(l), std::move(r));
                case BinaryOp::Mul: return mul(std::move(l), std::move(r));
                case BinaryOp::Div: return divide(std::move(l), std::move(r));
                case BinaryOp::Pow: return pow(std::move(l), std::move(r));
            }
            return self;
        }
        ExprPtr operator()(const Expr::Call& c) const {
            std::vector<ExprPtr> args;
            args.reserve(c.args.size());
            for (const auto& a : c.args) args.push_back(fold_constants(a));
            return call(c.fn, std::move(args));
        }
    };
    return std::visit(Visitor{e}, e->node());
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.node().index() != b.node().index()) return false;
    struct Visitor {
        const Expr& b;

        bool operator()(const Expr::Constant& c) const {
            return c.value == std::get<Expr::Constant>(b.node()).value;
        }
        bool operator()(const Expr::Variable& v) const {
            const auto& o = std::get<Expr::Variable>(b.node());
            return v.slot == o.slot && v.name == o.name;
        }
        bool operator()(const Expr::Unary& u) const {
            const auto& o = std::get<Expr::Unary>(b.node());
            return u.op == o.op && structurally_equal(*u.operand, *o.operand);
        }
        bool operator()(const Expr::Binary& n) const {
            const auto& o = std::get<Expr::Binary>(b.node());
            return n.op == o.op && structurally_equal(*n.lhs, *o.lhs) &&
                   structurally_equal(*n.rhs, *o.rhs);
        }
        bool operator()(const Expr::Call& c) const {
            const auto& o = std::get<Expr::Call>(b.node());
            if (c.fn != o.fn || c.args.size() != o.args.size()) return false;
            for (std::size_t i = 0; i < c.args.size(); ++i)
                if (!structurally_equal(*c.args[i], *o.args[i])) return false;
            return true;
        }
    };
    return std::visit(Visitor{b}, a.node());
}

} // namespace escna::expr
