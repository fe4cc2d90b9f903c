#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "escna/error.hpp"

namespace escna::expr {

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class UnaryOp { Neg };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Func { Cos, Sin, Exp, Abs, Sgn, Sqrt, Min, Max };

// Ordered set of variable names an expression may reference. The position of
// a name is its evaluation slot, so values are passed as a flat array.
class VariableSet {
public:
    VariableSet() = default;
    explicit VariableSet(std::vector<std::string> names) : names_(std::move(names)) {}

    // {t, x1, ..., xn}: the closure used by drift/channel/output expressions.
    static VariableSet state_time(int dim);
    // {u}: the closure used by scalar input nonlinearities.
    static VariableSet control_input() { return VariableSet({"u"}); }

    std::optional<int> find(std::string_view name) const;
    const std::string& name(int slot) const { return names_[static_cast<std::size_t>(slot)]; }
    int size() const { return static_cast<int>(names_.size()); }

private:
    std::vector<std::string> names_;
};

// Immutable expression tree. Nodes are shared (diff reuses subtrees), never
// mutated after construction, and safe to evaluate concurrently.
class Expr {
public:
    struct Constant {
        double value;
    };
    struct Variable {
        int slot;
        std::string name;
    };
    struct Unary {
        UnaryOp op;
        ExprPtr operand;
    };
    struct Binary {
        BinaryOp op;
        ExprPtr lhs;
        ExprPtr rhs;
    };
    struct Call {
        Func fn;
        std::vector<ExprPtr> args;
    };
    using Node = std::variant<Constant, Variable, Unary, Binary, Call>;

    explicit Expr(Node node) : node_(std::move(node)) {}
    const Node& node() const { return node_; }

private:
    Node node_;
};

// Construction helpers. These apply constant folding and the trivial identity
// folds (x+0, x*1, x*0, x^1, ...) so programmatically built expressions come
// out already folded; the parser builds raw nodes instead, except that a
// unary minus applied directly to a numeric literal becomes a negative
// constant in both paths.
ExprPtr constant(double value);
ExprPtr variable(int slot, std::string name);
ExprPtr neg(ExprPtr e);
ExprPtr add(ExprPtr a, ExprPtr b);
ExprPtr sub(ExprPtr a, ExprPtr b);
ExprPtr mul(ExprPtr a, ExprPtr b);
ExprPtr divide(ExprPtr a, ExprPtr b);
ExprPtr pow(ExprPtr base, ExprPtr exponent);
ExprPtr call(Func fn, std::vector<ExprPtr> args);

// Parses a source string against a closed variable set. Unknown identifiers,
// arity mismatches and syntax errors raise ParseError with a byte offset.
// Grammar: + - * / ^ with ^ > unary- > */ > +-, all left-associative except ^;
// functions cos, sin, exp, abs, sgn, sqrt, min, max; no implicit multiplication.
ExprPtr parse_expr(std::string_view source, const VariableSet& vars);

// Evaluates with one value per variable slot. Throws EvalError on domain
// errors (division by zero, sqrt of a negative) instead of returning NaN.
double eval_expr(const Expr& e, std::span<const double> values);

// Map-based evaluation; every free variable of e must be bound.
double eval_expr(const Expr& e, const VariableSet& vars,
                 const std::map<std::string, double>& bindings);

// Slots actually referenced by e, ascending and deduplicated.
std::vector<int> free_slots(const Expr& e);

// Symbolic derivative with respect to one slot. abs'(x) = sgn(x), sgn' = 0,
// min/max differentiate through sgn(a-b) (ties take the two-sided average).
// The exponent of ^ must be a constant.
ExprPtr diff_expr(const Expr& e, int slot);

// Prints with minimal parentheses so that parse_expr(print_expr(e)) is
// structurally equal to e. Constants use 17 significant digits.
std::string print_expr(const Expr& e);

// Bottom-up constant folding (same rules as the construction helpers).
ExprPtr fold_constants(const ExprPtr& e);

bool structurally_equal(const Expr& a, const Expr& b);
inline bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
    return structurally_equal(*a, *b);
}

} // namespace escna::expr
