#pragma once

#include "escna/expr.hpp"

namespace escna::model {

// Deadzone-saturation input map: zero inside |u| < 0.5, the shifted square
// sgn(u)*(|u|-0.5)^2 on 0.5 <= |u| <= 2, and the odd saturation sgn(u)*2.25
// beyond. Continuous and odd by construction.
double deadzone_saturation(double u);

// Scalar input nonlinearity h(u) attached to a control channel. Either an
// expression in u, the deadzone-saturation map, or the deadzone-saturation
// map plus the even perturbation eps*(u^2 + u^4).
class ScalarNonlinearity {
public:
    enum class Kind { Expression, DeadzoneSaturation, DeadzoneSaturationPlusEven };

    static ScalarNonlinearity expression(expr::ExprPtr e);
    static ScalarNonlinearity deadzone();
    static ScalarNonlinearity deadzone_plus_even(double eps);

    double operator()(double u) const;

    Kind kind() const { return kind_; }
    double eps() const { return eps_; }
    const expr::ExprPtr& expression_body() const { return expr_; }

private:
    ScalarNonlinearity(Kind kind, double eps, expr::ExprPtr e)
        : kind_(kind), eps_(eps), expr_(std::move(e)) {}

    Kind kind_;
    double eps_ = 0.0;
    expr::ExprPtr expr_;
};

} // namespace escna::model
