#include "escna/nonlinearity.hpp"

#include <array>
#include <cmath>

namespace escna::model {

double deadzone_saturation(double u) {
    const double a = std::abs(u);
    const double s = u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0);
    if (a < 0.5) return 0.0;
    if (a <= 2.0) {
        const double r = a - 0.5;
        return s * r * r;
    }
    return s * 2.25;
}

ScalarNonlinearity ScalarNonlinearity::expression(expr::ExprPtr e) {
    return ScalarNonlinearity(Kind::Expression, 0.0, std::move(e));
}

ScalarNonlinearity ScalarNonlinearity::deadzone() {
    return ScalarNonlinearity(Kind::DeadzoneSaturation, 0.0, nullptr);
}

ScalarNonlinearity ScalarNonlinearity::deadzone_plus_even(double eps) {
    return ScalarNonlinearity(Kind::DeadzoneSaturationPlusEven, eps, nullptr);
}

double ScalarNonlinearity::operator()(double u) const {
    switch (kind_) {
        case Kind::Expression: {
            const std::array<double, 1> values{u};
            return expr::eval_expr(*expr_, values);
        }
        case Kind::DeadzoneSaturation:
            return deadzone_saturation(u);
        case Kind::DeadzoneSaturationPlusEven: {
            const double u2 = u * u;
            return deadzone_saturation(u) + eps_ * (u2 + u2 * u2);
        }
    }
    return 0.0;
}

} // namespace escna::model
