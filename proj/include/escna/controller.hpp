#pragma once

#include <optional>
#include <span>
#include <string>

#include "json.hpp"

#include "escna/error.hpp"
#include "escna/expr.hpp"

namespace escna::esc {

// Dither amplitude (alpha*omega)^(1/(2(2m+1))). The exponent shrinks as the
// controller power index m grows, so the highest odd control power ends up
// with an omega-independent averaged contribution.
double dither_amplitude(double alpha, double omega, int m);

// High-frequency dither controller
//
//     u(x,t) = (alpha*omega)^(1/(2(2m+1))) * cos(omega*t + k*V(x,t))
//
// or, in output-feedback mode, with the measured output y in place of V.
class EscController {
  public:
    static EscController state_feedback(int m, double alpha, double omega, double k,
                                        expr::ExprPtr objective, expr::VariableSet vars);
    static EscController output_feedback(int m, double alpha, double omega, double k);

    int m() const { return m_; }
    double alpha() const { return alpha_; }
    double omega() const { return omega_; }
    double k() const { return k_; }
    double amplitude() const { return amplitude_; }
    double period() const;
    bool output_mode() const { return !objective_.has_value(); }

    // The function V(t, x1..xn); throws in output-feedback mode.
    const expr::ExprPtr& objective() const;
    const expr::VariableSet& vars() const;

    // Control value. State-feedback mode evaluates V(t, x); output-feedback
    // mode requires the measured output y.
    double value(double t, std::span<const double> x,
                 std::optional<double> y = std::nullopt) const;

  private:
    EscController(int m, double alpha, double omega, double k,
                  std::optional<expr::ExprPtr> objective,
                  std::optional<expr::VariableSet> vars);

    int m_;
    double alpha_;
    double omega_;
    double k_;
    double amplitude_;
    std::optional<expr::ExprPtr> objective_;
    std::optional<expr::VariableSet> vars_;
};

// Controller config JSON: keys m, alpha, omega, k, and either V (expression
// string over t, x1..xn) or output_feedback: true. `dim` supplies the state
// dimension V closes over.
EscController controller_from_json(const nlohmann::json& config, int dim);

} // namespace escna::esc
