#include "escna/controller.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

namespace escna::esc {

double dither_amplitude(double alpha, double omega, int m) {
    if (!(alpha > 0.0)) throw ConfigError("dither strength alpha must be positive");
    if (!(omega > 0.0)) throw ConfigError("dither frequency omega must be positive");
    if (m < 0) throw ConfigError("controller power index m must be nonnegative");
    return std::pow(alpha * omega, 1.0 / (2.0 * (2 * m + 1)));
}

EscController::EscController(int m, double alpha, double omega, double k,
                             std::optional<expr::ExprPtr> objective,
                             std::optional<expr::VariableSet> vars)
    : m_(m),
      alpha_(alpha),
      omega_(omega),
      k_(k),
      amplitude_(dither_amplitude(alpha, omega, m)),
      objective_(std::move(objective)),
      vars_(std::move(vars)) {}

EscController EscController::state_feedback(int m, double alpha, double omega, double k,
                                            expr::ExprPtr objective, expr::VariableSet vars) {
    if (!objective) throw ConfigError("state-feedback controller needs an objective V");
    for (int slot : expr::free_slots(*objective))
        if (slot >= static_cast<int>(vars.size()))
            throw ConfigError("objective V refers to a variable outside its state space");
    return EscController(m, alpha, omega, k, std::move(objective), std::move(vars));
}

EscController EscController::output_feedback(int m, double alpha, double omega, double k) {
    return EscController(m, alpha, omega, k, std::nullopt, std::nullopt);
}

double EscController::period() const { return 2.0 * std::numbers::pi / omega_; }

const expr::ExprPtr& EscController::objective() const {
    if (!objective_) throw ConfigError("output-feedback controller has no objective V");
    return *objective_;
}

const expr::VariableSet& EscController::vars() const {
    if (!vars_) throw ConfigError("output-feedback controller has no objective V");
    return *vars_;
}

double EscController::value(double t, std::span<const double> x,
                            std::optional<double> y) const {
    double phase;
    if (output_mode()) {
        if (!y) throw ConfigError("output-feedback controller needs a measured output y");
        phase = k_ * *y;
    } else {
        if (x.size() + 1 != vars_->size())
            throw EvalError("state dimension does not match the controller objective");
        std::vector<double> slots(vars_->size());
        slots[0] = t;
        for (std::size_t i = 0; i < x.size(); ++i) slots[i + 1] = x[i];
        phase = k_ * expr::eval_expr(**objective_, slots);
    }
    return amplitude_ * std::cos(omega_ * t + phase);
}

EscController controller_from_json(const nlohmann::json& config, int dim) {
    if (!config.is_object()) throw ConfigError("controller config: top level must be an object");
    static const std::set<std::string> known{"m", "alpha", "omega", "k", "V", "output_feedback"};
    for (const auto& [key, value] : config.items()) {
        (void)value;
        if (!known.count(key)) throw ConfigError("controller config: unknown key '" + key + "'");
    }
    auto need = [&](const char* key) -> const nlohmann::json& {
        auto it = config.find(key);
        if (it == config.end())
            throw ConfigError(std::string("controller config: missing required key '") + key + "'");
        return *it;
    };
    const auto& m_json = need("m");
    if (!m_json.is_number_integer()) throw ConfigError("controller config: m must be an integer");
    const int m = m_json.get<int>();
    auto number = [&](const char* key) {
        const auto& v = need(key);
        if (!v.is_number()) throw ConfigError(std::string("controller config: ") + key + " must be a number");
        return v.get<double>();
    };
    const double alpha = number("alpha");
    const double omega = number("omega");
    const double k = number("k");

    const bool has_v = config.contains("V");
    bool output = false;
    if (auto it = config.find("output_feedback"); it != config.end()) {
        if (!it->is_boolean())
            throw ConfigError("controller config: output_feedback must be a boolean");
        output = it->get<bool>();
    }
    if (has_v == output)
        throw ConfigError("controller config: provide exactly one of V or output_feedback");
    if (output) return EscController::output_feedback(m, alpha, omega, k);

    const auto& v_json = config.at("V");
    if (!v_json.is_string()) throw ConfigError("controller config: V must be an expression string");
    expr::VariableSet vars = expr::VariableSet::state_time(dim);
    expr::ExprPtr body;
    try {
        body = expr::parse_expr(v_json.get<std::string>(), vars);
    } catch (const ParseError& e) {
        throw ConfigError(std::string("controller config: V: ") + e.what());
    }
    return EscController::state_feedback(m, alpha, omega, k, std::move(body), std::move(vars));
}

} // namespace escna::esc
