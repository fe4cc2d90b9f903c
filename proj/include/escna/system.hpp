#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "escna/expr.hpp"
#include "escna/nonlinearity.hpp"

namespace escna::model {

inline constexpr double kDefaultBlowupCutoff = 1e6;

// One polynomial control channel: g(x,t) * u^(2n+1) for odd channels (n is
// power_index) or g(x,t) * u^(2i) for even channels (i is power_index).
struct PolyChannel {
    int power_index;
    std::vector<expr::ExprPtr> g; // one expression per state component
};

// A channel driven by a scalar nonlinearity instead of a monomial:
// g(x,t) * h(u). Used by the builtins whose input map is not polynomial.
struct NonlinearChannel {
    std::vector<expr::ExprPtr> g;
    ScalarNonlinearity h;
};

// dx/dt = f(x,t) + sum_n g_n(x,t) u^(2n+1) + eps * sum_i ge_i(x,t) u^(2i)
//         + sum_j gn_j(x,t) h_j(u)
// All expressions close over exactly {t, x1..xn}; u enters only through the
// channel powers and nonlinearities.
class NonAffineSystem {
public:
    NonAffineSystem(int dim, std::string name, std::vector<expr::ExprPtr> drift,
                    std::vector<PolyChannel> odd, std::vector<PolyChannel> even, double eps,
                    std::vector<NonlinearChannel> nonlinear,
                    std::optional<expr::ExprPtr> output,
                    double blowup_cutoff = kDefaultBlowupCutoff);

    int dim() const { return dim_; }
    const std::string& name() const { return name_; }
    const std::vector<expr::ExprPtr>& drift() const { return drift_; }
    const std::vector<PolyChannel>& odd_channels() const { return odd_; }
    const std::vector<PolyChannel>& even_channels() const { return even_; }
    const std::vector<NonlinearChannel>& nonlinear_channels() const { return nonlinear_; }
    double eps() const { return eps_; }
    bool has_even_part() const { return eps_ != 0.0 && !even_.empty(); }
    bool has_output() const { return output_.has_value(); }
    const expr::ExprPtr& output_map() const;
    double blowup_cutoff() const { return blowup_cutoff_; }
    const expr::VariableSet& vars() const { return vars_; }

    // Highest odd power index (the dominant channel); error if there are no
    // odd polynomial channels.
    int max_odd_index() const;
    bool has_odd_channels() const { return !odd_.empty(); }
    int max_even_index() const; // error if there are no even channels

    // Full right-hand side at (t, x, u). `out` must have dim() entries.
    void rhs(double t, std::span<const double> x, double u, std::span<double> out) const;
    // Drift alone (u-independent part).
    void drift_at(double t, std::span<const double> x, std::span<double> out) const;
    double output(double t, std::span<const double> x) const;

private:
    void eval_slots(double t, std::span<const double> x, std::span<double> slots) const;

    int dim_;
    std::string name_;
    std::vector<expr::ExprPtr> drift_;
    std::vector<PolyChannel> odd_;
    std::vector<PolyChannel> even_;
    double eps_;
    std::vector<NonlinearChannel> nonlinear_;
    std::optional<expr::ExprPtr> output_;
    double blowup_cutoff_;
    expr::VariableSet vars_;
};

// Loads a system from its JSON description. Schema:
//   {
//     "name": optional string,
//     "dim": positive integer,
//     "drift": [expr, ...]                       (dim entries),
//     "odd_channels": [{"power_index": n, "exprs": [expr, ...]}, ...],
//     "even_channels": {"strength": eps,
//                       "items": [{"power_index": i, "exprs": [...]}, ...]}  (optional),
//     "output": expr                             (optional),
//     "blowup_cutoff": number                    (optional, default 1e6)
//   }
// Violations (wrong types, dimension mismatches, duplicate powers, expression
// syntax errors) raise ConfigError.
NonAffineSystem load_system(const nlohmann::json& config);
NonAffineSystem load_system_from_string(const std::string& text);
NonAffineSystem load_system_from_file(const std::string& path);

// Built-in study systems; eps is a load-time parameter for uu, evenpow and
// nonlfinal and must be zero for the rest:
//   example1        dx = 0.5 cos(2t) x^2 + 2 cos(20t) h(u), deadzone-saturation h
//   example1_approx same drift, channel 2 cos(20t) (0.05 u + 0.25 u^3)
//   uu              dx = x + 0.1(u + u^3 + u^5) + eps (u^2 + u^4)
//   evenpow         dx = 0.1 u + 0.1 u^3 + eps u^4
//   nonlfinal       dx = x + h(u) + eps (u^2 + u^4)
NonAffineSystem builtin(std::string_view name, double eps = 0.0);

bool is_builtin(std::string_view name);
std::vector<std::string> builtin_names();

} // namespace escna::model
