#include "escna/averaging.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "escna/oddpoly.hpp"

namespace escna::esc {

namespace {

constexpr int kSmallDim = 15;

// Shared gain path so a matched conjecture reduces bit for bit to the
// theorem-1 constant: the exponent special cases avoid pow() entirely when
// they are exactly 1 and 0.
double dominant_odd_gain(double k, double alpha, double omega, int n_o, int m, double A,
                         double& alpha_exp, double& omega_exp) {
    const double denom = std::pow(2.0, 4 * n_o + 1);
    if (n_o == m) {
        alpha_exp = 1.0;
        omega_exp = 0.0;
        return k * alpha * A / denom;
    }
    const double p = static_cast<double>(2 * n_o + 1) / static_cast<double>(2 * m + 1);
    alpha_exp = p;
    omega_exp = p - 1.0;
    return k * std::pow(alpha, p) * std::pow(omega, p - 1.0) * A / denom;
}

const std::vector<expr::ExprPtr>& channel_exprs(const std::vector<model::PolyChannel>& channels,
                                                int power_index) {
    for (const auto& ch : channels)
        if (ch.power_index == power_index) return ch.g;
    throw ConfigError("internal: missing channel with power index " + std::to_string(power_index));
}

// Gradient source: V in state feedback, the output map psi in output feedback.
const expr::ExprPtr& gradient_source(const model::NonAffineSystem& sys, const EscController& c) {
    if (c.output_mode()) {
        if (!sys.has_output())
            throw ConfigError("output-feedback average needs a system with an output map");
        return sys.output_map();
    }
    if (c.vars().size() != sys.vars().size())
        throw ConfigError("controller objective dimension does not match the system");
    return c.objective();
}

std::vector<expr::ExprPtr> gradient_exprs(const expr::ExprPtr& w, int dim) {
    std::vector<expr::ExprPtr> grad;
    grad.reserve(static_cast<std::size_t>(dim));
    for (int i = 1; i <= dim; ++i) grad.push_back(expr::diff_expr(*w, i));
    return grad;
}

std::vector<expr::ExprPtr> compose_field(const model::NonAffineSystem& sys,
                                         const std::vector<expr::ExprPtr>& g,
                                         const std::vector<expr::ExprPtr>& grad, double odd_gain,
                                         const std::vector<expr::ExprPtr>* g_even,
                                         double even_gain) {
    expr::ExprPtr descent = expr::mul(g[0], grad[0]);
    for (int j = 1; j < sys.dim(); ++j)
        descent = expr::add(descent, expr::mul(g[static_cast<std::size_t>(j)],
                                               grad[static_cast<std::size_t>(j)]));
    std::vector<expr::ExprPtr> field;
    field.reserve(static_cast<std::size_t>(sys.dim()));
    for (int i = 0; i < sys.dim(); ++i) {
        expr::ExprPtr fi = expr::add(
            sys.drift()[static_cast<std::size_t>(i)],
            expr::mul(expr::constant(-odd_gain),
                      expr::mul(g[static_cast<std::size_t>(i)], descent)));
        if (g_even)
            fi = expr::add(fi, expr::mul(expr::constant(even_gain),
                                         (*g_even)[static_cast<std::size_t>(i)]));
        field.push_back(std::move(fi));
    }
    return field;
}

} // namespace

void AveragedSystem::rhs(double t, std::span<const double> x, std::span<double> out) const {
    double small[kSmallDim + 1];
    std::vector<double> big;
    std::span<double> slots;
    if (dim <= kSmallDim) {
        slots = std::span<double>(small, static_cast<std::size_t>(dim) + 1);
    } else {
        big.resize(static_cast<std::size_t>(dim) + 1);
        slots = big;
    }
    slots[0] = t;
    for (int i = 0; i < dim; ++i) slots[static_cast<std::size_t>(i) + 1] = x[static_cast<std::size_t>(i)];
    for (int i = 0; i < dim; ++i)
        out[static_cast<std::size_t>(i)] = expr::eval_expr(*field[static_cast<std::size_t>(i)], slots);
}

AveragedSystem averaged_system_theorem1(const model::NonAffineSystem& sys,
                                        const EscController& c) {
    if (!sys.nonlinear_channels().empty())
        throw ConfigError("average construction requires polynomial control channels");
    if (sys.has_even_part())
        throw ConfigError("theorem-1 average requires a system with eps = 0");
    const int n_o = sys.max_odd_index();
    if (c.m() != n_o)
        throw ConfigError("controller power index m=" + std::to_string(c.m()) +
                          " does not match the dominant odd index " + std::to_string(n_o));
    const expr::ExprPtr& w = gradient_source(sys, c);
    const std::vector<expr::ExprPtr> grad = gradient_exprs(w, sys.dim());
    const std::vector<expr::ExprPtr>& g = channel_exprs(sys.odd_channels(), n_o);
    const double a_value = poly::avg_gain_A(n_o).to_double();

    AveragedSystem avg{AverageKind::Theorem1, sys.dim(), sys.vars(), {},
                       n_o,  a_value,  0.0,        0.0,
                       0.0,  std::nullopt, std::nullopt, 0.0};
    avg.odd_gain =
        dominant_odd_gain(c.k(), c.alpha(), c.omega(), n_o, c.m(), a_value,
                          avg.alpha_exponent, avg.omega_exponent);
    avg.field = compose_field(sys, g, grad, avg.odd_gain, nullptr, 0.0);
    return avg;
}

AveragedSystem averaged_system_conjecture(const model::NonAffineSystem& sys,
                                          const EscController& c) {
    if (!sys.nonlinear_channels().empty())
        throw ConfigError("average construction requires polynomial control channels");
    const int n_o = sys.max_odd_index();
    const expr::ExprPtr& w = gradient_source(sys, c);
    const std::vector<expr::ExprPtr> grad = gradient_exprs(w, sys.dim());
    const std::vector<expr::ExprPtr>& g = channel_exprs(sys.odd_channels(), n_o);
    const double a_value = poly::avg_gain_A(n_o).to_double();

    AveragedSystem avg{AverageKind::Conjecture1, sys.dim(), sys.vars(), {},
                       n_o,  a_value,  0.0,        0.0,
                       0.0,  std::nullopt, std::nullopt, 0.0};
    avg.odd_gain =
        dominant_odd_gain(c.k(), c.alpha(), c.omega(), n_o, c.m(), a_value,
                          avg.alpha_exponent, avg.omega_exponent);

    const std::vector<expr::ExprPtr>* g_even = nullptr;
    if (sys.has_even_part()) {
        const int n_e = sys.max_even_index();
        avg.even_index = n_e;
        avg.B_value = poly::even_gain_B(n_e).to_double();
        const double q = static_cast<double>(n_e) / static_cast<double>(2 * c.m() + 1);
        avg.even_gain = sys.eps() * *avg.B_value * std::pow(c.alpha() * c.omega(), q);
        g_even = &channel_exprs(sys.even_channels(), n_e);
    }
    avg.field = compose_field(sys, g, grad, avg.odd_gain, g_even, avg.even_gain);
    return avg;
}

double equilibrium_boundary_uu_residual(double k, int m, double eps, double omega,
                                        double x_star, double alpha) {
    const double a2 = poly::avg_gain_A(2).to_double();
    const double b2 = poly::even_gain_B(2).to_double();
    const double p = 5.0 / static_cast<double>(2 * m + 1);
    const double lhs =
        ((2.0 * k / 100.0) * (a2 / 512.0) * std::pow(alpha, p) * std::pow(omega, p - 1.0) - 1.0) *
        x_star;
    const double rhs = eps * b2 * std::pow(alpha * omega, 2.0 / static_cast<double>(2 * m + 1));
    return lhs - rhs;
}

double equilibrium_boundary_uu(double k, int m, double eps, double omega, double x_star) {
    if (!(k > 0.0)) throw ConfigError("boundary: k must be positive");
    if (!(omega > 0.0)) throw ConfigError("boundary: omega must be positive");
    if (!(x_star > 0.0)) throw ConfigError("boundary: x_star must be positive");
    if (eps < 0.0) throw ConfigError("boundary: eps must be nonnegative");
    if (m < 0 || m > 2) throw ConfigError("boundary: m must be 0, 1, or 2");

    const double lo_end = 1e-6;
    const double hi_end = 1e6;
    const int scan_points = 601;
    auto residual = [&](double alpha) {
        return equilibrium_boundary_uu_residual(k, m, eps, omega, x_star, alpha);
    };

    double lo = lo_end;
    double f_lo = residual(lo);
    if (f_lo == 0.0) return lo;
    double hi = 0.0;
    bool bracketed = false;
    for (int i = 1; i < scan_points; ++i) {
        const double a = lo_end * std::pow(hi_end / lo_end,
                                           static_cast<double>(i) / (scan_points - 1));
        const double f = residual(a);
        if (f == 0.0) return a;
        if ((f_lo < 0.0) != (f < 0.0)) {
            hi = a;
            bracketed = true;
            break;
        }
        lo = a;
        f_lo = f;
    }
    if (!bracketed)
        throw NumericError("boundary: no sign change of the equilibrium condition for alpha in [" +
                           std::to_string(lo_end) + ", " + std::to_string(hi_end) + "]");

    for (int iter = 0; iter < 200 && (hi - lo) > 1e-15 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double f = residual(mid);
        if (f == 0.0) return mid;
        if ((f < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double epsilon_bound_evenpow(double k, double alpha, double omega) {
    if (!(k > 0.0) || !(alpha > 0.0) || !(omega > 0.0))
        throw ConfigError("epsilon bound: k, alpha, and omega must be positive");
    const double a1 = poly::avg_gain_A(1).to_double();
    const double b2 = poly::even_gain_B(2).to_double();
    return (2.0 * k * 0.01 * a1 * alpha - 1.0) / (std::pow(alpha * omega, 2.0 / 3.0) * b2);
}

double epsilon_bound_m0(double alpha, double omega) {
    if (!(alpha > 0.0) || !(omega > 0.0))
        throw ConfigError("epsilon bound: alpha and omega must be positive");
    return 1.0 / std::sqrt(alpha * omega);
}

} // namespace escna::esc
