#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "escna/controller.hpp"
#include "escna/system.hpp"

namespace escna::esc {

enum class AverageKind { Theorem1, Conjecture1 };

// Closed-form average of the dithered closed loop, built symbolically from
// the system's dominant channels and the gradient of the controller objective
// (or of the output map in output-feedback mode). The field is an expression
// vector over (t, x1..xn), so it can be integrated, printed, and inspected
// like any other system.
struct AveragedSystem {
    AverageKind kind;
    int dim;
    expr::VariableSet vars;
    std::vector<expr::ExprPtr> field;

    // Record of the constants that went into the construction.
    int odd_index;          // dominant odd power index n_o
    double A_value;         // A_{n_o} = sum_l C(2n_o+1, l)^2
    double alpha_exponent;  // exponent of alpha in the odd gain
    double omega_exponent;  // exponent of omega in the odd gain
    double odd_gain;        // k * alpha^a * omega^b * A / 2^(4n_o+1), negated in the field
    std::optional<int> even_index;  // dominant even power index n_e, when present
    std::optional<double> B_value;  // B_{n_e} = C(2n_e, n_e) / 2^(2n_e)
    double even_gain = 0.0;         // eps * B * (alpha*omega)^(n_e/(2m+1))

    void rhs(double t, std::span<const double> x, std::span<double> out) const;
};

// Average per the matched construction: requires eps = 0 and a controller
// power index equal to the system's dominant odd index. Field:
//   f - k*alpha*A_m * (g_m g_m^T / 2^(4m+1)) * (grad W)^T
// with W = V in state feedback, W = psi in output feedback.
AveragedSystem averaged_system_theorem1(const model::NonAffineSystem& sys,
                                        const EscController& c);

// Average for a possibly mismatched controller and eps-scaled even channels.
// Keeps only the highest odd and highest even channel; with eps = 0 and a
// matched power index the construction folds to the same field as
// averaged_system_theorem1.
AveragedSystem averaged_system_conjecture(const model::NonAffineSystem& sys,
                                          const EscController& c);

// Smallest alpha > 0 solving the uu equilibrium condition
//   ((2k/100) * (A_2 / 2^9) * alpha^(5/(2m+1)) * omega^(5/(2m+1)-1) - 1) * x_star
//     = eps * B_2 * (alpha*omega)^(2/(2m+1)),
// by sign-change scan over [1e-6, 1e6] plus bisection. For alpha above the
// returned value the conjectured average settles at |x| <= |x_star|.
double equilibrium_boundary_uu(double k, int m, double eps, double omega, double x_star);

// Residual of the uu equilibrium condition at a given alpha (LHS - RHS).
double equilibrium_boundary_uu_residual(double k, int m, double eps, double omega,
                                        double x_star, double alpha);

// Stability bound on eps for the evenpow system under the m=1 controller,
// as printed: (2k*0.1^2*A_1*alpha - 1) / ((alpha*omega)^(2/3) * B_2).
double epsilon_bound_evenpow(double k, double alpha, double omega);

// Heuristic bound for the m=0 controller on evenpow: eps < 1/sqrt(alpha*omega).
double epsilon_bound_m0(double alpha, double omega);

} // namespace escna::esc
