#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "escna/controller.hpp"
#include "escna/defaults.hpp"
#include "escna/system.hpp"

namespace escna::verify {

// Mean displacement rate of the closed loop over `periods` dither periods,
// started at (t, x): (x(t + P*2pi/omega) - x) / (P*2pi/omega). This is the
// independent numerical oracle against which the closed-form averages are
// checked. Throws NumericError if the loop blows up inside the window.
std::vector<double> empirical_average_field(
    const model::NonAffineSystem& sys, const esc::EscController& c, std::span<const double> x,
    double t, int periods, int steps_per_period = defaults::kEmpiricalStepsPerPeriod);

// One verified limit: a dither component (uniform case) or a product of a
// dither component with an integrated one (weak case). `discrepancy` holds
// the distance from the claimed limit at each omega, `fitted_order` the
// least-squares slope of log(discrepancy) against log(omega).
struct LimitItem {
    std::string name;
    double claimed_limit = 0.0;
    double required_order = 0.0; // fitted_order must come in at or below this
    std::vector<double> discrepancy;
    double fitted_order = 0.0;
    bool pass = false;
};

struct LimitReport {
    std::vector<double> omegas;
    std::vector<LimitItem> items;
    bool all_pass = false;

    nlohmann::ordered_json to_json() const;
};

// Uniform limits of the dither antiderivatives: for every component
// h_{c/s,n,l,omega} with amplitude (alpha*omega)^(b_n/(2 b_m)) C(b_n,l)/2^(2n)
// and frequency (2n+1-2l)*omega, computes max over [0,1] of |H| by cumulative
// quadrature. Passes when the max decreases along the omega list and the
// fitted order is at most b_n/(2 b_m) - 1 plus 0.1 slack.
LimitReport verify_uniform_limits(int m, std::vector<double> omegas, double alpha,
                                  int nodes_per_period = defaults::kNodesPerPeriod);

// Weak limits of the dominant-channel products against the test dictionary
// {1, tau, tau^2, cos 2pi tau, sin 2pi tau} on [0,1]. For the index l this
// covers h_s H_c (limit +a_{m,l}/b_{m,l}), h_c H_s (limit -a_{m,l}/b_{m,l}),
// and the cross-frequency products against every other index (limit 0).
// The per-omega discrepancy is the worst case over the dictionary.
// Quadrature is composite Simpson with nodes_per_period nodes per period of
// the fastest oscillation in the product; below 50 the call is refused.
LimitReport verify_weak_limits(int m, int l, std::vector<double> omegas, double alpha,
                               int nodes_per_period = defaults::kNodesPerPeriod);

// Composite Simpson of f over [0,1]; `intervals` is rounded up to even.
double simpson01(const std::function<double(double)>& f, std::size_t intervals);

} // namespace escna::verify
