#include "escna/avgverify.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include "escna/format.hpp"

#include "escna/error.hpp"
#include "escna/integrate.hpp"
#include "escna/oddpoly.hpp"

namespace escna::verify {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_omega_list(const std::vector<double>& omegas) {
    if (omegas.size() < 3)
        throw ConfigError("limit verification needs at least 3 omega values");
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        if (!(omegas[i] > 0.0))
            throw ConfigError("omega values must be positive");
        if (i > 0 && !(omegas[i] > omegas[i - 1]))
            throw ConfigError("omega values must be strictly increasing");
    }
}

void check_order(int m) {
    if (m < 0 || m > poly::kMaxExpansionOrder)
        throw ConfigError(
            escna::format("order m must lie in [0, {}], got {}", poly::kMaxExpansionOrder, m));
}

double binom(int n, int k) { return static_cast<double>(poly::binomial(n, k)); }

// Least-squares slope of log(y) against log(x). Discrepancies can underflow
// to zero when a limit is hit exactly; clamp so the log stays finite.
double fitted_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0;
    double my = 0.0;
    std::vector<double> lx(n);
    std::vector<double> ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        lx[i] = std::log(x[i]);
        ly[i] = std::log(std::max(y[i], 1e-300));
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
    }
    return num / den;
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

bool all_zero(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double d) { return d == 0.0; });
}

void check_alpha(double alpha) {
    if (!(alpha >= 0.0))
        throw ConfigError("dither strength alpha must be nonnegative");
}

// Test dictionary on [0, 1] and its exact integrals.
constexpr int kPhiCount = 5;
const double kPhiIntegrals[kPhiCount] = {1.0, 0.5, 1.0 / 3.0, 0.0, 0.0};

void eval_phis(double tau, double* out) {
    out[0] = 1.0;
    out[1] = tau;
    out[2] = tau * tau;
    out[3] = std::cos(kTwoPi * tau);
    out[4] = std::sin(kTwoPi * tau);
}

// Integrals over [0, 1] of p(tau) * phi_k(tau) for the whole dictionary in one
// Simpson sweep with `intervals` (even) subdivisions.
void simpson_against_dictionary(const std::function<double(double)>& p, std::size_t intervals,
                                double* out) {
    const std::size_t n = intervals + (intervals % 2);
    const double h = 1.0 / static_cast<double>(n);
    double acc[kPhiCount] = {};
    double phis[kPhiCount];
    for (std::size_t i = 0; i <= n; ++i) {
        const double tau = static_cast<double>(i) * h;
        const double w = (i == 0 || i == n) ? 1.0 : ((i % 2 == 1) ? 4.0 : 2.0);
        const double pv = w * p(tau);
        eval_phis(tau, phis);
        for (int k = 0; k < kPhiCount; ++k) acc[k] += pv * phis[k];
    }
    for (int k = 0; k < kPhiCount; ++k) out[k] = acc[k] * h / 3.0;
}

std::size_t intervals_for(double cycles, int nodes_per_period) {
    const double want = cycles * static_cast<double>(nodes_per_period);
    const auto n = static_cast<std::size_t>(std::ceil(want));
    return std::max<std::size_t>(n + (n % 2), static_cast<std::size_t>(nodes_per_period));
}

} // namespace

std::vector<double> empirical_average_field(const model::NonAffineSystem& sys,
                                            const esc::EscController& c,
                                            std::span<const double> x, double t, int periods,
                                            int steps_per_period) {
    if (periods < 1) throw ConfigError("empirical average needs at least one dither period");
    const double window = static_cast<double>(periods) * c.period();
    const sim::Trajectory traj = sim::integrate_closed_loop(sys, c, x, t, window, steps_per_period);
    if (traj.blew_up)
        throw NumericError(escna::format(
            "closed loop blew up before t = {} while estimating the average field", t + window));
    const auto xe = traj.state_at(traj.size() - 1);
    std::vector<double> rate(sys.dim());
    for (int j = 0; j < sys.dim(); ++j) rate[j] = (xe[j] - x[j]) / window;
    return rate;
}

LimitReport verify_uniform_limits(int m, std::vector<double> omegas, double alpha,
                                  int nodes_per_period) {
    check_order(m);
    check_omega_list(omegas);
    check_alpha(alpha);
    if (nodes_per_period < defaults::kMinNodesPerPeriod)
        throw NumericError(escna::format("quadrature below {} nodes per period aliases the dither",
                                       defaults::kMinNodesPerPeriod));

    const int bm = 2 * m + 1;
    LimitReport report;
    report.omegas = omegas;

    for (int n = 0; n <= m; ++n) {
        const int bn = 2 * n + 1;
        const double growth = static_cast<double>(bn) / (2.0 * bm); // exponent of (alpha omega)
        const double expected_order = growth - 1.0;
        for (int l = 0; l <= n; ++l) {
            const int b = bn - 2 * l; // component frequency multiple, odd and positive
            const double coeff = binom(bn, l) / std::pow(2.0, 2 * n);
            for (int phase = 0; phase < 2; ++phase) {
                const bool cosine = phase == 0;
                LimitItem item;
                item.name = escna::format("max|H_{}| n={} l={}", cosine ? 'c' : 's', n, l);
                item.claimed_limit = 0.0;
                item.required_order = expected_order + 0.1;
                for (double omega : omegas) {
                    const double amp = std::pow(alpha * omega, growth) * coeff;
                    const double cycles = b * omega / kTwoPi;
                    const auto steps = intervals_for(cycles, nodes_per_period);
                    // Cumulative trapezoid of h over [0, 1]; track the running
                    // max of |H|. The trapezoid bias is a fixed relative
                    // amount at fixed nodes-per-cycle, so it cannot disturb
                    // the decay order.
                    const double h = 1.0 / static_cast<double>(steps);
                    double H = 0.0;
                    double maxH = 0.0;
                    double prev = cosine ? amp : 0.0; // h(0)
                    for (std::size_t i = 1; i <= steps; ++i) {
                        const double arg = b * omega * static_cast<double>(i) * h;
                        const double cur = amp * (cosine ? std::cos(arg) : std::sin(arg));
                        H += 0.5 * (prev + cur) * h;
                        prev = cur;
                        maxH = std::max(maxH, std::abs(H));
                    }
                    item.discrepancy.push_back(maxH);
                }
                if (all_zero(item.discrepancy)) {
                    // Zero dither (alpha = 0): the limit is attained exactly.
                    item.fitted_order = 0.0;
                    item.pass = true;
                } else {
                    item.fitted_order = fitted_log_slope(omegas, item.discrepancy);
                    item.pass = strictly_decreasing(item.discrepancy) &&
                                item.fitted_order <= item.required_order;
                }
                report.items.push_back(std::move(item));
            }
        }
    }

    report.all_pass =
        std::all_of(report.items.begin(), report.items.end(), [](const LimitItem& it) { return it.pass; });
    return report;
}

LimitReport verify_weak_limits(int m, int l, std::vector<double> omegas, double alpha,
                               int nodes_per_period) {
    check_order(m);
    if (l < 0 || l > m) throw ConfigError(escna::format("index l must lie in [0, {}], got {}", m, l));
    check_omega_list(omegas);
    check_alpha(alpha);
    if (nodes_per_period < defaults::kMinNodesPerPeriod)
        throw NumericError(escna::format("quadrature below {} nodes per period aliases the dither",
                                       defaults::kMinNodesPerPeriod));

    const int bm = 2 * m + 1;
    const double scale = 1.0 / std::pow(2.0, 2 * m); // common 1/2^(2m) of the components
    LimitReport report;
    report.omegas = omegas;

    // One product: component i of h against the antiderivative of component j.
    // s_first selects h_s * H_c (claimed limit +a/b at i == j), otherwise
    // h_c * H_s (claimed limit -a/b at i == j). Cross frequencies average out.
    const auto add_item = [&](int i, int j, bool s_first) {
        const int bi = bm - 2 * i;
        const int bj = bm - 2 * j;
        LimitItem item;
        item.name = escna::format("h_{}[l={}] * H_{}[l={}]", s_first ? 's' : 'c', i,
                                s_first ? 'c' : 's', j);
        if (i == j) {
            const double a = poly::weak_limit_coeff(m, i, alpha);
            item.claimed_limit = (s_first ? 1.0 : -1.0) * a / bi;
        } else {
            item.claimed_limit = 0.0;
        }
        item.required_order = 0.0;
        const double ci = binom(bm, i) * scale;
        const double cj = binom(bm, j) * scale;
        for (double omega : omegas) {
            // Amplitudes carry (alpha omega)^(1/2) each; H contributes 1/(bj omega).
            const double front = alpha * ci * cj / bj;
            const auto steps = intervals_for((bi + bj) * omega / kTwoPi, nodes_per_period);
            const auto p = [&](double tau) {
                const double hi = s_first ? std::sin(bi * omega * tau) : std::cos(bi * omega * tau);
                const double Hj =
                    s_first ? std::sin(bj * omega * tau) : (1.0 - std::cos(bj * omega * tau));
                return front * hi * Hj;
            };
            double ints[kPhiCount];
            simpson_against_dictionary(p, steps, ints);
            double worst = 0.0;
            for (int k = 0; k < kPhiCount; ++k)
                worst = std::max(worst, std::abs(ints[k] - item.claimed_limit * kPhiIntegrals[k]));
            item.discrepancy.push_back(worst);
        }
        if (all_zero(item.discrepancy)) {
            item.fitted_order = 0.0;
            item.pass = true;
        } else {
            item.fitted_order = fitted_log_slope(omegas, item.discrepancy);
            item.pass = item.fitted_order < item.required_order &&
                        item.discrepancy.back() < item.discrepancy.front();
        }
        report.items.push_back(std::move(item));
    };

    add_item(l, l, true);
    add_item(l, l, false);
    for (int j = 0; j <= m; ++j) {
        if (j == l) continue;
        add_item(l, j, true);
        add_item(l, j, false);
    }

    report.all_pass =
        std::all_of(report.items.begin(), report.items.end(), [](const LimitItem& it) { return it.pass; });
    return report;
}

double simpson01(const std::function<double(double)>& f, std::size_t intervals) {
    if (intervals == 0) throw ConfigError("simpson01 needs at least one interval");
    const std::size_t n = intervals + (intervals % 2);
    const double h = 1.0 / static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 1.0 : ((i % 2 == 1) ? 4.0 : 2.0);
        acc += w * f(static_cast<double>(i) * h);
    }
    return acc * h / 3.0;
}

nlohmann::ordered_json LimitReport::to_json() const {
    nlohmann::ordered_json j;
    j["omegas"] = omegas;
    j["items"] = nlohmann::ordered_json::array();
    for (const LimitItem& it : items) {
        nlohmann::ordered_json ji;
        ji["name"] = it.name;
        ji["claimed_limit"] = it.claimed_limit;
        ji["required_order"] = it.required_order;
        ji["discrepancy"] = it.discrepancy;
        ji["fitted_order"] = it.fitted_order;
        ji["pass"] = it.pass;
        j["items"].push_back(std::move(ji));
    }
    j["all_pass"] = all_pass;
    return j;
}

} // namespace escna::verify
