// End-to-end acceptance gate. Each check exercises one externally stated
// requirement of the toolkit and prints a single PASS or FAIL line with the
// numbers that matter; the binary exits nonzero if any check fails. The
// checks are deliberately independent of the unit suites: expected values
// are restated here from closed forms rather than imported from the library
// internals wherever that is possible.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include "escna/format.hpp"
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "escna/averaging.hpp"
#include "escna/avgverify.hpp"
#include "escna/controller.hpp"
#include "escna/integrate.hpp"
#include "escna/manifest.hpp"
#include "escna/nonlinearity.hpp"
#include "escna/oddpoly.hpp"
#include "escna/rational.hpp"
#include "escna/sweep.hpp"
#include "escna/system.hpp"

namespace {

using escna::poly::Rational;

struct Check {
    std::vector<std::string> failures;
    std::string detail;

    void require(bool ok, std::string what) {
        if (!ok) failures.push_back(std::move(what));
    }
    void note(const std::string& text) {
        if (!detail.empty()) detail += ", ";
        detail += text;
    }
};

// Results carried between checks so the reproducibility check can compare
// against the first pass without redoing the expensive sweeps.
struct {
    std::string loop_csv_hash;
    std::vector<double> boundary_roots;
    std::string uu_hash_jobs1;
    std::string uu_hash_jobs3;
} carried;

escna::esc::EscController make_controller(int m, double alpha, double omega, double k,
                                          int dim = 1) {
    const nlohmann::json cfg{{"m", m}, {"alpha", alpha}, {"omega", omega}, {"k", k},
                             {"V", "x1^2"}};
    return escna::esc::controller_from_json(cfg, dim);
}

double field_at(const escna::esc::AveragedSystem& avg, double t, double x) {
    double out[1];
    const double xs[1]{x};
    avg.rhs(t, std::span<const double>(xs, 1), std::span<double>(out, 1));
    return out[0];
}

// Boundary roots for a fixed spread of gains, orders, even strengths and
// frequencies; shared between the residual check and the bitwise rerun.
std::vector<double> boundary_root_sample() {
    std::vector<double> roots;
    for (double k : {20.0, 100.0})
        for (int m : {0, 1, 2})
            for (double eps : {0.0, 0.02, 0.3})
                for (double omega : {15.0, 100.0, 800.0})
                    roots.push_back(escna::esc::equilibrium_boundary_uu(k, m, eps, omega, 0.25));
    return roots;
}

// --- 1: the worked scalar loop converges and tracks its average -------------

void criterion1(Check& c) {
    namespace sim = escna::sim;
    const escna::model::NonAffineSystem sys = escna::model::builtin("example1");
    const escna::esc::EscController ctrl = make_controller(1, 64.0 / 200.0, 200.0, 50.0);
    const std::vector<double> x0{1.5};
    const sim::Trajectory traj = sim::integrate_closed_loop(sys, ctrl, x0, 0.0, 10.0, 50);
    c.require(!traj.blew_up, "closed loop blew up");
    const double x10 = std::abs(traj.states.back());
    c.require(x10 < 0.75, escna::format("|x(10)| = {:.4f}, needs to halve from 1.5", x10));

    sim::write_trajectory_csv(traj, "acceptance_loop.csv");
    carried.loop_csv_hash = escna::cli::fnv1a64_file("acceptance_loop.csv");

    // The gap to the averaged model should shrink as the dither speeds up
    // (alpha*omega held fixed); 10% slack per step absorbs the plateau from
    // the polynomial approximation of the deadzone. Known caveat: during the
    // fast transient the controller phase rate k*dV/dt is a few hundred rad/s
    // with these parameters, so the effective dither frequency omega + k*dV/dt
    // dips toward zero near omega = 400 (an intermittent stall), and the
    // measured gap peaks there (0.27 / 0.63 / 0.28, confirmed against an
    // adaptive reference integrator and invariant from 50 to 3200 steps per
    // period). The check is kept at face value rather than tuned around the
    // resonance, so this step is a documented failure at doubling spacing;
    // monotonicity does hold at 4x spacing, e.g. {200, 800, 3200}.
    const escna::model::NonAffineSystem approx = escna::model::builtin("example1_approx");
    std::vector<double> gaps;
    for (double omega : {200.0, 400.0, 800.0}) {
        const escna::esc::EscController ci = make_controller(1, 64.0 / omega, omega, 50.0);
        const sim::Trajectory tru = sim::integrate_closed_loop(sys, ci, x0, 0.0, 10.0, 50);
        const escna::esc::AveragedSystem avg = escna::esc::averaged_system_theorem1(approx, ci);
        const sim::Trajectory bar = sim::integrate_averaged(avg, x0, 0.0, 10.0, 5000);
        gaps.push_back(sim::compare(tru, bar).sup_error);
    }
    for (std::size_t i = 0; i + 1 < gaps.size(); ++i)
        c.require(gaps[i + 1] <= 1.10 * gaps[i],
                  escna::format("gap grew: {:.5f} -> {:.5f}", gaps[i], gaps[i + 1]));
    c.note(escna::format("|x(10)|={:.4f}", x10));
    c.note(escna::format("gaps {:.4f}/{:.4f}/{:.4f}", gaps[0], gaps[1], gaps[2]));
}

// --- 2: averaging error shrinks with dither frequency -----------------------

void criterion2(Check& c) {
    std::mt19937 rng(20260817u);
    std::uniform_real_distribution<double> coeff(-0.6, 0.6);
    std::uniform_real_distribution<double> point(0.3, 1.5);
    std::uniform_real_distribution<double> tdist(0.0, 1.0);
    std::uniform_int_distribution<int> order(0, 2);

    const std::array<double, 3> omegas{1e3, 4e3, 1.6e4};
    std::array<double, 3> mean_err{};
    int samples = 0;

    for (int s = 0; s < 20; ++s) {
        const int m = order(rng);
        char drift[128], gain[128];
        std::snprintf(drift, sizeof drift, "%.6f + %.6f*x1 + %.6f*x1^2", coeff(rng), coeff(rng),
                      coeff(rng));
        std::snprintf(gain, sizeof gain, "%.6f + %.6f*x1 + %.6f*x1^2", coeff(rng), coeff(rng),
                      coeff(rng));
        nlohmann::json def;
        def["name"] = escna::format("random{}", s);
        def["dim"] = 1;
        def["drift"] = {drift};
        def["odd_channels"] = {{{"power_index", m}, {"exprs", {gain}}}};
        const escna::model::NonAffineSystem sys = escna::model::load_system(def);

        std::vector<std::array<double, 2>> pts;
        for (int p = 0; p < 5; ++p) pts.push_back({point(rng), tdist(rng)});

        for (std::size_t w = 0; w < omegas.size(); ++w) {
            const escna::esc::EscController ctrl = make_controller(m, 1.0, omegas[w], 1.0);
            const escna::esc::AveragedSystem avg =
                escna::esc::averaged_system_theorem1(sys, ctrl);
            for (const auto& [x, t0] : pts) {
                const double xs[1]{x};
                const std::vector<double> emp = escna::verify::empirical_average_field(
                    sys, ctrl, std::span<const double>(xs, 1), t0, 10);
                mean_err[w] += std::abs(emp[0] - field_at(avg, t0, x));
                if (w == 0) ++samples;
            }
        }
    }
    for (double& e : mean_err) e /= samples;

    const double r1 = mean_err[0] / mean_err[1];
    const double r2 = mean_err[1] / mean_err[2];
    c.require(r1 >= 1.3, escna::format("error ratio 1e3/4e3 = {:.2f} below 1.3", r1));
    c.require(r2 >= 1.3, escna::format("error ratio 4e3/1.6e4 = {:.2f} below 1.3", r2));
    c.note(escna::format("mean errors {:.2e}/{:.2e}/{:.2e}", mean_err[0], mean_err[1],
                       mean_err[2]));
    c.note(escna::format("ratios {:.2f}, {:.2f}", r1, r2));
}

// --- 3: combinatorial constants and trig expansions are exact ---------------

void criterion3(Check& c) {
    const long long a_expect[4]{1, 10, 126, 1716};
    for (int m = 0; m <= 3; ++m)
        c.require(escna::poly::avg_gain_A(m) == Rational(a_expect[m]),
                  escna::format("A value wrong at m={}", m));
    const Rational b_expect[4]{Rational(1), Rational(1, 2), Rational(3, 8), Rational(5, 16)};
    for (int n = 0; n <= 3; ++n)
        c.require(escna::poly::even_gain_B(n) == b_expect[n],
                  escna::format("B value wrong at n={}", n));

    // cos^(2n+1) as a cosine sum, checked pointwise at full double precision.
    std::mt19937 rng(321u);
    std::uniform_real_distribution<double> angle(-10.0, 10.0);
    int bad = 0;
    double worst = 0.0;
    for (int n = 0; n <= 6; ++n) {
        const escna::poly::CosineExpansion ex = escna::poly::trig_power_expand(n);
        for (int i = 0; i < 1000; ++i) {
            const double th = angle(rng);
            const double err = std::abs(ex.eval(th) - std::pow(std::cos(th), 2 * n + 1));
            worst = std::max(worst, err);
            if (err > 1e-12) ++bad;
        }
    }
    c.require(bad == 0, escna::format("{} expansion samples off by more than 1e-12 (worst {:.2e})",
                                    bad, worst));

    // The per-harmonic weak limits must add back up to the decay constant:
    // sum_l a_{m,l} * 2^(4m+1) = A_m, exactly, for every order we expose.
    for (int m = 0; m <= 6; ++m) {
        Rational sum(0);
        for (int l = 0; l <= m; ++l) sum = sum + escna::poly::weak_limit_coeff_exact(m, l);
        const Rational scaled = sum * Rational(static_cast<__int128>(1) << (4 * m + 1), 1);
        c.require(scaled == escna::poly::avg_gain_A(m),
                  escna::format("harmonic sum disagrees with A at m={}", m));
    }
    c.note(escna::format("worst expansion error {:.2e}", worst));
}

// --- 4: dither limits verified numerically ----------------------------------

void criterion4(Check& c) {
    const std::vector<double> omegas{200.0, 400.0, 800.0, 1600.0};
    for (int m = 0; m <= 2; ++m) {
        const escna::verify::LimitReport u =
            escna::verify::verify_uniform_limits(m, omegas, 1.0, 200);
        c.require(u.all_pass, escna::format("uniform limit failed at m={}", m));
        for (int l = 0; l <= m; ++l) {
            const escna::verify::LimitReport w =
                escna::verify::verify_weak_limits(m, l, omegas, 1.0, 200);
            c.require(w.all_pass, escna::format("weak limit failed at m={} l={}", m, l));
        }
    }

    const double quad = escna::verify::simpson01(
        [](double t) {
            const double v = std::cos(100.0 * t);
            return v * v;
        },
        130000);
    const double closed = 0.5 + std::sin(200.0) / 400.0;
    c.require(std::abs(quad - closed) <= 1e-10,
              escna::format("cos^2 average off by {:.2e}", std::abs(quad - closed)));
    c.note(escna::format("cos^2 average error {:.1e}", std::abs(quad - closed)));
}

// --- 5: deadzone fits drive the closed loop ---------------------------------

void criterion5(Check& c) {
    namespace poly = escna::poly;
    std::vector<poly::FitResult> fits;
    for (int m = 1; m <= 4; ++m)
        fits.push_back(poly::fit_odd_polynomial(escna::model::deadzone_saturation, m, 2.0, 401));

    for (std::size_t i = 0; i + 1 < fits.size(); ++i)
        c.require(fits[i + 1].sup_error <= fits[i].sup_error + 1e-12,
                  escna::format("sup error grew from order {} to {}", i + 1, i + 2));
    for (const poly::FitResult& f : fits)
        for (double u : {0.3, 0.7, 1.9})
            c.require(f.poly.eval(-u) == -f.poly.eval(u), "fitted polynomial is not exactly odd");

    const double a1 = fits[0].poly.coeffs[0];
    const double a3 = fits[0].poly.coeffs[1];
    const double rel = std::hypot(a1 - 0.05, a3 - 0.25) / std::hypot(0.05, 0.25);
    c.require(rel <= 0.5,
              escna::format("cubic fit ({:.4f}, {:.4f}) strays {:.0f}% from (0.05, 0.25)", a1, a3,
                          100.0 * rel));

    // Substitute the freshly fitted cubic for the reference coefficients and
    // rerun the worked loop; it must still halve the initial error.
    char def[512];
    std::snprintf(def, sizeof def,
                  "{\"name\":\"example1_refit\",\"dim\":1,"
                  "\"drift\":[\"0.5*cos(2*t)*x1^2\"],"
                  "\"odd_channels\":[{\"power_index\":0,\"exprs\":[\"%.17g*cos(20*t)\"]},"
                  "{\"power_index\":1,\"exprs\":[\"%.17g*cos(20*t)\"]}]}",
                  2.0 * a1, 2.0 * a3);
    const escna::model::NonAffineSystem refit = escna::model::load_system_from_string(def);
    const escna::esc::EscController ctrl = make_controller(1, 0.32, 200.0, 50.0);
    const std::vector<double> x0{1.5};
    const escna::sim::Trajectory traj =
        escna::sim::integrate_closed_loop(refit, ctrl, x0, 0.0, 10.0, 50);
    const double x10 = std::abs(traj.states.back());
    c.require(!traj.blew_up && x10 < 0.75,
              escna::format("refit loop ended at |x(10)| = {:.4f}", x10));
    c.note(escna::format("a1={:.4f} a3={:.4f} rel={:.3f} refit |x(10)|={:.4f}", a1, a3, rel, x10));
}

// --- 6: analytic stability boundaries ---------------------------------------

void criterion6(Check& c) {
    namespace esc = escna::esc;
    const double canonical = esc::equilibrium_boundary_uu(100.0, 2, 0.0, 100.0, 0.25);
    c.require(std::abs(canonical - 512.0 / 252.0) <= 1e-12,
              escna::format("matched-order root {:.15f} != 512/252", canonical));
    const double elsewhere = esc::equilibrium_boundary_uu(100.0, 2, 0.0, 9000.0, 1.7);
    c.require(std::abs(elsewhere - canonical) <= 1e-12,
              "eps=0 matched-order root must not depend on omega or x*");

    const double eps1 = esc::epsilon_bound_evenpow(100.0, 10.0, 100.0);
    c.require(std::abs(eps1 - 199.0 / 37.5) <= 1e-12,
              escna::format("even-strength bound {:.15f} != 199/37.5", eps1));

    // Every returned root must satisfy the equilibrium condition, restated
    // here from scratch with A_2 = 126 and B_2 = 3/8.
    carried.boundary_roots = boundary_root_sample();
    double worst = 0.0;
    std::size_t idx = 0;
    for (double k : {20.0, 100.0})
        for (int m : {0, 1, 2})
            for (double eps : {0.0, 0.02, 0.3})
                for (double omega : {15.0, 100.0, 800.0}) {
                    const double alpha = carried.boundary_roots[idx++];
                    const double p = 5.0 / (2 * m + 1);
                    const double lhs = ((2.0 * k / 100.0) * (126.0 / 512.0) *
                                            std::pow(alpha, p) * std::pow(omega, p - 1.0) -
                                        1.0) *
                                       0.25;
                    const double rhs = eps * 0.375 * std::pow(alpha * omega, 2.0 / (2 * m + 1));
                    worst = std::max(worst, std::abs(lhs - rhs));
                }
    c.require(worst < 1e-10, escna::format("worst equilibrium residual {:.2e}", worst));
    c.note(escna::format("root={:.12f}", canonical));
    c.note(escna::format("worst residual {:.1e} over {} combos", worst,
                       carried.boundary_roots.size()));
}

// --- 7: stability maps match the predicted boundary -------------------------

void criterion7(Check& c) {
    namespace sweep = escna::sweep;

    sweep::SweepSpec spec;
    spec.builtin = "uu";
    spec.m = 2;
    spec.k = 100.0;
    spec.eps = 0.05;
    spec.axis1 = sweep::Axis{"alpha", 0.1, 2.0, 40, false};
    spec.axis2 = sweep::Axis{"omega", 5.0, 200.0, 40, false};
    spec.x_star = 0.25;
    spec.jobs = 1;
    const sweep::StabilityGrid g1 = sweep::run_sweep(spec);
    sweep::write_grid_csv(g1, "acceptance_uu_jobs1.csv");
    spec.jobs = 3;
    const sweep::StabilityGrid g3 = sweep::run_sweep(spec);
    sweep::write_grid_csv(g3, "acceptance_uu_jobs3.csv");
    carried.uu_hash_jobs1 = escna::cli::fnv1a64_file("acceptance_uu_jobs1.csv");
    carried.uu_hash_jobs3 = escna::cli::fnv1a64_file("acceptance_uu_jobs3.csv");

    // Agreement with the analytic boundary, scored on the half of the grid
    // with the larger dither products where the averaged picture applies.
    std::vector<double> products;
    products.reserve(g1.cells.size());
    for (const sweep::Cell& cell : g1.cells) products.push_back(cell.a1 * cell.a2);
    std::nth_element(products.begin(), products.begin() + products.size() / 2, products.end());
    const double median = products[products.size() / 2];
    const double agreement = sweep::boundary_agreement(g1, 0.2, median);
    c.require(agreement >= 0.8, escna::format("boundary agreement {:.3f} below 0.8", agreement));
    c.note(escna::format("agreement={:.3f}", agreement));

    // The loop with the raw saturating nonlinearity has a bounded frequency
    // window: the middle dither-strength row must converge somewhere and
    // lose convergence again at higher frequency.
    sweep::SweepSpec nf;
    nf.builtin = "nonlfinal";
    nf.m = 0;
    nf.k = 100.0;
    nf.axis1 = sweep::Axis{"alpha", 3.0, 7.0, 3, false};
    nf.axis2 = sweep::Axis{"omega", 5.0, 4000.0, 40, true};
    nf.x_star = 0.25;
    nf.jobs = 3;
    const sweep::StabilityGrid gn = sweep::run_sweep(nf);
    int first_conv = -1;
    int later_nonconv = -1;
    for (int j = 0; j < nf.axis2.count; ++j) {
        const sweep::Cell& cell = gn.cells[1 * nf.axis2.count + j];
        if (first_conv < 0 && cell.label == sweep::Label::Convergent) first_conv = j;
        if (first_conv >= 0 && j > first_conv && cell.label != sweep::Label::Convergent)
            later_nonconv = j;
    }
    c.require(first_conv >= 0, "no convergent frequency on the alpha=5 row");
    c.require(later_nonconv >= 0, "convergence never lost at higher frequency on alpha=5 row");
    if (first_conv >= 0 && later_nonconv >= 0)
        c.note(escna::format("window opens at omega={:.1f}, closed by omega={:.1f}",
                           nf.axis2.value_at(first_conv), nf.axis2.value_at(later_nonconv)));
}

// --- 8: the averaged decay constant survives the empirical cross-check ------

void criterion8(Check& c) {
    const escna::model::NonAffineSystem approx = escna::model::builtin("example1_approx");
    const escna::esc::EscController ctrl = make_controller(1, 0.32, 200.0, 50.0);
    const escna::esc::AveragedSystem avg = escna::esc::averaged_system_theorem1(approx, ctrl);
    const double pinned = field_at(avg, 0.0, 1.0);
    c.require(std::abs(pinned - (-2.0)) <= 1e-12,
              escna::format("averaged field at the reference point drifted to {:.15f}", pinned));

    // Two candidate decay constants differ by a factor of two; at the
    // reference point they predict -2.0 and -4.5. The per-period mean drift
    // of the real loop decides between them, up to a finite-frequency
    // residue of order omega^-1/2 that must also shrink as the dither
    // speeds up.
    const double xs[1]{1.0};
    const escna::esc::EscController fast = make_controller(1, 0.32, 1e6, 50.0);
    const std::vector<double> emp = escna::verify::empirical_average_field(
        approx, fast, std::span<const double>(xs, 1), 0.0, 10);
    c.require(std::abs(emp[0] - (-2.0)) < 0.15,
              escna::format("empirical rate {:.4f} not near -2.0", emp[0]));
    c.require(std::abs(emp[0] - (-4.5)) > 2.0,
              escna::format("empirical rate {:.4f} fails to reject the doubled constant", emp[0]));
    const escna::esc::EscController slower = make_controller(1, 0.32, 1e4, 50.0);
    const std::vector<double> emp_slow = escna::verify::empirical_average_field(
        approx, slower, std::span<const double>(xs, 1), 0.0, 10);
    c.require(std::abs(emp[0] - (-2.0)) < std::abs(emp_slow[0] - (-2.0)),
              "empirical rate does not refine toward -2.0 as omega grows");

    // Sanity: the original saturating loop decays at a comparable rate.
    const escna::model::NonAffineSystem raw = escna::model::builtin("example1");
    const std::vector<double> raw_rate = escna::verify::empirical_average_field(
        raw, ctrl, std::span<const double>(xs, 1), 0.0, 10);
    c.require(raw_rate[0] > -3.0 && raw_rate[0] < -0.8,
              escna::format("saturating-loop rate {:.4f} outside (-3, -0.8)", raw_rate[0]));
    c.note(escna::format("empirical {:.4f} vs candidates -2.0 / -4.5; raw loop {:.4f}", emp[0],
                       raw_rate[0]));
}

// --- 9: outputs are byte reproducible ---------------------------------------

void criterion9(Check& c) {
    const escna::model::NonAffineSystem sys = escna::model::builtin("example1");
    const escna::esc::EscController ctrl = make_controller(1, 64.0 / 200.0, 200.0, 50.0);
    const std::vector<double> x0{1.5};
    const escna::sim::Trajectory traj =
        escna::sim::integrate_closed_loop(sys, ctrl, x0, 0.0, 10.0, 50);
    escna::sim::write_trajectory_csv(traj, "acceptance_loop_rerun.csv");
    c.require(!carried.loop_csv_hash.empty() &&
                  escna::cli::fnv1a64_file("acceptance_loop_rerun.csv") == carried.loop_csv_hash,
              "closed-loop CSV differs between identical runs");

    const std::vector<double> roots = boundary_root_sample();
    c.require(roots == carried.boundary_roots, "boundary roots differ between identical runs");

    c.require(!carried.uu_hash_jobs1.empty() && carried.uu_hash_jobs1 == carried.uu_hash_jobs3,
              "stability grid differs across worker counts");
    c.note(escna::format("loop csv {}", carried.loop_csv_hash));
    c.note(escna::format("grid csv {}", carried.uu_hash_jobs1));
}

struct Entry {
    const char* name;
    void (*fn)(Check&);
    double budget_s; // 0 means untimed
};

} // namespace

int main() {
    const Entry entries[]{
        {"criterion-1 worked loop converges and tracks its average", criterion1, 5.0},
        {"criterion-2 averaging error shrinks with dither frequency", criterion2, 60.0},
        {"criterion-3 combinatorial constants and expansions are exact", criterion3, 0.0},
        {"criterion-4 dither limits verified numerically", criterion4, 30.0},
        {"criterion-5 deadzone fits drive the closed loop", criterion5, 0.0},
        {"criterion-6 analytic stability boundaries hold", criterion6, 0.0},
        {"criterion-7 stability maps match the predicted boundary", criterion7, 600.0},
        {"criterion-8 averaged decay constant adjudicated empirically", criterion8, 0.0},
        {"criterion-9 outputs are byte reproducible", criterion9, 0.0},
    };

    int failed = 0;
    for (const Entry& e : entries) {
        Check check;
        const auto start = std::chrono::steady_clock::now();
        try {
            e.fn(check);
        } catch (const std::exception& ex) {
            check.failures.push_back(escna::format("threw: {}", ex.what()));
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (e.budget_s > 0.0 && secs > e.budget_s)
            check.failures.push_back(
                escna::format("took {:.1f} s, budget {:.0f} s", secs, e.budget_s));

        if (check.failures.empty()) {
            std::printf("[PASS] %s (%.2f s)%s%s\n", e.name, secs,
                        check.detail.empty() ? "" : " | ", check.detail.c_str());
        } else {
            ++failed;
            std::printf("[FAIL] %s (%.2f s)%s%s\n", e.name, secs,
                        check.detail.empty() ? "" : " | ", check.detail.c_str());
            for (const std::string& f : check.failures)
                std::printf("       - %s\n", f.c_str());
        }
        std::fflush(stdout);
    }

    if (failed == 0)
        std::printf("all acceptance checks passed\n");
    else
        std::printf("%d acceptance check(s) failed\n", failed);
    return failed == 0 ? 0 : 1;
}
