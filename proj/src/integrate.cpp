#include "escna/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace escna::sim {

namespace {

bool all_finite_within(std::span<const double> x, double cutoff) {
    for (double v : x)
        if (!std::isfinite(v) || std::abs(v) > cutoff) return false;
    return true;
}

struct StepGrid {
    std::size_t steps;
    double T;
    double t0;

    double time_at(std::size_t i) const {
        return t0 + T * (static_cast<double>(i) / static_cast<double>(steps));
    }
};

StepGrid make_grid(double t0, double T, double dt_request) {
    if (!(T > 0.0)) throw ConfigError("integration horizon T must be positive");
    if (!(dt_request > 0.0)) throw ConfigError("integration step size must be positive");
    const double raw = T / dt_request;
    std::size_t steps = static_cast<std::size_t>(std::ceil(raw - 1e-12));
    if (steps < 1) steps = 1;
    return StepGrid{steps, T, t0};
}

// One RK4 step from (t, x) over h, writing into x_next. Scratch vectors are
// caller-owned so the hot loop does not allocate.
template <typename Rhs>
void rk4_step(const Rhs& rhs, double t, double h, std::span<const double> x,
              std::span<double> x_next, std::vector<double>& k1, std::vector<double>& k2,
              std::vector<double>& k3, std::vector<double>& k4, std::vector<double>& xs) {
    const std::size_t n = x.size();
    rhs(t, x, std::span<double>(k1));
    for (std::size_t j = 0; j < n; ++j) xs[j] = x[j] + 0.5 * h * k1[j];
    rhs(t + 0.5 * h, std::span<const double>(xs), std::span<double>(k2));
    for (std::size_t j = 0; j < n; ++j) xs[j] = x[j] + 0.5 * h * k2[j];
    rhs(t + 0.5 * h, std::span<const double>(xs), std::span<double>(k3));
    for (std::size_t j = 0; j < n; ++j) xs[j] = x[j] + h * k3[j];
    rhs(t + h, std::span<const double>(xs), std::span<double>(k4));
    for (std::size_t j = 0; j < n; ++j)
        x_next[j] = x[j] + (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
}

using ControlFn = std::function<double(double, const std::vector<double>&)>;

template <typename Rhs>
Trajectory run_fixed_step(const Rhs& rhs, const ControlFn* control, std::span<const double> x0,
                          const StepGrid& grid, double cutoff) {
    const std::size_t n = x0.size();
    Trajectory traj;
    traj.dim = static_cast<int>(n);
    traj.times.reserve(grid.steps + 1);
    traj.states.reserve((grid.steps + 1) * n);
    if (control) traj.controls.reserve(grid.steps + 1);
    traj.dt = grid.T / static_cast<double>(grid.steps);

    std::vector<double> x(x0.begin(), x0.end());
    if (!all_finite_within(x, cutoff)) {
        traj.blew_up = true;
        return traj;
    }
    std::vector<double> x_next(n), k1(n), k2(n), k3(n), k4(n), xs(n);

    auto record = [&](std::size_t i) {
        traj.times.push_back(grid.time_at(i));
        traj.states.insert(traj.states.end(), x.begin(), x.end());
        if (control) traj.controls.push_back((*control)(grid.time_at(i), x));
    };
    record(0);

    for (std::size_t i = 0; i < grid.steps; ++i) {
        const double t = grid.time_at(i);
        const double h = grid.time_at(i + 1) - t;
        rk4_step(rhs, t, h, x, std::span<double>(x_next), k1, k2, k3, k4, xs);
        if (!all_finite_within(x_next, cutoff)) {
            traj.blew_up = true;
            return traj;
        }
        x.swap(x_next);
        record(i + 1);
    }
    return traj;
}

} // namespace

Trajectory integrate_field(const Field& field, std::span<const double> x0, double t0, double T,
                           double dt, double blowup_cutoff) {
    if (!field) throw ConfigError("integration needs a vector field");
    const StepGrid grid = make_grid(t0, T, dt);
    return run_fixed_step(
        [&](double t, std::span<const double> x, std::span<double> out) { field(t, x, out); },
        nullptr, x0, grid, blowup_cutoff);
}

Trajectory integrate_closed_loop(const model::NonAffineSystem& sys, const esc::EscController& c,
                                 std::span<const double> x0, double t0, double T,
                                 int steps_per_period) {
    if (steps_per_period < 1) throw ConfigError("steps per period must be at least 1");
    if (static_cast<int>(x0.size()) != sys.dim())
        throw ConfigError("initial state dimension does not match the system");
    if (c.output_mode() && !sys.has_output())
        throw ConfigError("output-feedback controller needs a system with an output map");

    const ControlFn control = [&](double t, const std::vector<double>& x) {
        std::span<const double> xs(x);
        if (c.output_mode()) return c.value(t, xs, sys.output(t, xs));
        return c.value(t, xs);
    };
    auto rhs = [&](double t, std::span<const double> x, std::span<double> out) {
        double u;
        if (c.output_mode())
            u = c.value(t, x, sys.output(t, x));
        else
            u = c.value(t, x);
        sys.rhs(t, x, u, out);
    };

    const StepGrid grid = make_grid(t0, T, c.period() / steps_per_period);
    Trajectory traj = run_fixed_step(rhs, &control, x0, grid, sys.blowup_cutoff());
    traj.system_name = sys.name();
    return traj;
}

Trajectory integrate_averaged(const esc::AveragedSystem& avg, std::span<const double> x0,
                              double t0, double T, int steps) {
    if (steps < 1) throw ConfigError("averaged integration needs at least 1 step");
    if (static_cast<int>(x0.size()) != avg.dim)
        throw ConfigError("initial state dimension does not match the averaged system");
    auto rhs = [&](double t, std::span<const double> x, std::span<double> out) {
        avg.rhs(t, x, out);
    };
    const StepGrid grid = make_grid(t0, T, T / static_cast<double>(steps));
    return run_fixed_step(rhs, nullptr, x0, grid, model::kDefaultBlowupCutoff);
}

namespace {

double max_norm_diff(std::span<const double> a, std::span<const double> b) {
    double best = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) best = std::max(best, std::abs(a[j] - b[j]));
    return best;
}

// Linear interpolation of trajectory states at time t (t within the grid).
void interp_state(const Trajectory& traj, double t, std::span<double> out) {
    const auto& ts = traj.times;
    auto it = std::lower_bound(ts.begin(), ts.end(), t);
    if (it == ts.end()) {
        auto last = traj.state_at(traj.size() - 1);
        std::copy(last.begin(), last.end(), out.begin());
        return;
    }
    std::size_t hi = static_cast<std::size_t>(it - ts.begin());
    if (hi == 0 || ts[hi] == t) {
        auto s = traj.state_at(hi);
        std::copy(s.begin(), s.end(), out.begin());
        return;
    }
    const std::size_t lo = hi - 1;
    const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
    auto a = traj.state_at(lo);
    auto b = traj.state_at(hi);
    for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] + w * (b[j] - a[j]);
}

} // namespace

ComparisonReport compare(const Trajectory& a, const Trajectory& b) {
    if (a.size() == 0 || b.size() == 0)
        throw ConfigError("cannot compare an empty trajectory");
    if (a.dim != b.dim) throw ConfigError("trajectory dimensions differ");

    ComparisonReport report;
    const bool same_grid = a.size() == b.size() && a.times == b.times;
    if (same_grid) {
        report.t_start = a.times.front();
        report.t_end = a.times.back();
        report.errors.reserve(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            report.errors.push_back(max_norm_diff(a.state_at(i), b.state_at(i)));
    } else {
        report.resampled = true;
        report.t_start = std::max(a.times.front(), b.times.front());
        report.t_end = std::min(a.times.back(), b.times.back());
        if (!(report.t_start <= report.t_end))
            throw ConfigError("trajectories do not overlap in time");
        std::vector<double> bx(static_cast<std::size_t>(a.dim));
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double t = a.times[i];
            if (t < report.t_start || t > report.t_end) continue;
            interp_state(b, t, bx);
            report.errors.push_back(max_norm_diff(a.state_at(i), bx));
        }
        if (report.errors.empty())
            throw ConfigError("trajectories share no sample times in the overlap window");
    }
    report.sup_error = *std::max_element(report.errors.begin(), report.errors.end());
    report.terminal_error = report.errors.back();
    return report;
}

nlohmann::ordered_json ComparisonReport::to_json() const {
    nlohmann::ordered_json j;
    j["sup_error"] = sup_error;
    j["terminal_error"] = terminal_error;
    j["t_start"] = t_start;
    j["t_end"] = t_end;
    j["resampled"] = resampled;
    j["samples"] = errors.size();
    return j;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << "t";
    for (int j = 1; j <= traj.dim; ++j) out << ",x" << j;
    if (traj.has_controls()) out << ",u";
    out << "\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
    };
    for (std::size_t i = 0; i < traj.size(); ++i) {
        put(traj.times[i]);
        auto s = traj.state_at(i);
        for (double v : s) {
            out << ',';
            put(v);
        }
        if (traj.has_controls()) {
            out << ',';
            put(traj.controls[i]);
        }
        out << "\n";
    }
    if (!out) throw Error("failed while writing '" + path + "'");
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trajectory file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("trajectory file '" + path + "' is empty");

    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) header.push_back(tok);
    }
    if (header.empty() || header[0] != "t")
        throw ConfigError("trajectory file '" + path + "': header must start with t");
    bool has_u = !header.empty() && header.back() == "u";
    const int dim = static_cast<int>(header.size()) - 1 - (has_u ? 1 : 0);
    if (dim < 1) throw ConfigError("trajectory file '" + path + "': no state columns");
    for (int j = 1; j <= dim; ++j)
        if (header[static_cast<std::size_t>(j)] != "x" + std::to_string(j))
            throw ConfigError("trajectory file '" + path + "': unexpected column '" +
                              header[static_cast<std::size_t>(j)] + "'");

    Trajectory traj;
    traj.dim = dim;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> row;
        while (std::getline(ss, tok, ',')) {
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0')
                throw ConfigError("trajectory file '" + path + "': bad number at line " +
                                  std::to_string(line_no));
            row.push_back(v);
        }
        if (static_cast<int>(row.size()) != dim + 1 + (has_u ? 1 : 0))
            throw ConfigError("trajectory file '" + path + "': wrong column count at line " +
                              std::to_string(line_no));
        traj.times.push_back(row[0]);
        for (int j = 0; j < dim; ++j) traj.states.push_back(row[static_cast<std::size_t>(j) + 1]);
        if (has_u) traj.controls.push_back(row.back());
    }
    if (traj.times.empty()) throw ConfigError("trajectory file '" + path + "' has no samples");
    if (traj.size() >= 2) traj.dt = traj.times[1] - traj.times[0];
    return traj;
}

} // namespace escna::sim
