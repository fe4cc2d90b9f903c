#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "escna/averaging.hpp"
#include "escna/controller.hpp"
#include "escna/defaults.hpp"
#include "escna/system.hpp"

namespace escna::sim {

// Fixed-step trajectory. Times are t0 + T*(i/N), so spacing is uniform within
// one ulp and the final time is exactly t0 + T. When integration hits the
// blow-up cutoff (or a nonfinite state), the trajectory is truncated at the
// last finite sample and blew_up is set.
struct Trajectory {
    int dim = 0;
    std::vector<double> times;
    std::vector<double> states;   // row-major: states[i*dim + j]
    std::vector<double> controls; // empty, or one u value per sample
    bool blew_up = false;
    std::string system_name;
    double dt = 0.0;

    std::size_t size() const { return times.size(); }
    std::span<const double> state_at(std::size_t i) const {
        return std::span<const double>(states).subspan(i * static_cast<std::size_t>(dim),
                                                       static_cast<std::size_t>(dim));
    }
    bool has_controls() const { return !controls.empty(); }
};

using Field = std::function<void(double t, std::span<const double> x, std::span<double> out)>;

// Classical RK4 with a fixed step. The requested dt is rounded down so that an
// integer number of steps lands exactly on t0 + T.
Trajectory integrate_field(const Field& field, std::span<const double> x0, double t0, double T,
                           double dt, double blowup_cutoff = model::kDefaultBlowupCutoff);

// Closed loop of a system under a dither controller; u is recomputed at every
// RK stage from the current (t, x). The step is the dither period divided by
// steps_per_period. Records the control value at each saved sample.
Trajectory integrate_closed_loop(const model::NonAffineSystem& sys, const esc::EscController& c,
                                 std::span<const double> x0, double t0, double T,
                                 int steps_per_period = defaults::kStepsPerPeriod);

// Averaged (slow) system integration with dt = T / steps.
Trajectory integrate_averaged(const esc::AveragedSystem& avg, std::span<const double> x0,
                              double t0, double T, int steps = defaults::kAverageSteps);

// Sup and terminal distance between two trajectories in the max norm. If the
// grids differ, b is resampled onto a's samples by linear interpolation over
// the shared window (flagged in the report).
struct ComparisonReport {
    double sup_error = 0.0;
    double terminal_error = 0.0;
    double t_start = 0.0;
    double t_end = 0.0;
    bool resampled = false;
    std::vector<double> errors; // per compared sample

    nlohmann::ordered_json to_json() const;
};

ComparisonReport compare(const Trajectory& a, const Trajectory& b);

// CSV with header t,x1,...,xn[,u], one row per sample, 17 significant digits
// (lossless for doubles).
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory_csv(const std::string& path);

} // namespace escna::sim
