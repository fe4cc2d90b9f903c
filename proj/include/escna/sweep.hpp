#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "escna/defaults.hpp"
#include "escna/integrate.hpp"

namespace escna::sweep {

enum class Label { Convergent, Divergent, Indeterminate, Blowup };

std::string_view label_name(Label label);

// One swept parameter: `count` samples from min to max, linearly or
// geometrically spaced. Endpoints are hit exactly in both scales.
struct Axis {
    std::string name; // one of alpha, omega, eps
    double min = 0.0;
    double max = 0.0;
    int count = 0;
    bool log_scale = false;

    double value_at(int i) const;
};

struct Classification {
    Label label = Label::Indeterminate;
    double terminal = 0.0; // |x(T)| clamped to the cutoff
};

// Terminal-state protocol: blowup if the integrator aborted, divergent at or
// above `cutoff`, convergent at or below `theta_conv`, indeterminate between.
Classification classify_trajectory(const sim::Trajectory& traj, double theta_conv, double cutoff);

struct SweepSpec {
    std::string builtin;          // system name, see model::builtin_names()
    std::string system_json;      // inline system definition, alternative to builtin
    int m = 0;                    // controller order
    double k = 1.0;               // feedback gain
    std::string objective = "x1^2";
    double alpha = 0.0;           // used when alpha is not a swept axis
    double omega = 0.0;           // used when omega is not a swept axis
    double eps = 0.0;             // used when eps is not a swept axis
    Axis axis1;
    Axis axis2;
    std::vector<double> x0 = {defaults::kSweepX0};
    double horizon = defaults::kSweepHorizon;
    int steps_per_period = defaults::kStepsPerPeriod;
    double theta_conv = defaults::kThetaConv;
    double cutoff = defaults::kCutoff;
    double x_star = defaults::kThetaConv; // equilibrium radius for the boundary overlay
    int jobs = defaults::kJobs;
};

struct Cell {
    double a1 = 0.0;
    double a2 = 0.0;
    double terminal = 0.0;
    Label label = Label::Indeterminate;
};

// Which side of the boundary curve the analysis predicts to be stable:
// Above means cells with value-axis coordinate above the curve should
// converge (uu's alpha boundary), Below the opposite (evenpow's eps bound).
enum class StableSide { Above, Below };

struct BoundaryCurve {
    std::string param_axis;    // always omega for the built-in formulas
    std::string value_axis;    // alpha or eps
    StableSide stable_side = StableSide::Above;
    std::vector<double> param; // one entry per omega-axis sample
    std::vector<double> value; // NaN where the formula has no root
};

struct StabilityGrid {
    Axis axis1;
    Axis axis2;
    std::vector<Cell> cells; // row-major: index = i1 * axis2.count + i2
    std::optional<BoundaryCurve> boundary;
    double x_star = 0.0;
};

// Integrates and classifies every cell of the grid. Cells run on `jobs`
// worker threads; each writes its own slot, so the output is identical for
// any worker count. Per-cell integration failures become blowup labels.
// For builtin uu over (alpha, omega) the equilibrium boundary alpha(omega) is
// attached; for evenpow over (eps, omega) the eps_1(omega) bound (m = 0 or 1).
StabilityGrid run_sweep(const SweepSpec& spec);

// Fraction of cells whose label matches the side of the attached boundary,
// excluding cells within `margin` relative distance of the curve and cells
// whose coordinate product a1*a2 falls below `min_coord_product` (0 keeps
// all). Throws ConfigError without a boundary, NumericError if every cell is
// excluded.
double boundary_agreement(const StabilityGrid& grid, double margin,
                          double min_coord_product = 0.0);

// Grid CSV: header <axis1>,<axis2>,terminal_abs_x,label; row-major cells.
void write_grid_csv(const StabilityGrid& grid, const std::string& path);

// Boundary CSV: header <param>,<value>_boundary; samples without a root are
// skipped. Throws ConfigError if the grid has no boundary.
void write_boundary_csv(const StabilityGrid& grid, const std::string& path);

// Label histogram, axes, and optional agreement score as a JSON document.
nlohmann::ordered_json grid_summary(const StabilityGrid& grid,
                                    std::optional<double> agreement = std::nullopt);

} // namespace escna::sweep
