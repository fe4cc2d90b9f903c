#include "escna/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include "escna/format.hpp"
#include <fstream>
#include <functional>
#include <limits>
#include <thread>

#include "escna/averaging.hpp"
#include "escna/controller.hpp"
#include "escna/error.hpp"
#include "escna/expr.hpp"
#include "escna/system.hpp"

namespace escna::sweep {

namespace {

constexpr const char* kAxisNames[] = {"alpha", "omega", "eps"};

bool known_axis_name(const std::string& name) {
    return std::find(std::begin(kAxisNames), std::end(kAxisNames), name) != std::end(kAxisNames);
}

void check_axis(const Axis& axis, const char* which) {
    if (!known_axis_name(axis.name))
        throw ConfigError(escna::format("{} name must be alpha, omega, or eps, got '{}'", which,
                                      axis.name));
    if (axis.count < 2) throw ConfigError(escna::format("{} needs at least 2 samples", which));
    if (!std::isfinite(axis.min) || !std::isfinite(axis.max) || !(axis.min < axis.max))
        throw ConfigError(escna::format("{} range must satisfy min < max", which));
    if (axis.log_scale && !(axis.min > 0.0))
        throw ConfigError(escna::format("{} log scale needs min > 0", which));
    const double low = axis.min;
    if (axis.name == "eps") {
        if (low < 0.0) throw ConfigError("swept eps values must be nonnegative");
    } else if (!(low > 0.0)) {
        throw ConfigError(escna::format("swept {} values must be positive", axis.name));
    }
}

struct CellParams {
    double alpha;
    double omega;
    double eps;
};

CellParams resolve_params(const SweepSpec& spec, double a1, double a2) {
    CellParams p{spec.alpha, spec.omega, spec.eps};
    const auto assign = [&](const std::string& name, double v) {
        if (name == "alpha")
            p.alpha = v;
        else if (name == "omega")
            p.omega = v;
        else
            p.eps = v;
    };
    assign(spec.axis1.name, a1);
    assign(spec.axis2.name, a2);
    return p;
}

model::NonAffineSystem make_system(const SweepSpec& spec, double eps) {
    if (!spec.builtin.empty()) return model::builtin(spec.builtin, eps);
    return model::load_system_from_string(spec.system_json);
}

bool sweeps(const SweepSpec& spec, const char* name) {
    return spec.axis1.name == name || spec.axis2.name == name;
}

void validate_spec(const SweepSpec& spec) {
    if (spec.builtin.empty() == spec.system_json.empty())
        throw ConfigError("sweep needs exactly one of a builtin name or a system definition");
    check_axis(spec.axis1, "axis 1");
    check_axis(spec.axis2, "axis 2");
    if (spec.axis1.name == spec.axis2.name)
        throw ConfigError("the two sweep axes must differ");
    if (spec.builtin.empty() && (sweeps(spec, "eps") || spec.eps != 0.0))
        throw ConfigError("eps applies to builtin systems only");
    if (!sweeps(spec, "alpha") && !(spec.alpha > 0.0))
        throw ConfigError("fixed alpha must be positive when alpha is not swept");
    if (!sweeps(spec, "omega") && !(spec.omega > 0.0))
        throw ConfigError("fixed omega must be positive when omega is not swept");
    if (!sweeps(spec, "eps") && spec.eps < 0.0)
        throw ConfigError("fixed eps must be nonnegative");
    if (spec.m < 0) throw ConfigError("controller order m must be nonnegative");
    if (!std::isfinite(spec.k)) throw ConfigError("feedback gain k must be finite");
    if (!(spec.horizon > 0.0)) throw ConfigError("sweep horizon must be positive");
    if (spec.steps_per_period < 1) throw ConfigError("steps per period must be at least 1");
    if (spec.theta_conv < 0.0) throw ConfigError("convergence threshold must be nonnegative");
    if (!(spec.cutoff > spec.theta_conv))
        throw ConfigError("cutoff must exceed the convergence threshold");
    if (!(spec.x_star > 0.0)) throw ConfigError("x_star must be positive");
    if (spec.jobs < 1) throw ConfigError("jobs must be at least 1");
    if (spec.x0.empty()) throw ConfigError("initial state must not be empty");

    // Surface configuration problems (unknown builtin, bad JSON, wrong x0
    // dimension, malformed objective) before any cell runs.
    double rep_eps = spec.eps;
    if (spec.axis1.name == "eps") rep_eps = spec.axis1.min;
    if (spec.axis2.name == "eps") rep_eps = spec.axis2.min;
    const model::NonAffineSystem probe = make_system(spec, rep_eps);
    if (static_cast<int>(spec.x0.size()) != probe.dim())
        throw ConfigError(escna::format("initial state has {} components, system '{}' has {}",
                                      spec.x0.size(), probe.name(), probe.dim()));
    try {
        (void)expr::parse_expr(spec.objective, expr::VariableSet::state_time(probe.dim()));
    } catch (const ParseError& e) {
        throw ConfigError(escna::format("objective: {}", e.what()));
    }
}

Cell run_cell(const SweepSpec& spec, const expr::ExprPtr& objective,
              const expr::VariableSet& vars, int i1, int i2) {
    Cell cell;
    cell.a1 = spec.axis1.value_at(i1);
    cell.a2 = spec.axis2.value_at(i2);
    const CellParams p = resolve_params(spec, cell.a1, cell.a2);
    try {
        const model::NonAffineSystem sys = make_system(spec, p.eps);
        const esc::EscController c =
            esc::EscController::state_feedback(spec.m, p.alpha, p.omega, spec.k, objective, vars);
        const sim::Trajectory traj =
            sim::integrate_closed_loop(sys, c, spec.x0, 0.0, spec.horizon, spec.steps_per_period);
        const Classification cls = classify_trajectory(traj, spec.theta_conv, spec.cutoff);
        cell.label = cls.label;
        cell.terminal = cls.terminal;
    } catch (const Error&) {
        cell.label = Label::Blowup;
        cell.terminal = spec.cutoff;
    }
    return cell;
}

// Boundary overlays exist for the two systems with analytic formulas: the uu
// equilibrium boundary alpha(omega) (stable above) and the evenpow
// perturbation bound eps_1(omega) (stable below, orders m = 0 and 1 only).
void attach_boundary(StabilityGrid& grid, const SweepSpec& spec) {
    const bool omega_first = spec.axis1.name == "omega";
    if (!omega_first && spec.axis2.name != "omega") return;
    const Axis& omega_axis = omega_first ? grid.axis1 : grid.axis2;
    const Axis& value_axis = omega_first ? grid.axis2 : grid.axis1;

    BoundaryCurve curve;
    curve.param_axis = "omega";
    curve.value_axis = value_axis.name;

    std::function<double(double)> formula;
    if (spec.builtin == "uu" && value_axis.name == "alpha") {
        curve.stable_side = StableSide::Above;
        formula = [&](double w) {
            return esc::equilibrium_boundary_uu(spec.k, spec.m, spec.eps, w, spec.x_star);
        };
    } else if (spec.builtin == "evenpow" && value_axis.name == "eps" && spec.m <= 1) {
        curve.stable_side = StableSide::Below;
        formula = [&](double w) {
            return spec.m == 0 ? esc::epsilon_bound_m0(spec.alpha, w)
                               : esc::epsilon_bound_evenpow(spec.k, spec.alpha, w);
        };
    } else {
        return;
    }

    for (int i = 0; i < omega_axis.count; ++i) {
        const double w = omega_axis.value_at(i);
        curve.param.push_back(w);
        double v = std::numeric_limits<double>::quiet_NaN();
        try {
            v = formula(w);
        } catch (const Error&) {
            // no root or formula out of range at this omega; leave the gap
        }
        curve.value.push_back(v);
    }
    grid.boundary = std::move(curve);
}

void format_number(std::string& line, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    line += buf;
}

} // namespace

std::string_view label_name(Label label) {
    switch (label) {
    case Label::Convergent: return "convergent";
    case Label::Divergent: return "divergent";
    case Label::Indeterminate: return "indeterminate";
    case Label::Blowup: return "blowup";
    }
    return "indeterminate";
}

double Axis::value_at(int i) const {
    if (i <= 0) return min;
    if (i >= count - 1) return max;
    const double s = static_cast<double>(i) / static_cast<double>(count - 1);
    if (log_scale) return std::exp(std::log(min) + s * (std::log(max) - std::log(min)));
    return min + s * (max - min);
}

Classification classify_trajectory(const sim::Trajectory& traj, double theta_conv,
                                   double cutoff) {
    if (traj.size() == 0) throw ConfigError("cannot classify an empty trajectory");
    if (theta_conv < 0.0 || !(cutoff > theta_conv))
        throw ConfigError("classification needs 0 <= theta_conv < cutoff");
    const auto xe = traj.state_at(traj.size() - 1);
    double sq = 0.0;
    for (double v : xe) sq += v * v;
    const double norm = std::sqrt(sq);

    Classification cls;
    cls.terminal = std::min(norm, cutoff);
    if (traj.blew_up) {
        cls.label = Label::Blowup;
        cls.terminal = cutoff; // the last finite sample is meaningless once we bail
    }
    else if (norm >= cutoff)
        cls.label = Label::Divergent;
    else if (norm <= theta_conv)
        cls.label = Label::Convergent;
    else
        cls.label = Label::Indeterminate;
    return cls;
}

StabilityGrid run_sweep(const SweepSpec& spec) {
    validate_spec(spec);

    const int dim = static_cast<int>(spec.x0.size());
    const expr::VariableSet vars = expr::VariableSet::state_time(dim);
    const expr::ExprPtr objective = expr::parse_expr(spec.objective, vars);

    StabilityGrid grid;
    grid.axis1 = spec.axis1;
    grid.axis2 = spec.axis2;
    grid.x_star = spec.x_star;
    const std::size_t total =
        static_cast<std::size_t>(spec.axis1.count) * static_cast<std::size_t>(spec.axis2.count);
    grid.cells.resize(total);

    // Cells are independent; each worker claims indices from a shared counter
    // and writes its own slot, so the grid content does not depend on the
    // worker count or scheduling.
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < total;) {
            const int i1 = static_cast<int>(i) / spec.axis2.count;
            const int i2 = static_cast<int>(i) % spec.axis2.count;
            grid.cells[i] = run_cell(spec, objective, vars, i1, i2);
        }
    };
    const int jobs = std::min<int>(spec.jobs, static_cast<int>(total));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    attach_boundary(grid, spec);
    return grid;
}

double boundary_agreement(const StabilityGrid& grid, double margin, double min_coord_product) {
    if (!grid.boundary) throw ConfigError("grid has no boundary curve attached");
    if (margin < 0.0) throw ConfigError("margin must be nonnegative");
    const BoundaryCurve& curve = *grid.boundary;
    const bool omega_first = grid.axis1.name == curve.param_axis;

    std::size_t considered = 0;
    std::size_t matched = 0;
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        const Cell& cell = grid.cells[i];
        const int i1 = static_cast<int>(i) / grid.axis2.count;
        const int i2 = static_cast<int>(i) % grid.axis2.count;
        const int omega_index = omega_first ? i1 : i2;
        const double v = omega_first ? cell.a2 : cell.a1;
        const double b = curve.value[static_cast<std::size_t>(omega_index)];
        if (std::isnan(b)) continue;
        if (std::abs(v - b) <= margin * std::max(std::abs(b), 1e-300)) continue;
        if (cell.a1 * cell.a2 < min_coord_product) continue;
        const bool stable_expected =
            curve.stable_side == StableSide::Above ? v > b : v < b;
        ++considered;
        if (stable_expected == (cell.label == Label::Convergent)) ++matched;
    }
    if (considered == 0)
        throw NumericError("every cell fell inside the boundary margin; nothing to score");
    return static_cast<double>(matched) / static_cast<double>(considered);
}

void write_grid_csv(const StabilityGrid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(escna::format("cannot open '{}' for writing", path));
    out << grid.axis1.name << ',' << grid.axis2.name << ",terminal_abs_x,label\n";
    std::string line;
    for (const Cell& cell : grid.cells) {
        line.clear();
        format_number(line, cell.a1);
        line += ',';
        format_number(line, cell.a2);
        line += ',';
        format_number(line, cell.terminal);
        line += ',';
        line += label_name(cell.label);
        line += '\n';
        out << line;
    }
    out.flush();
    if (!out) throw Error(escna::format("failed writing '{}'", path));
}

void write_boundary_csv(const StabilityGrid& grid, const std::string& path) {
    if (!grid.boundary) throw ConfigError("grid has no boundary curve attached");
    const BoundaryCurve& curve = *grid.boundary;
    std::ofstream out(path);
    if (!out) throw Error(escna::format("cannot open '{}' for writing", path));
    out << curve.param_axis << ',' << curve.value_axis << "_boundary\n";
    std::string line;
    for (std::size_t i = 0; i < curve.param.size(); ++i) {
        if (std::isnan(curve.value[i])) continue;
        line.clear();
        format_number(line, curve.param[i]);
        line += ',';
        format_number(line, curve.value[i]);
        line += '\n';
        out << line;
    }
    out.flush();
    if (!out) throw Error(escna::format("failed writing '{}'", path));
}

nlohmann::ordered_json grid_summary(const StabilityGrid& grid, std::optional<double> agreement) {
    const auto axis_json = [](const Axis& axis) {
        nlohmann::ordered_json j;
        j["name"] = axis.name;
        j["min"] = axis.min;
        j["max"] = axis.max;
        j["count"] = axis.count;
        j["scale"] = axis.log_scale ? "log" : "lin";
        return j;
    };
    nlohmann::ordered_json j;
    j["axis1"] = axis_json(grid.axis1);
    j["axis2"] = axis_json(grid.axis2);
    j["cells"] = grid.cells.size();
    nlohmann::ordered_json labels;
    for (Label l : {Label::Convergent, Label::Divergent, Label::Indeterminate, Label::Blowup}) {
        const auto n = std::count_if(grid.cells.begin(), grid.cells.end(),
                                     [l](const Cell& c) { return c.label == l; });
        labels[std::string(label_name(l))] = n;
    }
    j["labels"] = std::move(labels);
    j["x_star"] = grid.x_star;
    if (grid.boundary) {
        const BoundaryCurve& curve = *grid.boundary;
        nlohmann::ordered_json jb;
        jb["param_axis"] = curve.param_axis;
        jb["value_axis"] = curve.value_axis;
        jb["stable_side"] = curve.stable_side == StableSide::Above ? "above" : "below";
        jb["samples"] = std::count_if(curve.value.begin(), curve.value.end(),
                                      [](double v) { return !std::isnan(v); });
        j["boundary"] = std::move(jb);
    } else {
        j["boundary"] = nullptr;
    }
    if (agreement)
        j["agreement"] = *agreement;
    else
        j["agreement"] = nullptr;
    return j;
}

} // namespace escna::sweep
