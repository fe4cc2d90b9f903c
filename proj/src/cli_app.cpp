#include "escna/cli_app.hpp"

#include <cstdio>
#include "escna/format.hpp"
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "escna/averaging.hpp"
#include "escna/avgverify.hpp"
#include "escna/controller.hpp"
#include "escna/defaults.hpp"
#include "escna/error.hpp"
#include "escna/expr.hpp"
#include "escna/integrate.hpp"
#include "escna/manifest.hpp"
#include "escna/nonlinearity.hpp"
#include "escna/oddpoly.hpp"
#include "escna/sweep.hpp"
#include "escna/system.hpp"

namespace escna::cli {

namespace {

void warn(const std::string& message) { std::fprintf(stderr, "warning: %s\n", message.c_str()); }

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// The manifest destination must be known even when parsing fails, so it is
// recovered by a plain scan before CLI11 sees the arguments.
std::string manifest_path_from(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--manifest" && i + 1 < args.size()) return args[i + 1];
        if (args[i].starts_with("--manifest=")) return args[i].substr(11);
    }
    return "manifest.json";
}

std::string command_from(const std::vector<std::string>& args) {
    for (const std::string& a : args)
        if (!a.starts_with('-')) return a;
    return "";
}

nlohmann::json load_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw ConfigError(escna::format("cannot read {} '{}'", what, path));
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(escna::format("{} '{}': invalid JSON: {}", what, path, e.what()));
    }
}

void write_json_file(const nlohmann::ordered_json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(escna::format("cannot open '{}' for writing", path));
    out << j.dump(2) << '\n';
    out.flush();
    if (!out) throw Error(escna::format("failed writing '{}'", path));
}

std::string read_text_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw ConfigError(escna::format("cannot read {} '{}'", what, path));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// --- shared flag groups ---------------------------------------------------

struct SystemFlags {
    std::string builtin;
    std::string file;
    double eps = 0.0;
};

void add_system_flags(CLI::App* cmd, SystemFlags& f) {
    cmd->add_option("--builtin", f.builtin, "built-in system name (see README)");
    cmd->add_option("--system", f.file, "system definition JSON file");
    cmd->add_option("--eps", f.eps, "even-channel strength for builtins that take one");
}

model::NonAffineSystem resolve_system(const SystemFlags& f, RunManifest& man) {
    if (f.builtin.empty() == f.file.empty())
        throw ConfigError("provide exactly one of --builtin or --system");
    if (!f.builtin.empty()) return model::builtin(f.builtin, f.eps);
    if (f.eps != 0.0) throw ConfigError("--eps applies to builtin systems only");
    man.add_input(f.file);
    return model::load_system_from_file(f.file);
}

struct ControllerFlags {
    std::string config_path;
    int m = 0;
    double alpha = 0.0;
    double omega = 0.0;
    double k = 0.0;
    std::string objective;
    bool output_feedback = false;
};

void add_controller_flags(CLI::App* cmd, ControllerFlags& f) {
    cmd->add_option("--config", f.config_path, "controller config JSON file");
    cmd->add_option("--m", f.m, "controller order m (the power 2m+1 dominates)");
    cmd->add_option("--alpha", f.alpha, "dither strength");
    cmd->add_option("--omega", f.omega, "dither frequency (rad/s)");
    cmd->add_option("--k", f.k, "feedback gain");
    cmd->add_option("--V", f.objective, "objective expression in t, x1..xn");
    cmd->add_flag("--output-feedback", f.output_feedback,
                  "drive the dither phase with the measured output y");
}

// Merges the config file (if any) with explicitly given flags; a flag always
// wins over the file, with a warning. The merged object goes through the
// same JSON path a file-only run would take.
nlohmann::json merged_controller_config(const CLI::App* cmd, const ControllerFlags& f,
                                        RunManifest& man) {
    nlohmann::json cfg = nlohmann::json::object();
    if (!f.config_path.empty()) {
        cfg = load_json_file(f.config_path, "controller config");
        man.add_input(f.config_path);
        if (!cfg.is_object()) throw ConfigError("controller config: top level must be an object");
    }
    const auto put = [&](const char* flag, const char* key, nlohmann::json value) {
        if (cmd->count(flag) == 0) return;
        if (cfg.contains(key))
            warn(escna::format("{} overrides '{}' from {}", flag, key, f.config_path));
        cfg[key] = std::move(value);
    };
    put("--m", "m", f.m);
    put("--alpha", "alpha", f.alpha);
    put("--omega", "omega", f.omega);
    put("--k", "k", f.k);
    if (cmd->count("--V") > 0) {
        if (cfg.contains("output_feedback")) {
            warn("--V overrides 'output_feedback' from " + f.config_path);
            cfg.erase("output_feedback");
        }
        if (cfg.contains("V")) warn("--V overrides 'V' from " + f.config_path);
        cfg["V"] = f.objective;
    }
    if (cmd->count("--output-feedback") > 0) {
        if (cfg.contains("V")) {
            warn("--output-feedback overrides 'V' from " + f.config_path);
            cfg.erase("V");
        }
        cfg["output_feedback"] = true;
    }
    return cfg;
}

void echo_controller(const nlohmann::json& cfg, RunManifest& man) {
    for (const char* key : {"m", "alpha", "omega", "k", "V", "output_feedback"})
        if (cfg.contains(key)) man.set_param(key, cfg.at(key));
}

void echo_system(const SystemFlags& f, RunManifest& man) {
    if (!f.builtin.empty()) man.set_param("builtin", f.builtin);
    if (!f.file.empty()) man.set_param("system", f.file);
    man.set_param("eps", f.eps);
}

// --- simulate ---------------------------------------------------------------

struct SimulateFlags {
    SystemFlags sys;
    ControllerFlags ctrl;
    std::vector<double> x0;
    double t0 = 0.0;
    double horizon = 0.0;
    int steps_per_period = defaults::kStepsPerPeriod;
    std::string out;
};

CLI::App* add_simulate(CLI::App& app, SimulateFlags& f) {
    CLI::App* cmd = app.add_subcommand("simulate", "integrate the oscillatory closed loop");
    add_system_flags(cmd, f.sys);
    add_controller_flags(cmd, f.ctrl);
    cmd->add_option("--x0", f.x0, "initial state (comma-separated)")
        ->delimiter(',')
        ->required();
    cmd->add_option("--t0", f.t0, "start time");
    cmd->add_option("--T", f.horizon, "integration horizon (s)")->required();
    cmd->add_option("--steps-per-period", f.steps_per_period, "RK4 steps per dither period");
    cmd->add_option("--out", f.out, "trajectory CSV path")->required();
    return cmd;
}

void run_simulate(const CLI::App* cmd, const SimulateFlags& f, RunManifest& man) {
    const model::NonAffineSystem sys = resolve_system(f.sys, man);
    const nlohmann::json cfg = merged_controller_config(cmd, f.ctrl, man);
    const esc::EscController c = esc::controller_from_json(cfg, sys.dim());

    echo_system(f.sys, man);
    echo_controller(cfg, man);
    man.set_param("x0", f.x0);
    man.set_param("t0", f.t0);
    man.set_param("T", f.horizon);
    man.set_param("steps_per_period", f.steps_per_period);

    const sim::Trajectory traj =
        sim::integrate_closed_loop(sys, c, f.x0, f.t0, f.horizon, f.steps_per_period);
    sim::write_trajectory_csv(traj, f.out);
    man.add_output(f.out);
    man.set_param("blew_up", traj.blew_up);
    if (traj.blew_up) warn("trajectory blew up; CSV holds the samples up to the cutoff");
    std::printf("wrote %s (%zu samples)\n", f.out.c_str(), traj.size());
}

// --- average ----------------------------------------------------------------

struct AverageFlags {
    SystemFlags sys;
    ControllerFlags ctrl;
    std::string construction = "theorem1";
    std::vector<double> x0;
    double t0 = 0.0;
    double horizon = 0.0;
    int steps = defaults::kAverageSteps;
    std::string out;
};

CLI::App* add_average(CLI::App& app, AverageFlags& f) {
    CLI::App* cmd = app.add_subcommand("average", "integrate the averaged system");
    add_system_flags(cmd, f.sys);
    add_controller_flags(cmd, f.ctrl);
    cmd->add_option("--construction", f.construction, "averaged-field construction")
        ->check(CLI::IsMember({"theorem1", "conjecture1"}));
    cmd->add_option("--x0", f.x0, "initial state (comma-separated)")
        ->delimiter(',')
        ->required();
    cmd->add_option("--t0", f.t0, "start time");
    cmd->add_option("--T", f.horizon, "integration horizon (s)")->required();
    cmd->add_option("--steps", f.steps, "RK4 steps over the horizon");
    cmd->add_option("--out", f.out, "trajectory CSV path")->required();
    return cmd;
}

void run_average(const CLI::App* cmd, const AverageFlags& f, RunManifest& man) {
    const model::NonAffineSystem sys = resolve_system(f.sys, man);
    const nlohmann::json cfg = merged_controller_config(cmd, f.ctrl, man);
    const esc::EscController c = esc::controller_from_json(cfg, sys.dim());
    const esc::AveragedSystem avg = f.construction == "theorem1"
                                        ? esc::averaged_system_theorem1(sys, c)
                                        : esc::averaged_system_conjecture(sys, c);

    echo_system(f.sys, man);
    echo_controller(cfg, man);
    man.set_param("construction", f.construction);
    man.set_param("x0", f.x0);
    man.set_param("t0", f.t0);
    man.set_param("T", f.horizon);
    man.set_param("steps", f.steps);
    man.set_param("odd_index", avg.odd_index);
    man.set_param("A_value", avg.A_value);
    man.set_param("odd_gain", avg.odd_gain);
    man.set_param("alpha_exponent", avg.alpha_exponent);
    man.set_param("omega_exponent", avg.omega_exponent);
    if (avg.even_index) {
        man.set_param("even_index", *avg.even_index);
        man.set_param("B_value", *avg.B_value);
        man.set_param("even_gain", avg.even_gain);
    }

    const sim::Trajectory traj = sim::integrate_averaged(avg, f.x0, f.t0, f.horizon, f.steps);
    sim::write_trajectory_csv(traj, f.out);
    man.add_output(f.out);
    man.set_param("blew_up", traj.blew_up);
    if (traj.blew_up) warn("averaged trajectory blew up; CSV holds the samples up to the cutoff");
    std::printf("wrote %s (%zu samples)\n", f.out.c_str(), traj.size());
}

// --- compare ----------------------------------------------------------------

struct CompareFlags {
    std::string path_a;
    std::string path_b;
    std::string out;
};

CLI::App* add_compare(CLI::App& app, CompareFlags& f) {
    CLI::App* cmd = app.add_subcommand("compare", "sup-norm gap between two trajectory CSVs");
    cmd->add_option("first", f.path_a, "trajectory CSV")->required();
    cmd->add_option("second", f.path_b, "trajectory CSV")->required();
    cmd->add_option("--out", f.out, "report JSON path")->required();
    return cmd;
}

void run_compare(const CompareFlags& f, RunManifest& man) {
    man.add_input(f.path_a);
    man.add_input(f.path_b);
    man.set_param("first", f.path_a);
    man.set_param("second", f.path_b);
    const sim::Trajectory a = sim::read_trajectory_csv(f.path_a);
    const sim::Trajectory b = sim::read_trajectory_csv(f.path_b);
    const sim::ComparisonReport report = sim::compare(a, b);
    write_json_file(report.to_json(), f.out);
    man.add_output(f.out);
    man.set_param("sup_error", report.sup_error);
    std::printf("sup_error %s terminal_error %s\n", fmt17(report.sup_error).c_str(),
                fmt17(report.terminal_error).c_str());
}

// --- fit --------------------------------------------------------------------

struct FitFlags {
    std::string h_expr;
    bool deadzone = false;
    int m = 0;
    double half_width = 2.0;
    int samples = 401;
    std::string out;
};

CLI::App* add_fit(CLI::App& app, FitFlags& f) {
    CLI::App* cmd =
        app.add_subcommand("fit", "least-squares odd polynomial fit of a scalar nonlinearity");
    // --h would clash with the implicit -h help alias, so this subcommand keeps --help only.
    cmd->set_help_flag("--help", "print help and exit");
    cmd->add_option("--h", f.h_expr, "nonlinearity as an expression in u");
    cmd->add_flag("--deadzone", f.deadzone, "fit the built-in deadzone-saturation map");
    cmd->add_option("--m", f.m, "highest fitted power is 2m+1")->required();
    cmd->add_option("--U", f.half_width, "fit interval is [-U, U]");
    cmd->add_option("--samples", f.samples, "grid points across the fit interval");
    cmd->add_option("--out", f.out, "coefficients JSON path");
    return cmd;
}

void run_fit(const FitFlags& f, RunManifest& man) {
    if (f.h_expr.empty() == !f.deadzone)
        throw ConfigError("provide exactly one of --h or --deadzone");
    std::function<double(double)> h;
    if (f.deadzone) {
        h = model::deadzone_saturation;
        man.set_param("h", "deadzone");
    } else {
        const expr::VariableSet vars = expr::VariableSet::control_input();
        expr::ExprPtr body;
        try {
            body = expr::parse_expr(f.h_expr, vars);
        } catch (const ParseError& e) {
            throw ConfigError(escna::format("--h: {}", e.what()));
        }
        h = [body](double u) { return expr::eval_expr(*body, std::span<const double>(&u, 1)); };
        man.set_param("h", f.h_expr);
    }
    man.set_param("m", f.m);
    man.set_param("U", f.half_width);
    man.set_param("samples", f.samples);

    const poly::FitResult fit = poly::fit_odd_polynomial(h, f.m, f.half_width, f.samples);
    for (std::size_t i = 0; i < fit.poly.coeffs.size(); ++i)
        std::printf("a%zu %s\n", 2 * i + 1, fmt17(fit.poly.coeffs[i]).c_str());
    std::printf("sup_error %s\n", fmt17(fit.sup_error).c_str());

    if (!f.out.empty()) {
        nlohmann::ordered_json j;
        j["m"] = f.m;
        j["U"] = f.half_width;
        j["samples"] = f.samples;
        j["coeffs"] = fit.poly.coeffs;
        j["sup_error"] = fit.sup_error;
        write_json_file(j, f.out);
        man.add_output(f.out);
    }
}

// --- sweep --------------------------------------------------------------

struct SweepFlags {
    SystemFlags sys;
    int m = 0;
    double k = 0.0;
    std::string objective = "x1^2";
    double alpha = 0.0;
    double omega = 0.0;
    std::string axis1;
    std::string axis2;
    std::vector<double> x0{defaults::kSweepX0};
    double horizon = defaults::kSweepHorizon;
    int steps_per_period = defaults::kStepsPerPeriod;
    double theta_conv = defaults::kThetaConv;
    double cutoff = defaults::kCutoff;
    double x_star = 0.0; // defaults to theta_conv after parsing
    int jobs = defaults::kJobs;
    double margin = defaults::kBoundaryMargin;
    double min_coord_product = 0.0;
    std::string out;
    std::string boundary_out;
    std::string summary;
};

CLI::App* add_sweep(CLI::App& app, SweepFlags& f) {
    CLI::App* cmd = app.add_subcommand("sweep", "classify the closed loop over a parameter grid");
    add_system_flags(cmd, f.sys);
    cmd->add_option("--m", f.m, "controller order m")->required();
    cmd->add_option("--k", f.k, "feedback gain")->required();
    cmd->add_option("--V", f.objective, "objective expression in t, x1..xn");
    cmd->add_option("--alpha", f.alpha, "fixed alpha when not swept");
    cmd->add_option("--omega", f.omega, "fixed omega when not swept");
    cmd->add_option("--axis1", f.axis1, "first axis, name:min:max:count:lin|log")->required();
    cmd->add_option("--axis2", f.axis2, "second axis, name:min:max:count:lin|log")->required();
    cmd->add_option("--x0", f.x0, "initial state (comma-separated)")->delimiter(',');
    cmd->add_option("--T", f.horizon, "horizon per cell (s)");
    cmd->add_option("--steps-per-period", f.steps_per_period, "RK4 steps per dither period");
    cmd->add_option("--theta-conv", f.theta_conv, "convergence threshold on |x(T)|");
    cmd->add_option("--cutoff", f.cutoff, "divergence cutoff on |x(T)|");
    cmd->add_option("--x-star", f.x_star, "boundary equilibrium radius (default theta-conv)");
    cmd->add_option("--jobs", f.jobs, "worker threads (any value gives identical output)");
    cmd->add_option("--margin", f.margin, "relative band around the boundary excluded from scoring");
    cmd->add_option("--min-coord-product", f.min_coord_product,
                    "score only cells with axis1*axis2 at or above this");
    cmd->add_option("--out", f.out, "grid CSV path")->required();
    cmd->add_option("--boundary-out", f.boundary_out, "boundary CSV path");
    cmd->add_option("--summary", f.summary, "summary JSON path");
    return cmd;
}

sweep::Axis parse_axis(const std::string& text, const char* which) {
    std::vector<std::string> parts;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ':')) parts.push_back(token);
    if (parts.size() != 5)
        throw ConfigError(
            escna::format("{} must look like name:min:max:count:lin|log, got '{}'", which, text));
    sweep::Axis axis;
    axis.name = parts[0];
    try {
        axis.min = std::stod(parts[1]);
        axis.max = std::stod(parts[2]);
        axis.count = std::stoi(parts[3]);
    } catch (const std::exception&) {
        throw ConfigError(escna::format("{}: cannot parse numbers in '{}'", which, text));
    }
    if (parts[4] == "lin")
        axis.log_scale = false;
    else if (parts[4] == "log")
        axis.log_scale = true;
    else
        throw ConfigError(escna::format("{} scale must be lin or log, got '{}'", which, parts[4]));
    return axis;
}

void run_sweep_cmd(const CLI::App* cmd, const SweepFlags& f, RunManifest& man) {
    sweep::SweepSpec spec;
    spec.builtin = f.sys.builtin;
    if (!f.sys.file.empty()) {
        spec.system_json = read_text_file(f.sys.file, "system definition");
        man.add_input(f.sys.file);
    }
    spec.m = f.m;
    spec.k = f.k;
    spec.objective = f.objective;
    spec.alpha = f.alpha;
    spec.omega = f.omega;
    spec.eps = f.sys.eps;
    spec.axis1 = parse_axis(f.axis1, "--axis1");
    spec.axis2 = parse_axis(f.axis2, "--axis2");
    spec.x0 = f.x0;
    spec.horizon = f.horizon;
    spec.steps_per_period = f.steps_per_period;
    spec.theta_conv = f.theta_conv;
    spec.cutoff = f.cutoff;
    spec.x_star = cmd->count("--x-star") > 0 ? f.x_star : f.theta_conv;
    spec.jobs = f.jobs;

    echo_system(f.sys, man);
    man.set_param("m", spec.m);
    man.set_param("k", spec.k);
    man.set_param("V", spec.objective);
    man.set_param("alpha", spec.alpha);
    man.set_param("omega", spec.omega);
    man.set_param("axis1", f.axis1);
    man.set_param("axis2", f.axis2);
    man.set_param("x0", spec.x0);
    man.set_param("T", spec.horizon);
    man.set_param("steps_per_period", spec.steps_per_period);
    man.set_param("theta_conv", spec.theta_conv);
    man.set_param("cutoff", spec.cutoff);
    man.set_param("x_star", spec.x_star);
    man.set_param("jobs", spec.jobs);
    man.set_param("margin", f.margin);
    man.set_param("min_coord_product", f.min_coord_product);

    const sweep::StabilityGrid grid = sweep::run_sweep(spec);
    sweep::write_grid_csv(grid, f.out);
    man.add_output(f.out);

    if (!f.boundary_out.empty()) {
        if (grid.boundary) {
            sweep::write_boundary_csv(grid, f.boundary_out);
            man.add_output(f.boundary_out);
        } else {
            warn("no boundary formula applies to this sweep; skipping " + f.boundary_out);
        }
    }

    std::optional<double> agreement;
    if (grid.boundary) {
        try {
            agreement = sweep::boundary_agreement(grid, f.margin, f.min_coord_product);
        } catch (const NumericError& e) {
            warn(escna::format("agreement not scored: {}", e.what()));
        }
    }
    if (agreement) man.set_param("agreement", *agreement);

    const nlohmann::ordered_json summary = sweep::grid_summary(grid, agreement);
    if (!f.summary.empty()) {
        write_json_file(summary, f.summary);
        man.add_output(f.summary);
    }
    std::printf("%s\n", summary["labels"].dump().c_str());
    if (agreement) std::printf("agreement %s\n", fmt17(*agreement).c_str());
}

// --- verify-limits -----------------------------------------------------

struct VerifyFlags {
    std::string kind;
    int m = 0;
    int l = 0;
    double alpha = 1.0;
    std::vector<double> omegas;
    int nodes_per_period = defaults::kNodesPerPeriod;
    std::string out;
};

CLI::App* add_verify(CLI::App& app, VerifyFlags& f) {
    CLI::App* cmd =
        app.add_subcommand("verify-limits", "check the dither limit hypotheses numerically");
    cmd->add_option("--kind", f.kind, "uniform or weak")
        ->check(CLI::IsMember({"uniform", "weak"}))
        ->required();
    cmd->add_option("--m", f.m, "controller order m")->required();
    cmd->add_option("--l", f.l, "frequency index for the weak products");
    cmd->add_option("--alpha", f.alpha, "dither strength");
    cmd->add_option("--omegas", f.omegas, "increasing omega list (comma-separated)")
        ->delimiter(',')
        ->required();
    cmd->add_option("--nodes-per-period", f.nodes_per_period, "quadrature nodes per period");
    cmd->add_option("--out", f.out, "report JSON path")->required();
    return cmd;
}

void run_verify(const VerifyFlags& f, RunManifest& man) {
    man.set_param("kind", f.kind);
    man.set_param("m", f.m);
    man.set_param("alpha", f.alpha);
    man.set_param("omegas", f.omegas);
    man.set_param("nodes_per_period", f.nodes_per_period);

    verify::LimitReport report;
    nlohmann::ordered_json j;
    j["kind"] = f.kind;
    j["m"] = f.m;
    if (f.kind == "weak") {
        man.set_param("l", f.l);
        j["l"] = f.l;
        report = verify::verify_weak_limits(f.m, f.l, f.omegas, f.alpha, f.nodes_per_period);
    } else {
        j["l"] = nullptr;
        report = verify::verify_uniform_limits(f.m, f.omegas, f.alpha, f.nodes_per_period);
    }
    j["alpha"] = f.alpha;
    j["nodes_per_period"] = f.nodes_per_period;
    nlohmann::ordered_json body = report.to_json();
    for (auto& [key, value] : body.items()) j[key] = std::move(value);

    write_json_file(j, f.out);
    man.add_output(f.out);
    man.set_param("all_pass", report.all_pass);
    std::printf("%s: %zu items, all_pass %s\n", f.kind.c_str(), report.items.size(),
                report.all_pass ? "true" : "false");
}

// --- boundary ----------------------------------------------------------

struct BoundaryFlags {
    std::string formula;
    double k = 0.0;
    int m = 0;
    double eps = 0.0;
    double alpha = 0.0;
    double omega = 0.0;
    double x_star = defaults::kThetaConv;
    std::string out;
};

CLI::App* add_boundary(CLI::App& app, BoundaryFlags& f) {
    CLI::App* cmd =
        app.add_subcommand("boundary", "evaluate an analytic stability-boundary formula");
    cmd->add_option("--formula", f.formula, "uu-alpha, evenpow-eps1, or evenpow-eps1-m0")
        ->check(CLI::IsMember({"uu-alpha", "evenpow-eps1", "evenpow-eps1-m0"}))
        ->required();
    cmd->add_option("--k", f.k, "feedback gain");
    cmd->add_option("--m", f.m, "controller order m");
    cmd->add_option("--eps", f.eps, "even-channel strength");
    cmd->add_option("--alpha", f.alpha, "dither strength");
    cmd->add_option("--omega", f.omega, "dither frequency")->required();
    cmd->add_option("--x-star", f.x_star, "equilibrium radius for uu-alpha");
    cmd->add_option("--out", f.out, "result JSON path");
    return cmd;
}

void run_boundary(const CLI::App* cmd, const BoundaryFlags& f, RunManifest& man) {
    const auto need = [&](const char* flag) {
        if (cmd->count(flag) == 0)
            throw ConfigError(escna::format("{} is required for formula {}", flag, f.formula));
    };
    man.set_param("formula", f.formula);
    man.set_param("omega", f.omega);

    double value = 0.0;
    if (f.formula == "uu-alpha") {
        need("--k");
        need("--m");
        man.set_param("k", f.k);
        man.set_param("m", f.m);
        man.set_param("eps", f.eps);
        man.set_param("x_star", f.x_star);
        value = esc::equilibrium_boundary_uu(f.k, f.m, f.eps, f.omega, f.x_star);
    } else if (f.formula == "evenpow-eps1") {
        need("--k");
        need("--alpha");
        man.set_param("k", f.k);
        man.set_param("alpha", f.alpha);
        value = esc::epsilon_bound_evenpow(f.k, f.alpha, f.omega);
    } else {
        need("--alpha");
        man.set_param("alpha", f.alpha);
        value = esc::epsilon_bound_m0(f.alpha, f.omega);
    }
    man.set_param("value", value);
    std::printf("%s\n", fmt17(value).c_str());

    if (!f.out.empty()) {
        nlohmann::ordered_json j = man.to_json()["params"];
        write_json_file(j, f.out);
        man.add_output(f.out);
    }
}

} // namespace

int run_cli(std::vector<std::string> args) {
    const std::string manifest_path = manifest_path_from(args);
    RunManifest man(command_from(args));

    CLI::App app{"extremum-seeking control for systems with odd input nonlinearities"};
    app.require_subcommand(1);

    SimulateFlags simulate_flags;
    AverageFlags average_flags;
    CompareFlags compare_flags;
    FitFlags fit_flags;
    SweepFlags sweep_flags;
    VerifyFlags verify_flags;
    BoundaryFlags boundary_flags;

    CLI::App* simulate_cmd = add_simulate(app, simulate_flags);
    CLI::App* average_cmd = add_average(app, average_flags);
    CLI::App* compare_cmd = add_compare(app, compare_flags);
    CLI::App* fit_cmd = add_fit(app, fit_flags);
    CLI::App* sweep_cmd = add_sweep(app, sweep_flags);
    CLI::App* verify_cmd = add_verify(app, verify_flags);
    CLI::App* boundary_cmd = add_boundary(app, boundary_flags);

    std::string manifest_opt = manifest_path;
    for (CLI::App* cmd : {simulate_cmd, average_cmd, compare_cmd, fit_cmd, sweep_cmd, verify_cmd,
                          boundary_cmd})
        cmd->add_option("--manifest", manifest_opt, "manifest JSON path")
            ->capture_default_str();

    int code = 0;
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        if (simulate_cmd->parsed())
            run_simulate(simulate_cmd, simulate_flags, man);
        else if (average_cmd->parsed())
            run_average(average_cmd, average_flags, man);
        else if (compare_cmd->parsed())
            run_compare(compare_flags, man);
        else if (fit_cmd->parsed())
            run_fit(fit_flags, man);
        else if (sweep_cmd->parsed())
            run_sweep_cmd(sweep_cmd, sweep_flags, man);
        else if (verify_cmd->parsed())
            run_verify(verify_flags, man);
        else if (boundary_cmd->parsed())
            run_boundary(boundary_cmd, boundary_flags, man);
    } catch (const CLI::Success& e) {
        return app.exit(e); // --help and friends; not a run, no manifest
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        man.set_error(e.what());
        code = 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        man.set_error(e.what());
        code = 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        man.set_error(e.what());
        code = 1;
    }

    try {
        man.write(manifest_opt);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        if (code == 0) code = 1;
    }
    return code;
}

} // namespace escna::cli
