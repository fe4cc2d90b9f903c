#include <functional>
#include <span>
#include <string>
#include <vector>

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "escna/averaging.hpp"
#include "escna/avgverify.hpp"
#include "escna/controller.hpp"
#include "escna/defaults.hpp"
#include "escna/error.hpp"
#include "escna/expr.hpp"
#include "escna/integrate.hpp"
#include "escna/nonlinearity.hpp"
#include "escna/oddpoly.hpp"
#include "escna/system.hpp"

namespace py = pybind11;

namespace {

// `system` is a builtin name, or a JSON document when it starts with '{'.
escna::model::NonAffineSystem make_system(const std::string& system, double eps) {
    if (!system.empty() && system.front() == '{') {
        if (eps != 0.0) throw escna::ConfigError("eps applies to builtin systems only");
        return escna::model::load_system_from_string(system);
    }
    return escna::model::builtin(system, eps);
}

escna::esc::EscController make_controller(int m, double alpha, double omega, double k,
                                          const std::string& objective, int dim) {
    escna::expr::VariableSet vars = escna::expr::VariableSet::state_time(dim);
    escna::expr::ExprPtr body = escna::expr::parse_expr(objective, vars);
    return escna::esc::EscController::state_feedback(m, alpha, omega, k, std::move(body),
                                                     std::move(vars));
}

py::dict trajectory_dict(const escna::sim::Trajectory& traj) {
    py::dict d;
    d["times"] = traj.times;
    std::vector<std::vector<double>> states(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto row = traj.state_at(i);
        states[i].assign(row.begin(), row.end());
    }
    d["states"] = states;
    if (traj.has_controls()) d["u"] = traj.controls;
    d["blew_up"] = traj.blew_up;
    return d;
}

} // namespace

PYBIND11_MODULE(escna, m) {
    m.doc() = "extremum-seeking control for systems with odd input nonlinearities";
    m.attr("__version__") = "0.1.0";

    py::register_exception<escna::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<escna::NumericError>(m, "NumericError", PyExc_ArithmeticError);

    m.def("avg_gain_A", [](int order) { return escna::poly::avg_gain_A(order).to_double(); },
          py::arg("m"), "A_m = sum over l of C(2m+1, l)^2");
    m.def("even_gain_B", [](int n) { return escna::poly::even_gain_B(n).to_double(); },
          py::arg("n"), "B_n = C(2n, n)/2^(2n), the mean of cos^(2n)");
    m.def("weak_limit_coeff", &escna::poly::weak_limit_coeff, py::arg("m"), py::arg("l"),
          py::arg("alpha"), "a_{m,l} = alpha C(2m+1, l)^2 / 2^(4m+1)");
    m.def("deadzone", &escna::model::deadzone_saturation, py::arg("u"),
          "built-in deadzone-saturation input map");
    m.def("dither_amplitude", &escna::esc::dither_amplitude, py::arg("alpha"), py::arg("omega"),
          py::arg("m"), "(alpha omega)^(1/(2(2m+1)))");

    m.def(
        "fit_odd_polynomial",
        [](const std::function<double(double)>& h, int order, double half_width, int samples) {
            const escna::poly::FitResult fit =
                escna::poly::fit_odd_polynomial(h, order, half_width, samples);
            return py::make_tuple(fit.poly.coeffs, fit.sup_error);
        },
        py::arg("h"), py::arg("m"), py::arg("U") = 2.0, py::arg("samples") = 401,
        "least-squares odd fit; returns (coefficients of u, u^3, ..., sup_error)");

    m.def(
        "simulate",
        [](const std::string& system, int order, double alpha, double omega, double k,
           const std::string& objective, const std::vector<double>& x0, double t0, double horizon,
           int steps_per_period, double eps) {
            const auto sys = make_system(system, eps);
            const auto c = make_controller(order, alpha, omega, k, objective, sys.dim());
            return trajectory_dict(
                escna::sim::integrate_closed_loop(sys, c, x0, t0, horizon, steps_per_period));
        },
        py::arg("system"), py::arg("m"), py::arg("alpha"), py::arg("omega"), py::arg("k"),
        py::arg("V"), py::arg("x0"), py::arg("t0") = 0.0, py::arg("T") = 1.0,
        py::arg("steps_per_period") = escna::defaults::kStepsPerPeriod, py::arg("eps") = 0.0,
        "integrate the oscillatory closed loop; returns times/states/u/blew_up");

    m.def(
        "average",
        [](const std::string& system, int order, double alpha, double omega, double k,
           const std::string& objective, const std::string& construction,
           const std::vector<double>& x0, double t0, double horizon, int steps, double eps) {
            const auto sys = make_system(system, eps);
            const auto c = make_controller(order, alpha, omega, k, objective, sys.dim());
            if (construction != "theorem1" && construction != "conjecture1")
                throw escna::ConfigError("construction must be theorem1 or conjecture1");
            const auto avg = construction == "theorem1"
                                 ? escna::esc::averaged_system_theorem1(sys, c)
                                 : escna::esc::averaged_system_conjecture(sys, c);
            return trajectory_dict(escna::sim::integrate_averaged(avg, x0, t0, horizon, steps));
        },
        py::arg("system"), py::arg("m"), py::arg("alpha"), py::arg("omega"), py::arg("k"),
        py::arg("V"), py::arg("construction") = "theorem1", py::arg("x0") = std::vector<double>{},
        py::arg("t0") = 0.0, py::arg("T") = 1.0,
        py::arg("steps") = escna::defaults::kAverageSteps, py::arg("eps") = 0.0,
        "integrate the averaged system; returns times/states/blew_up");

    m.def(
        "averaged_field",
        [](const std::string& system, int order, double alpha, double omega, double k,
           const std::string& objective, const std::string& construction,
           const std::vector<double>& x, double t, double eps) {
            const auto sys = make_system(system, eps);
            const auto c = make_controller(order, alpha, omega, k, objective, sys.dim());
            if (construction != "theorem1" && construction != "conjecture1")
                throw escna::ConfigError("construction must be theorem1 or conjecture1");
            const auto avg = construction == "theorem1"
                                 ? escna::esc::averaged_system_theorem1(sys, c)
                                 : escna::esc::averaged_system_conjecture(sys, c);
            std::vector<double> out(static_cast<std::size_t>(avg.dim));
            avg.rhs(t, x, out);
            return out;
        },
        py::arg("system"), py::arg("m"), py::arg("alpha"), py::arg("omega"), py::arg("k"),
        py::arg("V"), py::arg("construction") = "theorem1", py::arg("x") = std::vector<double>{},
        py::arg("t") = 0.0, py::arg("eps") = 0.0,
        "evaluate the averaged vector field at (x, t)");

    m.def(
        "empirical_average_field",
        [](const std::string& system, int order, double alpha, double omega, double k,
           const std::string& objective, const std::vector<double>& x, double t, int periods,
           int steps_per_period, double eps) {
            const auto sys = make_system(system, eps);
            const auto c = make_controller(order, alpha, omega, k, objective, sys.dim());
            return escna::verify::empirical_average_field(sys, c, x, t, periods,
                                                          steps_per_period);
        },
        py::arg("system"), py::arg("m"), py::arg("alpha"), py::arg("omega"), py::arg("k"),
        py::arg("V"), py::arg("x"), py::arg("t") = 0.0,
        py::arg("periods") = escna::defaults::kEmpiricalPeriods,
        py::arg("steps_per_period") = escna::defaults::kEmpiricalStepsPerPeriod,
        py::arg("eps") = 0.0, "mean displacement rate of the closed loop over whole periods");

    m.def("equilibrium_boundary_uu", &escna::esc::equilibrium_boundary_uu, py::arg("k"),
          py::arg("m"), py::arg("eps"), py::arg("omega"), py::arg("x_star"),
          "critical alpha placing the averaged uu equilibrium at x_star");
    m.def("epsilon_bound_evenpow", &escna::esc::epsilon_bound_evenpow, py::arg("k"),
          py::arg("alpha"), py::arg("omega"),
          "largest tolerated even-channel strength for evenpow at m=1");
    m.def("epsilon_bound_m0", &escna::esc::epsilon_bound_m0, py::arg("alpha"), py::arg("omega"),
          "heuristic even-channel bound 1/sqrt(alpha omega) at m=0");

    m.def("builtin_names", &escna::model::builtin_names, "names accepted as builtin systems");
}
