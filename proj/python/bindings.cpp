// Python bindings for the main operations: vector fields, Lax observables,
// integration, period detection, lifting and both projective schemes.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kdvb/harness.hpp"
#include "kdvb/lax.hpp"

namespace py = pybind11;
using namespace kdvb;

namespace {

State to_state(const std::vector<double>& u) { return State(u); }

py::array_t<double> matrix_to_array(const Matrix& m) {
    const auto n = static_cast<py::ssize_t>(m.size());
    py::array_t<double> out({n, n});
    auto r = out.mutable_unchecked<2>();
    for (py::ssize_t i = 0; i < n; ++i)
        for (py::ssize_t j = 0; j < n; ++j) r(i, j) = m(i, j);
    return out;
}

py::array_t<double> states_to_array(const std::vector<State>& states) {
    const auto rows = static_cast<py::ssize_t>(states.size());
    const auto cols = rows == 0 ? 0 : static_cast<py::ssize_t>(states.front().size());
    py::array_t<double> out({rows, cols});
    auto r = out.mutable_unchecked<2>();
    for (py::ssize_t i = 0; i < rows; ++i)
        for (py::ssize_t j = 0; j < cols; ++j) r(i, j) = states[static_cast<std::size_t>(i)][j];
    return out;
}

py::array_t<double> vectors_to_array(const std::vector<ObservableVector>& values) {
    const auto rows = static_cast<py::ssize_t>(values.size());
    const auto cols = rows == 0 ? 0 : static_cast<py::ssize_t>(values.front().size());
    py::array_t<double> out({rows, cols});
    auto r = out.mutable_unchecked<2>();
    for (py::ssize_t i = 0; i < rows; ++i)
        for (py::ssize_t j = 0; j < cols; ++j)
            r(i, j) = values[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return out;
}

py::dict series_to_dict(const ObservableSeries& series) {
    py::dict d;
    d["times"] = py::array_t<double>(static_cast<py::ssize_t>(series.times.size()),
                                     series.times.data());
    d["values"] = vectors_to_array(series.values);
    d["method"] = method_name(series.method);
    d["rhs_evals"] = series.rhs_eval_count;
    return d;
}

Method parse_method(const std::string& name) {
    if (name == "young_measure" || name == "ym") return Method::young_measure;
    if (name == "equation_free" || name == "ef") return Method::equation_free;
    throw InvalidInput("unknown method '" + name + "' (young_measure or equation_free)");
}

ProjectiveConfig config_from_kwargs(double nu, int euler_step_periods, int averaging_periods,
                                    int steps_per_period) {
    ProjectiveConfig cfg;
    cfg.nu = nu;
    cfg.euler_step_periods = euler_step_periods;
    cfg.averaging_periods = averaging_periods;
    cfg.steps_per_period = steps_per_period;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "fast-slow lattice dynamics: Lax invariants and projective integration";

    py::register_exception<InvalidInput>(m, "InvalidInputError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalFailure", PyExc_RuntimeError);

    m.def("fast_rhs", [](const std::vector<double>& u) { return fast_rhs(to_state(u)); },
          py::arg("u"), "Fast advection field -u_k (u_{k+1} - u_{k-1}), periodic.");
    m.def("diffusion_stencil",
          [](const std::vector<double>& u) { return diffusion_stencil(to_state(u)); },
          py::arg("u"), "Periodic second difference u_{k+1} - 2 u_k + u_{k-1}.");
    m.def("full_rhs",
          [](const std::vector<double>& u, double nu) {
              const State s = to_state(u);
              return full_rhs(s, SystemParams{static_cast<int>(s.size()), nu});
          },
          py::arg("u"), py::arg("nu"), "fast_rhs + nu * diffusion_stencil.");

    m.def("lax_matrix",
          [](const std::vector<double>& u) { return matrix_to_array(lax_matrix(to_state(u))); },
          py::arg("u"));
    m.def("b_matrix",
          [](const std::vector<double>& u) { return matrix_to_array(b_matrix(to_state(u))); },
          py::arg("u"));

    m.def("trace_power",
          [](const std::vector<double>& u, int p) { return trace_power(to_state(u), p); },
          py::arg("u"), py::arg("p"));
    m.def("product_invariants",
          [](const std::vector<double>& u) {
              const ProductInvariants p = product_invariants(to_state(u));
              return py::make_tuple(p.all, p.even, p.odd);
          },
          py::arg("u"), "Returns (full, even-position, odd-position) products.");
    m.def("observable_vector",
          [](const std::vector<double>& u) { return observable_vector(to_state(u)); },
          py::arg("u"), "[tr L^2, tr L^4, ..., tr L^N, prod u].");
    m.def("observable_gradient",
          [](const std::vector<double>& u, int j) { return observable_gradient(to_state(u), j); },
          py::arg("u"), py::arg("j"), "Gradient of observable j (1-based).");
    m.def("drift_integrand",
          [](const std::vector<double>& u, int j) { return drift_integrand(to_state(u), j); },
          py::arg("u"), py::arg("j"));

    m.def("rk4_step",
          [](const std::vector<double>& u, double dt, double nu) {
              const Field f = nu > 0.0 ? full_field(nu) : fast_field();
              return rk4_step(f, to_state(u), dt).vec();
          },
          py::arg("u"), py::arg("dt"), py::arg("nu") = 0.0);

    m.def("integrate",
          [](const std::vector<double>& u, double t_end, double dt, double nu,
             std::int64_t sample_every) {
              const Field f = nu > 0.0 ? full_field(nu) : fast_field();
              const Trajectory traj = integrate_record(f, to_state(u), t_end, dt, sample_every);
              py::dict d;
              d["times"] = py::array_t<double>(static_cast<py::ssize_t>(traj.times.size()),
                                               traj.times.data());
              d["states"] = states_to_array(traj.states);
              d["rhs_evals"] = traj.rhs_evals;
              return d;
          },
          py::arg("u"), py::arg("t_end"), py::arg("dt"), py::arg("nu") = 0.0,
          py::arg("sample_every") = 1,
          "Fixed-step RK4 trajectory; dict with times, states, rhs_evals.");

    m.def("estimate_fast_period",
          [](const std::vector<double>& u, double search_horizon, double dt, double threshold) {
              const PeriodEstimate est =
                  estimate_fast_period(to_state(u), search_horizon, dt, threshold);
              py::dict d;
              d["period"] = est.period;
              d["return_distance"] = est.return_distance;
              d["confident"] = est.confident;
              return d;
          },
          py::arg("u"), py::arg("search_horizon") = 10.0, py::arg("dt") = 1e-3,
          py::arg("threshold") = 0.05);

    m.def("average_drift",
          [](const std::vector<double>& u, double nu, int averaging_periods, int steps_per_period) {
              const ProjectiveConfig cfg =
                  config_from_kwargs(nu, 3, averaging_periods, steps_per_period);
              return average_drift(build_measure(to_state(u), cfg));
          },
          py::arg("u"), py::arg("nu") = 0.0, py::arg("averaging_periods") = 1,
          py::arg("steps_per_period") = 50,
          "Orbit-averaged bare drift of each observable (scale by nu).");

    m.def("lift",
          [](const std::vector<double>& v_target, const std::vector<double>& template_state) {
              return lift(v_target, to_state(template_state)).vec();
          },
          py::arg("v_target"), py::arg("template_state"),
          "State matching the target observables, first N/2-1 components carried over.");

    m.def("run_multiscale",
          [](const std::string& method, const std::vector<double>& u, int total_periods, double nu,
             int euler_step_periods, int averaging_periods, int steps_per_period) {
              const ProjectiveConfig cfg = config_from_kwargs(nu, euler_step_periods,
                                                              averaging_periods, steps_per_period);
              return series_to_dict(
                  run_multiscale(parse_method(method), to_state(u), cfg, total_periods));
          },
          py::arg("method"), py::arg("u"), py::arg("total_periods"), py::arg("nu") = 1e-4,
          py::arg("euler_step_periods") = 3, py::arg("averaging_periods") = 1,
          py::arg("steps_per_period") = 50);

    m.def("run_reference",
          [](const std::vector<double>& u, double nu, double t_end, double dt,
             std::int64_t sample_every) {
              return series_to_dict(run_reference(to_state(u), nu, t_end, dt, sample_every));
          },
          py::arg("u"), py::arg("nu"), py::arg("t_end"), py::arg("dt"),
          py::arg("sample_every") = 1);
}
