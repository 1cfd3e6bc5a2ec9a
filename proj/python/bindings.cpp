#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "jumpresp/analytic_oracle.hpp"
#include "jumpresp/cli.hpp"
#include "jumpresp/ensemble_mc.hpp"
#include "jumpresp/errors.hpp"
#include "jumpresp/io.hpp"
#include "jumpresp/jump_integrals.hpp"
#include "jumpresp/linalg.hpp"
#include "jumpresp/response_estimators.hpp"
#include "jumpresp/sde_engine.hpp"

namespace py = pybind11;
using namespace jumpresp;

namespace {

// std::variant casters need default-constructible alternatives, so the
// density and law unions are unpacked by hand.
Density to_density(const py::handle& h) {
  if (py::isinstance<GaussianDensity>(h)) return h.cast<GaussianDensity>();
  if (py::isinstance<GaussianMixture>(h)) return h.cast<GaussianMixture>();
  throw py::type_error("expected GaussianDensity or GaussianMixture");
}

JumpLaw to_law(const py::handle& h) {
  if (py::isinstance<DiscreteLaw>(h)) return h.cast<DiscreteLaw>();
  if (py::isinstance<GaussianDensity>(h)) return h.cast<GaussianDensity>();
  if (py::isinstance<GaussianMixture>(h)) return h.cast<GaussianMixture>();
  throw py::type_error("expected DiscreteLaw, GaussianDensity or GaussianMixture");
}

JumpIntegral make_integral(const py::object& p0, const AffineJumpMap& map, const py::object& law,
                           std::optional<IntensityShape> gshape) {
  return JumpIntegral(JumpIntegralSpec{to_density(p0), map, to_law(law), std::move(gshape)});
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Average response of stochastic dynamics to jump perturbations";

  auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  // --- densities and jumps ---
  py::class_<GaussianDensity>(m, "GaussianDensity")
      .def(py::init<Vector, Matrix>(), py::arg("mean"), py::arg("cov"))
      .def_property_readonly("mean", &GaussianDensity::mean)
      .def_property_readonly("cov", &GaussianDensity::cov)
      .def("pdf", &GaussianDensity::pdf)
      .def("log_pdf", &GaussianDensity::log_pdf);

  py::class_<GaussianMixture>(m, "GaussianMixture")
      .def(py::init<std::vector<double>, std::vector<GaussianDensity>>(), py::arg("weights"), py::arg("components"))
      .def_property_readonly("weights", &GaussianMixture::weights)
      .def_property_readonly("components", &GaussianMixture::components)
      .def("pdf", &GaussianMixture::pdf)
      .def("log_pdf", &GaussianMixture::log_pdf);

  py::class_<AffineJumpMap>(m, "AffineJumpMap")
      .def(py::init<Vector, Matrix, Matrix>(), py::arg("h"), py::arg("H"), py::arg("Hstar"))
      .def_static("deterministic", &AffineJumpMap::deterministic, py::arg("h"), py::arg("H"))
      .def_static("shift", &AffineJumpMap::shift, py::arg("h"))
      .def_property_readonly("h", &AffineJumpMap::h)
      .def_property_readonly("H", &AffineJumpMap::H)
      .def_property_readonly("Hstar", &AffineJumpMap::Hstar)
      .def("apply", [](const AffineJumpMap& map, const Vector& x, const Vector& z) { return Vector(apply_jump(map, x, z)); },
           py::arg("x"), py::arg("z") = Vector(0))
      .def("invert", [](const AffineJumpMap& map, const Vector& x, const Vector& z) {
             const InverseJump inv = invert_jump(map, x, z);
             return py::make_tuple(Vector(inv.xhat), inv.jacobian);
           }, py::arg("x"), py::arg("z") = Vector(0));

  py::class_<DiscreteLaw>(m, "DiscreteLaw")
      .def(py::init<std::vector<Vector>, std::vector<double>>(), py::arg("atoms"), py::arg("probs"));

  py::class_<TimeProfile>(m, "TimeProfile")
      .def_static("constant", &TimeProfile::constant, py::arg("value") = 1.0)
      .def_static("table", &TimeProfile::table, py::arg("points"))
      .def("__call__", &TimeProfile::operator());

  py::class_<IntensityShape>(m, "IntensityShape")
      .def_static("constant", &IntensityShape::constant)
      .def_static("bump", &IntensityShape::bump, py::arg("center"), py::arg("cov"))
      .def_static("bump_mixture", &IntensityShape::bump_mixture, py::arg("weights"), py::arg("bumps"))
      .def("__call__", [](const IntensityShape& g, const Vector& x) { return g(x); })
      .def("supremum", &IntensityShape::supremum);

  py::class_<IntensityModel>(m, "IntensityModel")
      .def(py::init<double, TimeProfile, IntensityShape>(), py::arg("alpha"), py::arg("eta") = TimeProfile::constant(1.0),
           py::arg("gshape") = IntensityShape::constant())
      .def_property_readonly("alpha", &IntensityModel::alpha);

  // --- models and trajectories ---
  py::class_<ModelSpec>(m, "ModelSpec")
      .def_static("ou", &ModelSpec::ou, py::arg("L"), py::arg("G"))
      .def_static("double_well", &ModelSpec::double_well, py::arg("sigma"))
      .def_static("lorenz96", &ModelSpec::lorenz96, py::arg("K"), py::arg("forcing"), py::arg("sigma") = 0.0)
      .def_property_readonly("dim", &ModelSpec::dim)
      .def_property_readonly("name", &ModelSpec::name);

  py::class_<Trajectory>(m, "Trajectory")
      .def(py::init([](double dt, const StateMatrix& states) { return Trajectory(dt, states); }), py::arg("dt"),
           py::arg("states"))
      .def_property_readonly("dt", &Trajectory::dt)
      .def_property_readonly("states", &Trajectory::states)
      .def("__len__", &Trajectory::size)
      .def("tail", &Trajectory::tail);

  py::class_<TestFunction>(m, "TestFunction")
      .def_static("identity", &TestFunction::identity)
      .def_static("component", &TestFunction::component)
      .def_static("quadratic", &TestFunction::quadratic)
      .def_static("energy", &TestFunction::energy)
      .def("__repr__", &TestFunction::describe);

  py::class_<ResponseCurve>(m, "ResponseCurve")
      .def(py::init<>())
      .def_readwrite("lags", &ResponseCurve::lags)
      .def_readwrite("values", &ResponseCurve::values)
      .def_readwrite("std_error", &ResponseCurve::std_error);

  m.def("simulate_unperturbed", &simulate_unperturbed, py::arg("model"), py::arg("x0"), py::arg("dt"),
        py::arg("nsteps"), py::arg("seed"));
  m.def("simulate_ou_exact", &simulate_ou_exact, py::arg("L"), py::arg("G"), py::arg("x0"), py::arg("dt"),
        py::arg("nsteps"), py::arg("seed"));
  m.def("fit_quasi_gaussian", &fit_quasi_gaussian, py::arg("trajectory"));
  m.def("fit_gaussian_mixture", &fit_gaussian_mixture, py::arg("trajectory"), py::arg("components"),
        py::arg("max_iterations") = 500, py::arg("max_samples") = 200000);
  m.def("read_trajectory", &read_trajectory, py::arg("path"));
  m.def("write_trajectory", &write_trajectory, py::arg("path"), py::arg("trajectory"));
  m.def("read_curve", &read_curve, py::arg("path"));
  m.def("write_curve", py::overload_cast<const std::string&, const ResponseCurve&>(&write_curve), py::arg("path"),
        py::arg("curve"));

  // --- linear algebra ---
  m.def("solve_lyapunov", &solve_lyapunov, py::arg("L"), py::arg("Q"));
  m.def("matrix_exponential", &matrix_exponential, py::arg("A"), py::arg("t") = 1.0);
  m.def("ou_stationary_covariance", &ou_stationary_covariance, py::arg("L"), py::arg("G"));

  // --- jump integrals ---
  py::class_<JumpIntegral>(m, "JumpIntegral")
      .def(py::init(&make_integral), py::arg("p0"), py::arg("map"), py::arg("law"),
           py::arg("gshape") = std::optional<IntensityShape>())
      .def("__call__", [](const JumpIntegral& J, const Vector& x) { return J(x); })
      .def("quadrature", [](const JumpIntegral& J, const Vector& x, int n) { return eval_J_quadrature(J.spec(), x, n); },
           py::arg("x"), py::arg("n_nodes") = 40);

  // --- estimators ---
  py::class_<EstimatorOptions>(m, "EstimatorOptions")
      .def(py::init<>())
      .def_readwrite("batch_length", &EstimatorOptions::batch_length)
      .def_readwrite("tcorr", &EstimatorOptions::tcorr)
      .def_readwrite("max_skip_fraction", &EstimatorOptions::max_skip_fraction);

  m.def("det_jump_response",
        [](const Trajectory& traj, const py::object& p0, const AffineJumpMap& map, const TestFunction& psi,
           const std::vector<double>& lags, const EstimatorOptions& opts) {
          return det_jump_response(traj, to_density(p0), map, psi, lags, opts);
        },
        py::arg("trajectory"), py::arg("p0"), py::arg("map"), py::arg("psi"), py::arg("lags"),
        py::arg("options") = EstimatorOptions{});
  m.def("random_jump_response",
        [](const Trajectory& traj, const py::object& p0, const JumpIntegral& J, const TestFunction& psi,
           const std::vector<double>& lags, const EstimatorOptions& opts) {
          return random_jump_response(traj, to_density(p0), J, psi, lags, opts);
        },
        py::arg("trajectory"), py::arg("p0"), py::arg("J"), py::arg("psi"), py::arg("lags"),
        py::arg("options") = EstimatorOptions{});
  m.def("response_operator",
        [](const Trajectory& traj, const py::object& p0, const JumpIntegral& Jg, const IntensityShape& g,
           const TestFunction& psi, const std::vector<double>& lags, const EstimatorOptions& opts) {
          return response_operator(traj, to_density(p0), Jg, g, psi, lags, opts);
        },
        py::arg("trajectory"), py::arg("p0"), py::arg("Jg"), py::arg("gshape"), py::arg("psi"), py::arg("lags"),
        py::arg("options") = EstimatorOptions{});
  m.def("convolve_response", &convolve_response, py::arg("R"), py::arg("eta"), py::arg("alpha"), py::arg("tgrid"));
  m.def("estimate_tcorr", &estimate_tcorr, py::arg("trajectory"));
  m.def("accuracy_diagnostic", [](double alpha, double tcorr) {
          const AccuracyDiagnostic d = accuracy_diagnostic(alpha, tcorr);
          return py::make_tuple(d.ratio, to_string(d.verdict));
        }, py::arg("alpha"), py::arg("tcorr"));

  // --- analytic OU ---
  py::class_<OUParams>(m, "OUParams")
      .def(py::init<Matrix, Matrix>(), py::arg("L"), py::arg("G"))
      .def_property_readonly("cov", &OUParams::cov);
  m.def("ou_mean_response_det", &ou_mean_response_det, py::arg("ou"), py::arg("map"), py::arg("tgrid"));
  m.def("ou_mean_response_random",
        [](const OUParams& ou, const AffineJumpMap& map, const py::object& law, const std::vector<double>& t) {
          return ou_mean_response_random(ou, map, to_law(law), t);
        },
        py::arg("ou"), py::arg("map"), py::arg("law"), py::arg("tgrid"));
  m.def("ou_response_operator",
        [](const OUParams& ou, const AffineJumpMap& map, const py::object& law, const IntensityShape& g,
           const std::vector<double>& t) { return ou_response_operator(ou, map, to_law(law), g, t); },
        py::arg("ou"), py::arg("map"), py::arg("law"), py::arg("gshape"), py::arg("tgrid"));
  m.def("ou_exact_perturbed_mean", [](const OUParams& ou, const AffineJumpMap& map, const Vector& zbar, double alpha,
                                      const std::vector<double>& t) {
          PerturbedMean p = ou_exact_perturbed_mean(ou, map, zbar, alpha, t);
          return py::make_tuple(p.curve, p.unbounded);
        }, py::arg("ou"), py::arg("map"), py::arg("zbar"), py::arg("alpha"), py::arg("tgrid"));
  m.def("ou_leading_order_mean", &ou_leading_order_mean, py::arg("ou"), py::arg("map"), py::arg("zbar"),
        py::arg("alpha"), py::arg("tgrid"));
  m.def("leading_order_gap", &leading_order_gap, py::arg("ou"), py::arg("map"), py::arg("zbar"), py::arg("alpha"));

  // --- Monte Carlo ---
  py::class_<EnsembleConfig>(m, "EnsembleConfig")
      .def(py::init<>())
      .def_readwrite("members", &EnsembleConfig::members)
      .def_readwrite("dt", &EnsembleConfig::dt)
      .def_readwrite("horizon", &EnsembleConfig::horizon)
      .def_readwrite("seed", &EnsembleConfig::seed)
      .def_readwrite("common_noise", &EnsembleConfig::common_noise)
      .def_readwrite("output_stride", &EnsembleConfig::output_stride)
      .def_readwrite("threads", &EnsembleConfig::threads)
      .def_readwrite("burn_in", &EnsembleConfig::burn_in)
      .def_readwrite("thin", &EnsembleConfig::thin)
      .def_readwrite("pilot_steps", &EnsembleConfig::pilot_steps);
  m.def("mc_det_jump_response", &mc_det_jump_response, py::arg("model"), py::arg("map"), py::arg("psi"),
        py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("mc_random_jump_response",
        [](const ModelSpec& model, const AffineJumpMap& map, const py::object& law, const TestFunction& psi,
           const EnsembleConfig& cfg) {
          const JumpLaw l = to_law(law);
          py::gil_scoped_release release;
          return mc_random_jump_response(model, map, l, psi, cfg);
        },
        py::arg("model"), py::arg("map"), py::arg("law"), py::arg("psi"), py::arg("config"));
  m.def("mc_random_time_response",
        [](const ModelSpec& model, const AffineJumpMap& map, const py::object& law, const IntensityModel& intensity,
           const TestFunction& psi, const EnsembleConfig& cfg) {
          const JumpLaw l = to_law(law);
          py::gil_scoped_release release;
          return mc_random_time_response(model, map, l, intensity, psi, cfg);
        },
        py::arg("model"), py::arg("map"), py::arg("law"), py::arg("intensity"), py::arg("psi"), py::arg("config"));

  m.def("run_cli", [](const std::vector<std::string>& args) {
          std::ostringstream out, log;
          const int code = run_cli(args, out, log);
          return py::make_tuple(code, out.str(), log.str());
        }, py::arg("args"), "Runs the command-line tool in process; returns (exit_code, stdout, log).");
  (void)validation;
}
