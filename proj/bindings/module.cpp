#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cbdcnk/csv.hpp"
#include "cbdcnk/welfare.hpp"

namespace py = pybind11;
using namespace cbdcnk;

namespace {

Calibration cal_from_kwargs(Calibration cal, const py::kwargs& kwargs) {
  for (auto item : kwargs) {
    std::string key = py::cast<std::string>(item.first);
    double value = py::cast<double>(item.second);
    if (key == "beta") cal.beta = value;
    else if (key == "sigma") cal.sigma = value;
    else if (key == "psi") cal.psi = value;
    else if (key == "iota") cal.iota = value;
    else if (key == "v") cal.v = value;
    else if (key == "xi") cal.xi = value;
    else if (key == "lambda_bar") cal.lambda_bar = value;
    else if (key == "eps_bar") cal.eps_bar = value;
    else if (key == "phi") cal.phi = value;
    else if (key == "varphi") cal.varphi = value;
    else if (key == "e_bank") cal.e_bank = value;
    else if (key == "alpha") cal.alpha = value;
    else if (key == "delta") cal.delta = value;
    else if (key == "theta_calvo") cal.theta_calvo = value;
    else if (key == "eta_bar") cal.eta_bar = value;
    else if (key == "theta_c") cal.theta_c = value;
    else if (key == "a_bar") cal.a_bar = value;
    else if (key == "mu_r") cal.mu_r = value;
    else if (key == "mu_m") cal.mu_m = value;
    else if (key == "g_bar") cal.g_bar = value;
    else if (key == "pi_bar") cal.pi_bar = value;
    else if (key == "R_r_bar") cal.R_r_bar = value;
    else if (key == "R_m_bar") cal.R_m_bar = value;
    else throw ConfigError("unknown calibration field: " + key);
  }
  return cal;
}

ModelVariant variant_of(const std::string& banking, const std::string& regime) {
  ModelVariant v;
  if (banking == "monopolist") v.banking = BankingStructure::monopolist;
  else if (banking == "competitive") v.banking = BankingStructure::competitive;
  else throw ConfigError("banking must be monopolist or competitive");
  if (regime == "taylor_rule") v.cbdc_rate_regime = CbdcRateRegime::taylor_rule;
  else if (regime == "fixed_gross_rate_one") v.cbdc_rate_regime = CbdcRateRegime::fixed_gross_rate_one;
  else throw ConfigError("regime must be taylor_rule or fixed_gross_rate_one");
  return v;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "New Keynesian CBDC/banking model engine";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<SolverError>(m, "SolverError");
  py::register_exception<BlanchardKahnError>(m, "BlanchardKahnError");

  py::class_<TaylorCoefficients>(m, "TaylorCoefficients")
      .def(py::init([](double theta_pi, double theta_y, double rho) {
             return TaylorCoefficients{rho, theta_pi, theta_y};
           }),
           py::arg("theta_pi") = 1.5, py::arg("theta_y") = 0.2, py::arg("rho") = 0.5)
      .def_readwrite("rho", &TaylorCoefficients::rho)
      .def_readwrite("theta_pi", &TaylorCoefficients::theta_pi)
      .def_readwrite("theta_y", &TaylorCoefficients::theta_y)
      .def("__repr__", [](const TaylorCoefficients& t) {
        return "TaylorCoefficients(theta_pi=" + format_number(t.theta_pi) +
               ", theta_y=" + format_number(t.theta_y) + ", rho=" + format_number(t.rho) + ")";
      });

  m.def("baseline_calibration_dict", [] {
    Calibration c = baseline_calibration();
    py::dict d;
    d["beta"] = c.beta; d["sigma"] = c.sigma; d["psi"] = c.psi; d["iota"] = c.iota;
    d["v"] = c.v; d["xi"] = c.xi; d["lambda_bar"] = c.lambda_bar; d["eps_bar"] = c.eps_bar;
    d["phi"] = c.phi; d["varphi"] = c.varphi; d["e_bank"] = c.e_bank; d["alpha"] = c.alpha;
    d["delta"] = c.delta; d["theta_calvo"] = c.theta_calvo; d["eta_bar"] = c.eta_bar;
    d["theta_c"] = c.theta_c; d["a_bar"] = c.a_bar; d["mu_r"] = c.mu_r; d["mu_m"] = c.mu_m;
    d["g_bar"] = c.g_bar; d["pi_bar"] = c.pi_bar; d["R_r_bar"] = c.R_r_bar; d["R_m_bar"] = c.R_m_bar;
    return d;
  });

  m.def("variable_names", [] { return variable_set().names; });

  m.def(
      "utility_flow",
      [](double c, double z, double l, const py::kwargs& kwargs) {
        return utility_flow(c, z, l, cal_from_kwargs(baseline_calibration(), kwargs));
      },
      "Per-period utility at the baseline calibration (fields overridable via kwargs)");

  m.def(
      "steady_state",
      [](const std::string& banking, const std::string& regime, bool calibrate,
         const py::kwargs& kwargs) {
        Calibration cal = cal_from_kwargs(baseline_calibration(), kwargs);
        if (calibrate) cal = calibrate_internal_parameters(cal, CalibrationTargets{});
        SteadyState ss = solve_steady_state(cal, variant_of(banking, regime));
        py::dict d;
        const VariableSet& vs = variable_set();
        for (int i = 0; i < vs.num_vars(); ++i) d[vs.names[i].c_str()] = ss.values[i];
        return d;
      },
      py::arg("banking") = "monopolist", py::arg("regime") = "taylor_rule",
      py::arg("calibrate") = true);

  m.def(
      "irf",
      [](const std::string& shock, double size_log, int horizon, const std::string& banking,
         const std::string& regime, int order, const std::string& preset,
         const py::kwargs& kwargs) {
        Calibration cal = cal_from_kwargs(baseline_calibration(), kwargs);
        cal = calibrate_internal_parameters(cal, CalibrationTargets{});
        cal.sigma_shocks = shock_sigma_preset(preset);
        SteadyState ss = solve_steady_state(cal, variant_of(banking, regime));
        Derivatives d = differentiate(ss.make_system(), ss);
        FirstOrderSolution fo = solve_first_order(d, ss);
        IrfResult r;
        if (order >= 2) {
          SecondOrderSolution so = solve_second_order(d, fo, diagonal_shock_cov(cal.sigma_shocks));
          r = compute_irf(so, shock, size_log, horizon);
        } else {
          r = compute_irf(fo, shock, size_log, horizon);
        }
        py::dict out;
        out["columns"] = r.columns;
        out["display"] = r.display;
        out["level_dev"] = r.level_dev;
        return out;
      },
      py::arg("shock") = "lambda", py::arg("size_log") = 0.22314355131420976,
      py::arg("horizon") = 40, py::arg("banking") = "monopolist",
      py::arg("regime") = "taylor_rule", py::arg("order") = 1, py::arg("preset") = "zero");

  m.def(
      "conditional_welfare",
      [](const std::string& banking, const std::string& regime, const py::kwargs& kwargs) {
        Calibration cal = cal_from_kwargs(baseline_calibration(), kwargs);
        cal = calibrate_internal_parameters(cal, CalibrationTargets{});
        cal.sigma_shocks = welfare_shock_sigmas();
        WelfareResult w = conditional_welfare(cal, variant_of(banking, regime));
        py::dict d;
        d["welfare"] = w.welfare;
        d["determinate"] = w.determinate;
        return d;
      },
      py::arg("banking") = "monopolist", py::arg("regime") = "fixed_gross_rate_one");

  m.def(
      "optimize_rule",
      [](const std::string& rule, const std::string& banking, const std::string& regime,
         int workers, const py::kwargs& kwargs) {
        Calibration cal = cal_from_kwargs(baseline_calibration(), kwargs);
        cal = calibrate_internal_parameters(cal, CalibrationTargets{});
        cal.sigma_shocks = welfare_shock_sigmas();
        OptimizeOptions opts;
        if (workers > 0) opts.workers = workers;
        OptimizationResult res = optimize_rule(cal, variant_of(banking, regime),
                                               rule == "cbdc" ? WhichRule::cbdc : WhichRule::bond,
                                               RuleBounds{}, opts);
        py::dict d;
        d["theta_pi"] = res.best.theta_pi;
        d["theta_y"] = res.best.theta_y;
        d["rho"] = res.best.rho;
        d["welfare"] = res.best_welfare;
        d["evaluations"] = res.evaluations;
        d["boundary"] = res.boundary_solution;
        return d;
      },
      py::arg("rule") = "bond", py::arg("banking") = "monopolist",
      py::arg("regime") = "fixed_gross_rate_one", py::arg("workers") = 0);

  m.def(
      "simulate",
      [](int periods, unsigned long seed, const std::string& banking, const std::string& regime,
         const std::string& preset, const py::kwargs& kwargs) {
        Calibration cal = cal_from_kwargs(baseline_calibration(), kwargs);
        cal = calibrate_internal_parameters(cal, CalibrationTargets{});
        cal.sigma_shocks = shock_sigma_preset(preset);
        SteadyState ss = solve_steady_state(cal, variant_of(banking, regime));
        Derivatives d = differentiate(ss.make_system(), ss);
        FirstOrderSolution fo = solve_first_order(d, ss);
        SecondOrderSolution so = solve_second_order(d, fo, diagonal_shock_cov(cal.sigma_shocks));
        return simulate(so, periods, seed).levels;
      },
      py::arg("periods") = 200, py::arg("seed") = 42, py::arg("banking") = "monopolist",
      py::arg("regime") = "taylor_rule", py::arg("preset") = "welfare");

  m.def("compensating_fraction", [](double w_ref, double w_alt, const std::string& banking,
                                    const std::string& regime) {
    Calibration cal = calibrate_internal_parameters(baseline_calibration(), CalibrationTargets{});
    SteadyState ss = solve_steady_state(cal, variant_of(banking, regime));
    return compensating_fraction(w_ref, w_alt, ss);
  }, py::arg("w_ref"), py::arg("w_alt"), py::arg("banking") = "monopolist",
     py::arg("regime") = "fixed_gross_rate_one");
}
