#include <doctest.h>

#include <cmath>

#include "helpers.hpp"

using namespace cbdcnk;
using cbdcnk::testing::baseline_fixture;

TEST_CASE("compensating fraction: trivial and closed-form cases") {
  const auto& fx = baseline_fixture();
  CHECK(compensating_fraction(-100.0, -100.0, fx.ss) == doctest::Approx(0.0));

  // sigma = 1: gap of ln(1.01)/(1-beta) is exactly one percent.
  double gap = std::log(1.01) / (1.0 - fx.cal.beta);
  CHECK(compensating_fraction(-100.0, -100.0 + gap, fx.ss) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(compensating_fraction(-100.0 + gap, -100.0, fx.ss) < 0.0);
}

TEST_CASE("compensating fraction with sigma != 1 solves the scaling equation") {
  Calibration cal = baseline_fixture().cal;
  cal.sigma = 2.0;
  ModelVariant variant{BankingStructure::monopolist, CbdcRateRegime::taylor_rule};
  SteadyState ss = solve_steady_state(cal, variant);
  double w_ref = ss[kWelfare];
  double delta_true = 0.017;
  double w_alt = w_ref + (utility_flow((1 + delta_true) * ss[kC], (1 + delta_true) * ss[kZ],
                                       ss[kL], cal) -
                          utility_flow(ss[kC], ss[kZ], ss[kL], cal)) /
                             (1.0 - cal.beta);
  CHECK(compensating_fraction(w_ref, w_alt, ss) ==
        doctest::Approx(100 * delta_true).epsilon(1e-6));
}

TEST_CASE("zero shock variances make conditional welfare the deterministic value") {
  Calibration cal = baseline_fixture().cal;
  cal.sigma_shocks = {0, 0, 0, 0, 0, 0, 0};
  ModelVariant variant{BankingStructure::monopolist, CbdcRateRegime::taylor_rule};
  WelfareResult w = conditional_welfare(cal, variant);
  SteadyState ss = solve_steady_state(cal, variant);
  double expected = utility_flow(ss[kC], ss[kZ], ss[kL], cal) / (1.0 - cal.beta);
  CHECK(w.determinate);
  CHECK(w.welfare == doctest::Approx(expected).epsilon(1e-12));
  CHECK(w.welfare == doctest::Approx(ss[kWelfare]).epsilon(1e-12));
}

TEST_CASE("indeterminate rules return a penalized marker instead of crashing") {
  Calibration cal = baseline_fixture().cal;
  cal.sigma_shocks = welfare_shock_sigmas();
  ModelVariant fixed{BankingStructure::monopolist, CbdcRateRegime::fixed_gross_rate_one};
  WelfareEvaluator ev(cal, fixed);
  WelfareResult bad = ev.conditional_welfare(TaylorCoefficients{0.0, 0.0, 0.0}, cal.cbdc_rule);
  CHECK_FALSE(bad.determinate);
  CHECK(std::isinf(bad.welfare));
  CHECK(bad.welfare < 0);

  WelfareResult good = ev.conditional_welfare(cal.bond_rule, cal.cbdc_rule);
  CHECK(good.determinate);
  CHECK(std::isfinite(good.welfare));
}

TEST_CASE("Taylor-rule CBDC beats the fixed rate under baseline coefficients and bond rule") {
  Calibration cal = baseline_fixture().cal;
  cal.sigma_shocks = welfare_shock_sigmas();
  ModelVariant fixed{BankingStructure::monopolist, CbdcRateRegime::fixed_gross_rate_one};
  ModelVariant taylor{BankingStructure::monopolist, CbdcRateRegime::taylor_rule};
  WelfareResult wf = conditional_welfare(cal, fixed);
  WelfareResult wt = conditional_welfare(cal, taylor);
  CHECK(wf.determinate);
  CHECK(wt.determinate);
  CHECK(wt.welfare > wf.welfare);
}

TEST_CASE("small-grid optimizer finds the corner and never returns infeasible points") {
  Calibration cal = baseline_fixture().cal;
  cal.sigma_shocks = welfare_shock_sigmas();
  ModelVariant fixed{BankingStructure::monopolist, CbdcRateRegime::fixed_gross_rate_one};
  OptimizeOptions opts;
  opts.grid_pi = 3;
  opts.grid_y = 3;
  opts.grid_rho = 2;
  opts.refine_from_best = 1;
  opts.step_floor = 1e-2;
  opts.max_refine_evals = 60;
  opts.workers = 2;
  OptimizationResult res = optimize_rule(cal, fixed, WhichRule::bond, RuleBounds{}, opts);
  CHECK(std::isfinite(res.best_welfare));
  CHECK(res.best.theta_pi == doctest::Approx(4.0).epsilon(1e-9));  // corner solution
  CHECK(res.best.theta_y >= 0.0);
  CHECK(res.best.rho >= 0.0);
  CHECK(res.best.rho <= 0.99);
  CHECK(res.boundary_solution);
  CHECK(res.evaluations >= 18);

  // The grid contains indeterminate points (theta_pi = 0 column); the returned
  // point must be determinate with welfare at least as good as any probe.
  WelfareEvaluator ev(cal, fixed);
  WelfareResult at_best = ev.conditional_welfare(res.best, cal.cbdc_rule);
  CHECK(at_best.determinate);
  CHECK(at_best.welfare == doctest::Approx(res.best_welfare).epsilon(1e-12));
}

TEST_CASE("CBDC rate smoothing is undesirable at the optimized responses") {
  // Fine rho grid with the response coefficients held at the baseline-spec
  // optimum; no smoothing level may beat rho = 0 beyond tolerance.
  Calibration cal = baseline_fixture().cal;
  cal.sigma_shocks = welfare_shock_sigmas();
  cal.bond_rule = {0.0, 4.0, 0.0};  // step-1 shape
  ModelVariant taylor{BankingStructure::monopolist, CbdcRateRegime::taylor_rule};
  WelfareEvaluator ev(cal, taylor);
  TaylorCoefficients cbdc{0.0, 0.7289, 2.0};
  double at_zero = ev.conditional_welfare(cal.bond_rule, cbdc).welfare;
  for (double rho : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99}) {
    TaylorCoefficients c = cbdc;
    c.rho = rho;
    double w = ev.conditional_welfare(cal.bond_rule, c).welfare;
    CHECK(w <= at_zero + 1e-8);
  }
}

TEST_CASE("welfare evaluation is reproducible bit for bit") {
  Calibration cal = baseline_fixture().cal;
  cal.sigma_shocks = welfare_shock_sigmas();
  ModelVariant taylor{BankingStructure::monopolist, CbdcRateRegime::taylor_rule};
  WelfareEvaluator ev(cal, taylor);
  double a = ev.conditional_welfare(cal.bond_rule, cal.cbdc_rule).welfare;
  double b = ev.conditional_welfare(cal.bond_rule, cal.cbdc_rule).welfare;
  CHECK(a == b);
}
