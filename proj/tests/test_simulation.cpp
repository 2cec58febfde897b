#include <doctest.h>

#include <cmath>

#include "helpers.hpp"

using namespace cbdcnk;
using cbdcnk::testing::baseline_fixture;

namespace {

const SecondOrderSolution& welfare_solution() {
  static const SecondOrderSolution so = solve_second_order(
      baseline_fixture().derivs, baseline_fixture().first,
      diagonal_shock_cov(welfare_shock_sigmas()));
  return so;
}

}  // namespace

TEST_CASE("IRF fencepost: horizon 40 gives 41 rows") {
  IrfResult irf = compute_irf(baseline_fixture().first, "lambda", std::log(1.25), 40);
  CHECK(irf.display.rows() == 41);
  CHECK(irf.level_dev.rows() == 41);
  CHECK(irf.columns.size() == kNumVars + 1);
  CHECK(irf.columns.back() == "m_over_n");
  CHECK_THROWS_AS(compute_irf(baseline_fixture().first, "lambda", 0.1, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(compute_irf(baseline_fixture().first, "not_a_shock", 0.1, 10), ConfigError);
}

TEST_CASE("first-order IRFs are homogeneous of degree one in the impulse") {
  const auto& fo = baseline_fixture().first;
  IrfResult a = compute_irf(fo, "a", 0.01, 30);
  IrfResult b = compute_irf(fo, "a", 0.02, 30);
  CHECK((2.0 * a.level_dev - b.level_dev).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("IRFs decay to stationarity over 400 quarters") {
  const auto& fo = baseline_fixture().first;
  for (const char* shock : {"lambda", "eps", "a", "g", "eta", "e_R", "e_m"}) {
    IrfResult irf = compute_irf(fo, shock, std::log(1.25), 400);
    CHECK(irf.display.row(400).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("reserve spread never moves") {
  const auto& fo = baseline_fixture().first;
  for (const char* shock : {"lambda", "eps", "a", "g", "eta", "e_R", "e_m"}) {
    IrfResult irf = compute_irf(fo, shock, std::log(1.25), 40);
    CHECK(irf.display.col(irf.column_of("chi_r")).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("mirrored CBDC Taylor coefficients keep the CBDC spread constant") {
  const auto& fo = baseline_fixture().first;  // cbdc_rule mirrors bond_rule
  IrfResult irf = compute_irf(fo, "lambda", std::log(1.25), 40);
  CHECK(irf.display.col(irf.column_of("chi_m")).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("substitutability shock: deposits fall harder and CBDC rises") {
  const auto& fo = baseline_fixture().first;
  IrfResult lam = compute_irf(fo, "lambda", std::log(1.25), 40);
  IrfResult eps = compute_irf(fo, "eps", std::log(1.25), 40);
  double n_under_lam = lam.impact("n");
  double n_under_eps = eps.impact("n");
  CHECK(n_under_eps < n_under_lam);  // falls by more
  CHECK(n_under_eps < 0.0);
  CHECK(eps.impact("m") > 0.0);  // substitution toward CBDC
}

TEST_CASE("competitive banks mute the substitutability shock") {
  Calibration cal = baseline_fixture().cal;
  ModelVariant comp{BankingStructure::competitive, CbdcRateRegime::taylor_rule};
  SteadyState ss = solve_steady_state(cal, comp);
  Derivatives d = differentiate(ss.make_system(), ss);
  FirstOrderSolution fo = solve_first_order(d, ss);
  IrfResult mono = compute_irf(baseline_fixture().first, "eps", std::log(1.25), 40);
  IrfResult cb = compute_irf(fo, "eps", std::log(1.25), 40);
  for (const char* var : {"y", "c", "l", "pi"}) {
    double m = mono.display.col(mono.column_of(var)).cwiseAbs().maxCoeff();
    double c = cb.display.col(cb.column_of(var)).cwiseAbs().maxCoeff();
    CHECK(c < 0.2 * m);
  }
}

TEST_CASE("fixed-rate CBDC overlay: spread tracks the bond rate and CBDC falls harder") {
  Calibration cal = baseline_fixture().cal;
  ModelVariant fixed{BankingStructure::monopolist, CbdcRateRegime::fixed_gross_rate_one};
  SteadyState ss = solve_steady_state(cal, fixed);
  Derivatives d = differentiate(ss.make_system(), ss);
  FirstOrderSolution fo = solve_first_order(d, ss);
  IrfResult fx = compute_irf(fo, "lambda", std::log(1.25), 40);
  IrfResult ty = compute_irf(baseline_fixture().first, "lambda", std::log(1.25), 40);

  // Taylor-rule CBDC: spread constant; fixed rate: spread moves with the bond rate.
  CHECK(ty.display.col(ty.column_of("chi_m")).cwiseAbs().maxCoeff() < 1e-9);
  double chi_m_fixed = fx.impact("chi_m");
  double r_bond_fixed = fx.impact("R_bond");
  CHECK(chi_m_fixed > 0.0);
  CHECK(r_bond_fixed > 0.0);
  // chi_m = 1 - R_m/R with R_m constant: d chi_m = dR / R^2.
  CHECK(chi_m_fixed ==
        doctest::Approx(r_bond_fixed / (ss[kRBond] * ss[kRBond])).epsilon(1e-6));

  // CBDC quantity decreases more when it is non-interest-bearing.
  CHECK(fx.impact("m") < ty.impact("m"));
  CHECK(fx.impact("m") < 0.0);
}

TEST_CASE("overlay requires aligned runs and reports zero difference for clones") {
  const auto& fo = baseline_fixture().first;
  IrfResult a = compute_irf(fo, "lambda", std::log(1.25), 20);
  IrfResult b = a;
  a.variant_label = "x";
  b.variant_label = "y";
  IrfOverlay ov = overlay_irfs({a, b});
  CHECK(ov.labels.size() == 2);
  CHECK((ov.display[0] - ov.display[1]).cwiseAbs().maxCoeff() == 0.0);

  IrfResult c = compute_irf(fo, "lambda", std::log(1.25), 21);
  CHECK_THROWS_AS(overlay_irfs({a, c}), std::invalid_argument);
  IrfResult d2 = compute_irf(fo, "a", std::log(1.25), 20);
  CHECK_THROWS_AS(overlay_irfs({a, d2}), std::invalid_argument);
}

TEST_CASE("second-order IRF differs from first order but matches its scale") {
  IrfResult i1 = compute_irf(baseline_fixture().first, "lambda", std::log(1.25), 20);
  IrfResult i2 = compute_irf(welfare_solution(), "lambda", std::log(1.25), 20);
  double c1 = i1.impact("c");
  double c2 = i2.impact("c");
  CHECK(c1 != c2);
  CHECK(std::abs(c2 - c1) < 0.5 * std::abs(c1) + 0.05);
}

TEST_CASE("simulation is deterministic given the seed") {
  SimulationResult a = simulate(welfare_solution(), 500, 777);
  SimulationResult b = simulate(welfare_solution(), 500, 777);
  SimulationResult c = simulate(welfare_solution(), 500, 778);
  CHECK((a.levels - b.levels).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.levels - c.levels).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("zero standard deviations give a constant simulated path") {
  const auto& fx = baseline_fixture();
  Eigen::MatrixXd zero_cov = Eigen::MatrixXd::Zero(kNumShocks, kNumShocks);
  SecondOrderSolution so = solve_second_order(fx.derivs, fx.first, zero_cov);
  SimulationResult sim = simulate(so, 50, 5);
  for (int t = 0; t < sim.levels.rows(); ++t)
    CHECK((sim.levels.row(t).transpose() - fx.ss.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gaussian stream has sane moments") {
  GaussianStream g(2024);
  int n = 200000;
  double sum = 0, sumsq = 0;
  for (int i = 0; i < n; ++i) {
    double x = g.next();
    sum += x;
    sumsq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("basis-point columns cover rates and spreads only") {
  for (int v : {kRBond, kRCbdc, kRReserve, kRk, kChiM, kChiN, kChiR, kChiZ})
    CHECK(irf_unit_of(v) == IrfUnit::basis_points);
  for (int v : {kC, kY, kM, kN, kZ, kINet, kWelfare})
    CHECK(irf_unit_of(v) == IrfUnit::percent);
}
