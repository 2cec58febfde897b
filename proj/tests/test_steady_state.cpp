#include <doctest.h>

#include <chrono>
#include <cmath>

#include "helpers.hpp"

using namespace cbdcnk;
using cbdcnk::testing::baseline_fixture;

TEST_CASE("calibration targets are hit to solver precision") {
  auto t0 = std::chrono::steady_clock::now();
  Calibration cal = calibrate_internal_parameters(baseline_calibration(), CalibrationTargets{});
  ModelVariant variant{BankingStructure::monopolist, CbdcRateRegime::taylor_rule};
  SteadyState ss = solve_steady_state(cal, variant);
  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  CHECK(std::abs(ss[kL] - 1.0 / 3) < 1e-8);
  CHECK(std::abs(ss[kZ] / ss[kY] - 1.04) < 1e-8);
  CHECK(std::abs(ss[kZeta] - 0.1945) < 1e-8);
  CHECK(std::abs(ss[kKb] / ss[kK] - 0.3) < 1e-8);
  CHECK(std::abs(ss[kChiR] - 0.00497) < 1e-8);
  CHECK(std::abs(ss[kRBond] - 1.0 / 0.99) < 1e-12);
  double omega = cal.phi * std::pow(ss[kZeta], 1.0 - cal.varphi);
  CHECK(std::abs(cal.mu_m - (omega + ss[kZeta] * cal.mu_r) * cal.lambda_bar) < 1e-6);
  CHECK(elapsed < 1.0);
}

TEST_CASE("calibrated parameters stay near the reference rounded values") {
  const Calibration& cal = baseline_fixture().cal;
  CHECK(cal.phi == doctest::Approx(8.44e-4).epsilon(2e-3));
  CHECK(std::abs(cal.v - 0.08) < 0.01);
  CHECK(std::abs(cal.mu_m - 0.002) < 1e-4);
  CHECK(cal.xi == doctest::Approx(9.46).epsilon(0.1));
  CHECK(cal.e_bank > 0);
}

TEST_CASE("closed-form inversion of the liquidity-ratio condition") {
  // phi = chi_r * zeta^varphi / (varphi - 1)
  double phi = 0.00497 * std::pow(0.1945, 1.503) / 0.503;
  CHECK(phi == doctest::Approx(8.44e-4).epsilon(1e-3));
  CHECK(baseline_fixture().cal.phi == doctest::Approx(phi).epsilon(1e-12));
}

TEST_CASE("deposit-spread fixed point matches the brute-force oracle") {
  // Independent oracle: grid scan + bisection directly on the pricing equation
  // written with raw formulas only.
  const Calibration& cal = baseline_fixture().cal;
  double R = cal.pi_bar / cal.beta;
  double chi_m = 1.0 - cal.R_m_bar / R;
  double zeta = 0.1945;
  double mc = cal.varphi * cal.phi * std::pow(zeta, 1.0 - cal.varphi);

  auto excess = [&](double chi_n) {
    double lam = 1.0, eps = 1.0 / 6, psi = 4.55;
    double w = (1.0 - eps) / eps;
    double bundle = std::pow(lam, 1.0 / eps) * std::pow(chi_n, w) + std::pow(chi_m, w);
    double chi_z = chi_m * chi_n / std::pow(bundle, 1.0 / w);
    double s = std::pow(lam, 1.0 / eps) * std::pow(chi_z / chi_m, w);
    double elas = (1.0 - s) / psi + s / eps;
    return chi_n * (1.0 - 1.0 / elas) - mc;
  };
  double lo = 1e-6, hi = 0.5;
  while (excess(lo) > 0) lo *= 2;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (excess(lo) * excess(mid) <= 0 ? hi : lo) = mid;
  }
  double oracle = 0.5 * (lo + hi);

  double solved = steady_deposit_spread(chi_m, mc, 1.0, 1.0 / 6, 4.55, true);
  CHECK(solved == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(baseline_fixture().ss[kChiN] == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("calibration is independent of the rounded initial values") {
  CalibrationTargets targets;
  Calibration a = baseline_calibration();
  Calibration b = baseline_calibration();
  b.v *= 1.2;
  b.xi *= 0.8;
  b.phi *= 1.2;
  b.e_bank *= 0.8;
  b.mu_m *= 1.2;
  Calibration ca = calibrate_internal_parameters(a, targets);
  Calibration cb = calibrate_internal_parameters(b, targets);
  CHECK(ca.v == doctest::Approx(cb.v).epsilon(1e-12));
  CHECK(ca.xi == doctest::Approx(cb.xi).epsilon(1e-12));
  CHECK(ca.phi == doctest::Approx(cb.phi).epsilon(1e-12));
  CHECK(ca.e_bank == doctest::Approx(cb.e_bank).epsilon(1e-12));
  CHECK(ca.mu_m == doctest::Approx(cb.mu_m).epsilon(1e-12));

  SteadyState sa = solve_steady_state(ca, {});
  SteadyState sb = solve_steady_state(cb, {});
  CHECK((sa.values - sb.values).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("higher CBDC benefit weakly lowers the deposit markup term") {
  Calibration cal = baseline_fixture().cal;
  ModelVariant variant{BankingStructure::monopolist, CbdcRateRegime::taylor_rule};
  auto markup_term = [&](double lambda_bar) {
    Calibration c = cal;
    c.lambda_bar = lambda_bar;
    SteadyState ss = solve_steady_state(c, variant);
    double elas = deposit_demand_elasticity(ss[kSWeight], c.psi, ss[kEpsPref]);
    return ss[kChiN] / elas;
  };
  double base = markup_term(1.0);
  double high = markup_term(1.1);
  CHECK(high <= base + 1e-12);
}

TEST_CASE("steady-state rates satisfy the Euler anchors") {
  const SteadyState& ss = baseline_fixture().ss;
  CHECK(ss[kRBond] == doctest::Approx(1.0101010101).epsilon(1e-9));
  // R_m = 1 implies chi_m = 1 - beta at pi_bar = 1.
  CHECK(ss[kChiM] == doctest::Approx(0.01).epsilon(1e-10));
  CHECK(ss[kQ] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ss[kRk] == doctest::Approx(1.0 / 0.99 - 1.0 + 0.025).epsilon(1e-10));
}

TEST_CASE("lambda_bar = 0 keeps the competitive steady state well-defined") {
  Calibration cal = baseline_fixture().cal;
  cal.lambda_bar = 0.0;
  cal.mu_m = 0.0;
  ModelVariant comp{BankingStructure::competitive, CbdcRateRegime::taylor_rule};
  SteadyState ss = solve_steady_state(cal, comp);
  CHECK(ss[kM] == 0.0);
  CHECK(ss[kSWeight] == 0.0);
  CHECK(ss[kChiZ] == doctest::Approx(ss[kChiN]).epsilon(1e-12));
  CHECK(ss[kZ] > 0);

  // Monopolist pricing has no interior optimum without CBDC competition.
  ModelVariant mono{BankingStructure::monopolist, CbdcRateRegime::taylor_rule};
  CHECK_THROWS_AS(solve_steady_state(cal, mono), SolverError);
}

TEST_CASE("fixed CBDC regime pins the steady-state CBDC rate at one") {
  Calibration cal = baseline_fixture().cal;
  ModelVariant fixed{BankingStructure::monopolist, CbdcRateRegime::fixed_gross_rate_one};
  SteadyState ss = solve_steady_state(cal, fixed);
  CHECK(ss[kRCbdc] == doctest::Approx(1.0).epsilon(1e-14));
  // With R_m_bar = 1 the steady state coincides across regimes.
  CHECK((ss.values - baseline_fixture().ss.values).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("solver reports nonconvergence domains") {
  Calibration cal = baseline_fixture().cal;
  cal.R_m_bar = 1.2;  // CBDC rate above the bond rate: negative spread
  ModelVariant variant{BankingStructure::monopolist, CbdcRateRegime::taylor_rule};
  CHECK_THROWS_AS(solve_steady_state(cal, variant), SolverError);
}
