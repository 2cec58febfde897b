#include <doctest.h>

#include <cmath>

#include "cbdcnk/calibration.hpp"

using namespace cbdcnk;

TEST_CASE("baseline calibration carries the documented values") {
  Calibration c = baseline_calibration();
  CHECK(c.beta == doctest::Approx(0.99));
  CHECK(c.sigma == doctest::Approx(1.0));
  CHECK(c.psi == doctest::Approx(4.55));
  CHECK(c.iota == doctest::Approx(1.0));
  CHECK(c.lambda_bar == doctest::Approx(1.0));
  CHECK(c.eps_bar == doctest::Approx(1.0 / 6));
  CHECK(c.theta_calvo == doctest::Approx(0.75));
  CHECK(c.alpha == doctest::Approx(1.0 / 3));
  CHECK(c.delta == doctest::Approx(0.025));
  CHECK(c.eta_bar == doctest::Approx(1.0 / 11));
  CHECK(c.theta_c == doctest::Approx(10.0));
  CHECK(c.mu_r == doctest::Approx(0.0003));
  CHECK(c.g_bar == doctest::Approx(0.16));
  CHECK(c.pi_bar == doctest::Approx(1.0));
  CHECK(c.R_m_bar == doctest::Approx(1.0));
  // Consistent with the reserve-spread target; the tabled 1.005 is a rounding.
  CHECK(c.R_r_bar == doctest::Approx(1.005).epsilon(1e-3));
  CHECK(c.bond_rule.rho == doctest::Approx(0.5));
  CHECK(c.bond_rule.theta_pi == doctest::Approx(1.5));
  CHECK(c.bond_rule.theta_y == doctest::Approx(0.2));
  CHECK(c.cbdc_rule.rho == doctest::Approx(0.5));
  for (int i = 0; i < 5; ++i) CHECK(c.rho_shocks[i] == doctest::Approx(0.9));
  CHECK(c.rho_shocks[kShockER] == 0.0);
  CHECK(c.rho_shocks[kShockEM] == 0.0);
  for (double s : c.sigma_shocks) CHECK(s == 0.0);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("welfare preset standard deviations") {
  auto s = welfare_shock_sigmas();
  CHECK(s[kShockLambda] == doctest::Approx(0.25));
  CHECK(s[kShockEps] == doctest::Approx(0.25));
  CHECK(s[kShockA] == doctest::Approx(0.0064));
  CHECK(s[kShockG] == doctest::Approx(0.016));
  CHECK(s[kShockEta] == doctest::Approx(0.14));
  CHECK(s[kShockER] == 0.0);
  CHECK(s[kShockEM] == 0.0);
  CHECK_THROWS_AS(shock_sigma_preset("nope"), ConfigError);
}

TEST_CASE("empty config file yields the full baseline") {
  Config cfg = parse_config_text("");
  CHECK(cfg.calibration.beta == doctest::Approx(0.99));
  CHECK(cfg.calibration.psi == doctest::Approx(4.55));
  CHECK(cfg.calibration.eps_bar == doctest::Approx(1.0 / 6));
  CHECK(cfg.calibration.theta_calvo == doctest::Approx(0.75));
  CHECK(cfg.variant.banking == BankingStructure::monopolist);
  CHECK(cfg.variant.cbdc_rate_regime == CbdcRateRegime::taylor_rule);
}

TEST_CASE("variant switch passes through without touching the calibration") {
  Config base = parse_config_text("");
  Config cfg = parse_config_text("[variant]\nbanking = competitive\n");
  CHECK(cfg.variant.banking == BankingStructure::competitive);
  CHECK(cfg.calibration.beta == base.calibration.beta);
  CHECK(cfg.calibration.v == base.calibration.v);
  CHECK(cfg.calibration.xi == base.calibration.xi);
}

TEST_CASE("invariant violations report the offending field") {
  CHECK_THROWS_WITH_AS(parse_config_text("[calibration]\nbeta = 1.2\n"),
                       doctest::Contains("beta out of range"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[calibration]\nvarphi = 0.9\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[shocks]\nrho_lambda = 1.0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[rules]\nbond_rho = 1.5\n"), ConfigError);
}

TEST_CASE("parser rejects malformed input") {
  CHECK_THROWS_AS(parse_config_text("[calibration]\nbeta 0.99\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[unknown_section]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[calibration]\nnot_a_field = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[calibration]\nbeta = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[experiment]\nshock = nope\n"), ConfigError);
}

TEST_CASE("config round-trips through serialization") {
  Config cfg = parse_config_text(
      "[calibration]\nbeta = 0.985\npsi = 4.0\n"
      "[variant]\nbanking = competitive\ncbdc_rate_regime = fixed_gross_rate_one\n"
      "[rules]\nbond_theta_pi = 2.5\ncbdc_rho = 0.25\n"
      "[shocks]\npreset = welfare\nsigma_a = 0.01\n"
      "[experiment]\nshock = eps\nsize = pct:10\nhorizon = 17\nseed = 7\n");
  Config back = parse_config_text(serialize_config(cfg));
  CHECK(back.calibration.beta == cfg.calibration.beta);
  CHECK(back.calibration.psi == cfg.calibration.psi);
  CHECK(back.calibration.v == cfg.calibration.v);
  CHECK(back.calibration.bond_rule.theta_pi == cfg.calibration.bond_rule.theta_pi);
  CHECK(back.calibration.cbdc_rule.rho == cfg.calibration.cbdc_rule.rho);
  for (int i = 0; i < kNumShocks; ++i) {
    CHECK(back.calibration.sigma_shocks[i] == cfg.calibration.sigma_shocks[i]);
    CHECK(back.calibration.rho_shocks[i] == cfg.calibration.rho_shocks[i]);
  }
  CHECK(back.variant.banking == cfg.variant.banking);
  CHECK(back.variant.cbdc_rate_regime == cfg.variant.cbdc_rate_regime);
  CHECK(back.experiment.shock == cfg.experiment.shock);
  CHECK(back.experiment.size_log == doctest::Approx(std::log(1.10)).epsilon(1e-12));
  CHECK(back.experiment.horizon == 17);
  CHECK(back.experiment.seed == 7);
}

TEST_CASE("shock names round-trip") {
  for (int i = 0; i < kNumShocks; ++i) CHECK(shock_index(shock_name(i)) == i);
  CHECK_THROWS_AS(shock_index("price_level"), ConfigError);
}
