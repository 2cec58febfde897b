#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace cbdcnk {

// Error taxonomy used for CLI exit codes: config -> 2, solver -> 3, BK -> 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BlanchardKahnError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Innovation ordering used everywhere (residuals, covariances, IRFs).
enum ShockIndex : int {
  kShockLambda = 0,  // CBDC benefit
  kShockEps,         // inverse elasticity of substitution CBDC/deposits
  kShockA,           // productivity
  kShockG,           // government spending
  kShockEta,         // inverse elasticity across good varieties (cost-push)
  kShockER,          // bond-rule innovation
  kShockEM,          // CBDC-rule innovation
  kNumShocks
};

const char* shock_name(int idx);
int shock_index(const std::string& name);  // throws ConfigError on unknown name

struct TaylorCoefficients {
  double rho = 0.5;       // smoothing, in [0, 0.99]
  double theta_pi = 1.5;  // inflation response, >= 0
  double theta_y = 0.2;   // output response, >= 0
};

enum class BankingStructure { monopolist, competitive };
enum class CbdcRateRegime { fixed_gross_rate_one, taylor_rule };

struct ModelVariant {
  BankingStructure banking = BankingStructure::monopolist;
  CbdcRateRegime cbdc_rate_regime = CbdcRateRegime::taylor_rule;
};

std::string to_string(BankingStructure b);
std::string to_string(CbdcRateRegime r);

struct Calibration {
  // Households
  double beta = 0.99;        // discount factor
  double sigma = 1.0;        // inverse intertemporal elasticity
  double psi = 4.55;         // inverse elasticity between consumption and liquidity
  double iota = 1.0;         // inverse Frisch elasticity
  double v = 0.08;           // liquidity utility weight (re-derived in calibration)
  double xi = 9.46;          // labor disutility (re-derived)
  double lambda_bar = 1.0;   // steady-state CBDC benefit
  double eps_bar = 1.0 / 6;  // steady-state inverse elasticity CBDC/deposits
  // Banks
  double phi = 0.0008;   // operating-cost level (re-derived)
  double varphi = 1.503; // operating-cost curvature, > 1
  double e_bank = 1.38;  // fixed bank equity (re-derived)
  // Firms
  double alpha = 1.0 / 3;
  double delta = 0.025;
  double theta_calvo = 0.75;
  double eta_bar = 1.0 / 11;
  double theta_c = 10.0;
  double a_bar = 1.0;
  // Government
  double mu_r = 0.0003;
  double mu_m = 0.002;  // re-derived via mu_m = (omega + zeta*mu_r)*lambda
  double g_bar = 0.16;
  double pi_bar = 1.0;
  double R_r_bar = (1.0 / 0.99) * (1.0 - 0.00497);
  double R_m_bar = 1.0;
  TaylorCoefficients bond_rule{0.5, 1.5, 0.2};
  TaylorCoefficients cbdc_rule{0.5, 1.5, 0.2};
  // Shock processes (policy-innovation entries keep persistence 0).
  std::array<double, kNumShocks> rho_shocks{0.9, 0.9, 0.9, 0.9, 0.9, 0.0, 0.0};
  std::array<double, kNumShocks> sigma_shocks{0, 0, 0, 0, 0, 0, 0};

  // Throws ConfigError naming the offending field.
  void validate() const;
};

struct CalibrationTargets {
  double liquidity_output_ratio = 1.04;   // z/y
  double labor_target = 1.0 / 3;          // l
  double liquidity_ratio_target = 0.1945; // zeta
  double bank_capital_share_target = 0.3; // k_b/k
  double reserve_spread_target = 0.00497; // chi_r
  void validate() const;
};

// Table-1 baseline; shock standard deviations default to zero.
Calibration baseline_calibration();

// Standard deviations used in the welfare experiments:
// (lambda, eps, a, g, eta, e_R, e_m) = (0.25, 0.25, 0.0064, 0.016, 0.14, 0, 0).
std::array<double, kNumShocks> welfare_shock_sigmas();

// Named presets for [shocks] preset = ...; knows "zero" and "welfare".
std::array<double, kNumShocks> shock_sigma_preset(const std::string& name);

struct ExperimentSettings {
  std::string shock = "lambda";
  double size_log = 0.22314355131420976;  // ln(1.25)
  int horizon = 40;
  int periods = 1000;
  unsigned long seed = 42;
  int order = 1;  // IRF approximation order (1 or 2)
  std::string output_dir = "out";
};

struct Config {
  Calibration calibration;
  ModelVariant variant;
  CalibrationTargets targets;
  ExperimentSettings experiment;
};

// Sectioned key-value config file ([calibration], [variant], [shocks],
// [rules], [experiment]); missing fields keep baseline values.
Config load_config(const std::string& path);
Config parse_config_text(const std::string& text);  // same, from a string
std::string serialize_config(const Config& cfg);

}  // namespace cbdcnk
