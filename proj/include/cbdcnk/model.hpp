#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cbdcnk/calibration.hpp"
#include "cbdcnk/dual.hpp"
#include "cbdcnk/variables.hpp"

#include <Eigen/Dense>

namespace cbdcnk {

inline double value_of(double x) { return x; }
inline double value_of(const Grad& x) { return x.v; }
inline double value_of(const Hess& x) { return x.v; }

// --- Liquidity-block primitives (shared by residuals, steady state, tests) ---

// Average cost of liquidity given spreads and preferences.
template <class T>
T avg_liquidity_cost(const T& chi_m, const T& chi_n, const T& lam, const T& eps) {
  using std::pow;
  T w = (1.0 - eps) / eps;
  T bundle = pow(lam, 1.0 / eps) * pow(chi_n, w) + pow(chi_m, w);
  return chi_m * chi_n / pow(bundle, 1.0 / w);
}

// CBDC and deposit demand per unit of liquidity services.
template <class T>
T cbdc_share(const T& chi_m, const T& chi_z, const T& lam, const T& eps) {
  using std::pow;
  return pow(lam * chi_z / chi_m, 1.0 / eps);
}
template <class T>
T deposit_share(const T& chi_n, const T& chi_z, const T& eps) {
  using std::pow;
  return pow(chi_z / chi_n, 1.0 / eps);
}

// Relative CBDC/deposit demand.
template <class T>
T relative_cbdc_demand(const T& chi_m, const T& chi_n, const T& lam, const T& eps) {
  using std::pow;
  return pow(lam * chi_n / chi_m, 1.0 / eps);
}

// Weight on the CBDC/deposit substitution elasticity in deposit pricing.
template <class T>
T elasticity_weight(const T& chi_m, const T& chi_z, const T& lam, const T& eps) {
  using std::pow;
  return pow(lam, 1.0 / eps) * pow(chi_z / chi_m, (1.0 - eps) / eps);
}

// Magnitude of the deposit demand elasticity.
template <class T>
T deposit_demand_elasticity(const T& s, double psi, const T& eps) {
  return (1.0 - s) / psi + s / eps;
}

// Per-period utility; sigma == 1 uses the log limit.
template <class T>
T utility_flow_t(const T& c, const T& z, const T& l, const Calibration& cal) {
  using std::log;
  using std::pow;
  T bundle = (1.0 - cal.v) * pow(c, 1.0 - cal.psi) + cal.v * pow(z, 1.0 - cal.psi);
  T labor = cal.xi * pow(l, 1.0 + cal.iota) / (1.0 + cal.iota);
  if (cal.sigma == 1.0) return log(bundle) / (1.0 - cal.psi) - labor;
  return (pow(bundle, (1.0 - cal.sigma) / (1.0 - cal.psi)) - 1.0) / (1.0 - cal.sigma) - labor;
}

// Double version with domain checks.
double utility_flow(double c, double z, double l, const Calibration& cal);

// Marginal utility of consumption, U_c = c^{-sigma} * Omega.
template <class T>
T marginal_utility(const T& c, const T& omega, const Calibration& cal) {
  using std::pow;
  return pow(c, -cal.sigma) * omega;
}

// Omega: price-index term induced by the liquidity bundle.
template <class T>
T omega_of_chi_z(const T& chi_z, const Calibration& cal) {
  using std::pow;
  double vr = cal.v / (1.0 - cal.v);
  T inner = 1.0 + pow(vr, 1.0 / cal.psi) * pow(chi_z, 1.0 - 1.0 / cal.psi);
  return pow(1.0 - cal.v, (1.0 - cal.sigma) / (1.0 - cal.psi)) *
         pow(inner, (cal.psi - cal.sigma) / (1.0 - cal.psi));
}

// Constants the dynamic system needs from the steady state.
struct SteadyAnchors {
  double y_ref = 1.0;    // output reference in the Taylor rules
  double R_ref = 1.0;    // bond-rate reference (pi_bar / beta)
  double I_bar = 1.0;    // steady-state gross investment (adjustment-cost anchor)
  double b_bar = 0.25;   // constant real bond supply
  double chi_r_bar = 0.00497;  // constant reserve spread in the reserve-rate rule
};

// Full model context for residual evaluation. In steady-state mode the two
// Taylor rules are replaced by their steady-state restrictions (pi = pi_bar,
// R_cbdc at its anchor) and the bond-supply closure b = b_share_of_output * y.
struct ModelSpec {
  Calibration cal;
  ModelVariant variant;
  SteadyAnchors anchors;
  bool ss_mode = false;
  double b_share_of_output = 0.25;

  bool lambda_is_zero() const { return cal.lambda_bar == 0.0; }
};

// Stacked argument layout for derivatives: [prev(44) curr(44) next(44) u(7)].
constexpr int kStackN = 3 * kNumVars + kNumShocks;
inline int stack_prev(int v) { return v; }
inline int stack_curr(int v) { return kNumVars + v; }
inline int stack_next(int v) { return 2 * kNumVars + v; }
inline int stack_shock(int s) { return 3 * kNumVars + s; }

// The stacked residual F(prev, curr, next, u) = 0 (expectations applied).
template <class T>
void eval_residuals(const ModelSpec& ms, const T* prev, const T* curr, const T* next,
                    const T* u, T* out) {
  using std::exp;
  using std::log;
  using std::pow;
  const Calibration& p = ms.cal;

  const T& c = curr[kC];
  const T& l = curr[kL];
  const T& z = curr[kZ];
  const T& m = curr[kM];
  const T& n = curr[kN];
  const T& b = curr[kB];
  const T& k = curr[kK];
  const T& k_h = curr[kKh];
  const T& k_b = curr[kKb];
  const T& r_res = curr[kRres];
  const T& zeta = curr[kZeta];
  const T& q = curr[kQ];
  const T& i_gross = curr[kIGross];
  const T& i_net = curr[kINet];
  const T& y = curr[kY];
  const T& y_m = curr[kYm];
  const T& pi = curr[kPi];
  const T& pi_r = curr[kPiReset];
  const T& v_p = curr[kVp];
  const T& x1 = curr[kX1];
  const T& x2 = curr[kX2];
  const T& gamma = curr[kGammaMc];
  const T& wage = curr[kWage];
  const T& d_profit = curr[kDProfit];
  const T& tau = curr[kTau];
  const T& R = curr[kRBond];
  const T& R_m = curr[kRCbdc];
  const T& R_r = curr[kRReserve];
  const T& R_k = curr[kRk];
  const T& chi_m = curr[kChiM];
  const T& chi_n = curr[kChiN];
  const T& chi_r = curr[kChiR];
  const T& chi_z = curr[kChiZ];
  const T& omega = curr[kOmega];
  const T& s_w = curr[kSWeight];
  const T& omega_c = curr[kOmegaCost];
  const T& welf = curr[kWelfare];
  const T& lam = curr[kLambdaPref];
  const T& eps = curr[kEpsPref];
  const T& a = curr[kAProd];
  const T& g = curr[kGSpend];
  const T& eta = curr[kEtaGoods];

  const T& k_p = prev[kK];
  const T& q_p = prev[kQ];
  const T& vp_p = prev[kVp];
  const T& inet_p = prev[kINet];
  const T& b_p = prev[kB];
  const T& rres_p = prev[kRres];
  const T& m_p = prev[kM];
  const T& n_p = prev[kN];
  const T& kb_p = prev[kKb];
  const T& R_p = prev[kRBond];
  const T& Rm_p = prev[kRCbdc];
  const T& Rr_p = prev[kRReserve];
  const T& chin_p = prev[kChiN];

  const T& c_n = next[kC];
  const T& omega_n = next[kOmega];
  const T& pi_n = next[kPi];
  const T& q_n = next[kQ];
  const T& Rk_n = next[kRk];
  const T& x1_n = next[kX1];
  const T& x2_n = next[kX2];
  const T& inet_n = next[kINet];
  const T& welf_n = next[kWelfare];

  const T uc = marginal_utility(c, omega, p);
  const T uc_n = marginal_utility(c_n, omega_n, p);
  const T sdf_n = p.beta * uc_n / uc;  // one-period stochastic discount factor

  const double Ibar = ms.anchors.I_bar;
  const T growth = (i_net + Ibar) / (inet_p + Ibar);
  const T growth_n = (inet_n + Ibar) / (i_net + Ibar);
  const T jcur = log(growth);
  const T jnext = log(growth_n);
  const T adj_cost = 0.5 * p.theta_c * jcur * jcur * (i_net + Ibar);

  // Household block
  out[0] = z - c * pow(p.v / ((1.0 - p.v) * chi_z), 1.0 / p.psi);
  if (ms.lambda_is_zero()) {
    out[1] = chi_z - chi_n;
    out[2] = m - 0.0;
  } else {
    out[1] = chi_z - avg_liquidity_cost(chi_m, chi_n, lam, eps);
    out[2] = m - z * cbdc_share(chi_m, chi_z, lam, eps);
  }
  out[3] = n - z * deposit_share(chi_n, chi_z, eps);
  out[4] = uc - p.beta * uc_n * R / pi_n;
  out[5] = uc - p.beta * uc_n * (Rk_n + (q_n - p.delta) / q);
  out[6] = omega - omega_of_chi_z(chi_z, p);
  out[7] = p.xi * pow(l, p.iota) - wage * uc;

  // Bank block
  out[8] = q * k_b + r_res - n - p.e_bank;
  out[9] = chi_r - p.phi * (p.varphi - 1.0) * pow(zeta, -p.varphi);
  const T marginal_cost = p.varphi * p.phi * pow(zeta, 1.0 - p.varphi);
  if (ms.variant.banking == BankingStructure::monopolist) {
    const T elas = deposit_demand_elasticity(s_w, p.psi, eps);
    out[10] = chi_n * (1.0 - 1.0 / elas) - marginal_cost;
  } else {
    out[10] = chi_n - marginal_cost;
  }
  if (ms.lambda_is_zero())
    out[11] = s_w - 0.0;
  else
    out[11] = s_w - elasticity_weight(chi_m, chi_z, lam, eps);
  out[12] = omega_c - p.phi * pow(zeta, 1.0 - p.varphi);

  // Firm block
  out[13] = y_m - a * pow(k_p, p.alpha) * pow(l, 1.0 - p.alpha);
  out[14] = wage - a * (1.0 - p.alpha) * gamma * pow(k_p / l, p.alpha);
  out[15] = R_k - a * p.alpha * gamma * pow(k_p / l, p.alpha - 1.0) / q_p;
  out[16] = pi_r * (1.0 - eta) * x2 - pi * x1;
  out[17] = x1 - uc * y * gamma - p.theta_calvo * p.beta * pow(pi_n, 1.0 / eta) * x1_n;
  out[18] = x2 - uc * y - p.theta_calvo * p.beta * pow(pi_n, 1.0 / eta - 1.0) * x2_n;
  out[19] = pow(pi, 1.0 - 1.0 / eta) - (1.0 - p.theta_calvo) * pow(pi_r, 1.0 - 1.0 / eta) -
            p.theta_calvo;
  out[20] = v_p - (1.0 - p.theta_calvo) * pow(pi / pi_r, 1.0 / eta) -
            pow(pi, 1.0 / eta) * p.theta_calvo * vp_p;
  out[21] = y * v_p - y_m;
  out[22] = q - 1.0 - 0.5 * p.theta_c * jcur * jcur - p.theta_c * jcur +
            sdf_n * p.theta_c * jnext * growth_n;

  // Aggregation and government
  out[23] = i_gross - i_net - p.delta * k_p;
  out[24] = k - k_p - i_net;
  out[25] = k - k_h - k_b;
  out[26] = c + g + i_gross + adj_cost + m * p.mu_m + n * (omega_c + zeta * p.mu_r) - y;
  out[27] = b + r_res + m + tau - g -
            (b_p * R_p + rres_p * Rr_p + m_p * Rm_p) / pi - r_res * p.mu_r - m * p.mu_m;
  if (ms.ss_mode) {
    out[28] = pi - p.pi_bar;
  } else {
    out[28] = log(R) - (1.0 - p.bond_rule.rho) * std::log(ms.anchors.R_ref) -
              p.bond_rule.rho * log(R_p) -
              (1.0 - p.bond_rule.rho) *
                  (p.bond_rule.theta_pi * (log(pi) - std::log(p.pi_bar)) +
                   p.bond_rule.theta_y * (log(y) - std::log(ms.anchors.y_ref))) -
              curr[kExoR];
  }
  out[29] = R_r - R * (1.0 - ms.anchors.chi_r_bar);
  if (ms.ss_mode) {
    out[30] = ms.variant.cbdc_rate_regime == CbdcRateRegime::taylor_rule ? R_m - p.R_m_bar
                                                                         : R_m - 1.0;
  } else if (ms.variant.cbdc_rate_regime == CbdcRateRegime::taylor_rule) {
    out[30] = log(R_m) - (1.0 - p.cbdc_rule.rho) * std::log(p.R_m_bar) -
              p.cbdc_rule.rho * log(Rm_p) -
              (1.0 - p.cbdc_rule.rho) *
                  (p.cbdc_rule.theta_pi * (log(pi) - std::log(p.pi_bar)) +
                   p.cbdc_rule.theta_y * (log(y) - std::log(ms.anchors.y_ref))) -
              curr[kExoM];
  } else {
    out[30] = R_m - 1.0;
  }
  out[31] = chi_m * R - (R - R_m);
  out[32] = chi_r * R - (R - R_r);
  out[33] = r_res - zeta * n;
  out[34] = ms.ss_mode ? b - ms.b_share_of_output * y : b - ms.anchors.b_bar;

  // Profit accounting: banks + retailers + capital producers (others are zero).
  const T Rn_p = R_p * (1.0 - chin_p);
  const T bank_profit = q_p * kb_p * R_k + rres_p * Rr_p / pi + (q - p.delta) * kb_p -
                        n_p * Rn_p / pi - p.e_bank - n * omega_c;
  out[35] = d_profit - bank_profit - (y - gamma * y_m) - (q - 1.0) * i_net + adj_cost;

  out[36] = welf - utility_flow_t(c, z, l, p) - p.beta * welf_n;

  // Exogenous processes
  if (ms.lambda_is_zero())
    out[37] = lam - 0.0;
  else
    out[37] = log(lam) - (1.0 - p.rho_shocks[kShockLambda]) * std::log(p.lambda_bar) -
              p.rho_shocks[kShockLambda] * log(prev[kLambdaPref]) - u[kShockLambda];
  out[38] = log(eps) - (1.0 - p.rho_shocks[kShockEps]) * std::log(p.eps_bar) -
            p.rho_shocks[kShockEps] * log(prev[kEpsPref]) - u[kShockEps];
  out[39] = log(a) - (1.0 - p.rho_shocks[kShockA]) * std::log(p.a_bar) -
            p.rho_shocks[kShockA] * log(prev[kAProd]) - u[kShockA];
  out[40] = log(g) - (1.0 - p.rho_shocks[kShockG]) * std::log(p.g_bar) -
            p.rho_shocks[kShockG] * log(prev[kGSpend]) - u[kShockG];
  out[41] = log(eta) - (1.0 - p.rho_shocks[kShockEta]) * std::log(p.eta_bar) -
            p.rho_shocks[kShockEta] * log(prev[kEtaGoods]) - u[kShockEta];
  out[42] = curr[kExoR] - u[kShockER];
  out[43] = curr[kExoM] - u[kShockEM];
}

constexpr int kNumEquations = kNumVars;

// Residual system facade with derivative evaluation.
class EquationSystem {
 public:
  EquationSystem(ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }
  ModelSpec& mutable_spec() { return spec_; }
  int dim() const { return kNumEquations; }
  const std::vector<std::string>& equation_names() const { return names_; }

  Eigen::VectorXd evaluate(const Eigen::VectorXd& prev, const Eigen::VectorXd& curr,
                           const Eigen::VectorXd& next, const Eigen::VectorXd& u) const;

  // Residuals at a fixed point (prev = curr = next = x, zero innovations).
  Eigen::VectorXd evaluate_static(const Eigen::VectorXd& x) const;

  // Jacobian of evaluate_static with respect to x (used by the Newton polish).
  Eigen::MatrixXd static_jacobian(const Eigen::VectorXd& x) const;

 private:
  ModelSpec spec_;
  std::vector<std::string> names_;
};

// Builds the dynamic-mode system; anchors must be filled by the caller
// (steady_state::solve does this).
EquationSystem build_equation_system(const Calibration& cal, const ModelVariant& variant);

std::vector<std::string> equation_name_list();

}  // namespace cbdcnk
