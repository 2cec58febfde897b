#include "cbdcnk/model.hpp"

#include <stdexcept>

namespace cbdcnk {

namespace {

std::vector<std::string> make_names() {
  std::vector<std::string> n(kNumVars);
  n[kC] = "c";
  n[kL] = "l";
  n[kZ] = "z";
  n[kM] = "m";
  n[kN] = "n";
  n[kB] = "b";
  n[kK] = "k";
  n[kKh] = "k_h";
  n[kKb] = "k_b";
  n[kRres] = "r_reserves";
  n[kZeta] = "zeta";
  n[kQ] = "q";
  n[kIGross] = "I_gross";
  n[kINet] = "I_net";
  n[kY] = "y";
  n[kYm] = "y_m";
  n[kPi] = "pi";
  n[kPiReset] = "pi_reset";
  n[kVp] = "v_p";
  n[kX1] = "x1";
  n[kX2] = "x2";
  n[kGammaMc] = "gamma";
  n[kWage] = "w";
  n[kDProfit] = "d_profit";
  n[kTau] = "tau";
  n[kRBond] = "R_bond";
  n[kRCbdc] = "R_cbdc";
  n[kRReserve] = "R_reserve";
  n[kRk] = "R_k";
  n[kChiM] = "chi_m";
  n[kChiN] = "chi_n";
  n[kChiR] = "chi_r";
  n[kChiZ] = "chi_z";
  n[kOmega] = "Omega";
  n[kSWeight] = "s_weight";
  n[kOmegaCost] = "omega_cost";
  n[kWelfare] = "W_welfare";
  n[kLambdaPref] = "lambda_pref";
  n[kEpsPref] = "eps_pref";
  n[kAProd] = "a_prod";
  n[kGSpend] = "g_spend";
  n[kEtaGoods] = "eta_goods";
  n[kExoR] = "e_R";
  n[kExoM] = "e_m";
  return n;
}

VariableSet make_variable_set() {
  VariableSet vs;
  vs.names = make_names();
  vs.is_state.assign(kNumVars, false);
  vs.is_forward.assign(kNumVars, false);
  for (int v : {kK, kQ, kVp, kINet, kB, kRres, kM, kN, kKb, kRBond, kRCbdc, kRReserve, kChiN,
                kLambdaPref, kEpsPref, kAProd, kGSpend, kEtaGoods, kExoR, kExoM})
    vs.is_state[v] = true;
  for (int v : {kC, kOmega, kPi, kQ, kRk, kX1, kX2, kINet, kWelfare})
    vs.is_forward[v] = true;
  vs.state_slot.assign(kNumVars, -1);
  for (int v = 0; v < kNumVars; ++v) {
    if (vs.is_state[v]) {
      vs.state_slot[v] = static_cast<int>(vs.state_indices.size());
      vs.state_indices.push_back(v);
    }
  }
  return vs;
}

}  // namespace

int VariableSet::index_of(const std::string& name) const {
  for (int i = 0; i < static_cast<int>(names.size()); ++i)
    if (names[i] == name) return i;
  return -1;
}

const VariableSet& variable_set() {
  static const VariableSet vs = make_variable_set();
  return vs;
}

double utility_flow(double c, double z, double l, const Calibration& cal) {
  if (!(c > 0.0) || !(z > 0.0)) throw std::domain_error("utility_flow: c and z must be positive");
  if (l < 0.0) throw std::domain_error("utility_flow: l must be non-negative");
  return utility_flow_t(c, z, l, cal);
}

std::vector<std::string> equation_name_list() {
  return {
      "liquidity_demand",       // 0
      "avg_liquidity_cost",     // 1
      "cbdc_demand",            // 2
      "deposit_demand",         // 3
      "euler_consumption",      // 4
      "euler_capital",          // 5
      "omega_definition",       // 6
      "labor_supply",           // 7
      "bank_balance_sheet",     // 8
      "bank_liquidity_ratio",   // 9
      "deposit_pricing",        // 10
      "elasticity_weight",      // 11
      "deposit_unit_cost",      // 12
      "intermediate_production",// 13
      "labor_demand",           // 14
      "capital_demand",         // 15
      "reset_inflation",        // 16
      "calvo_x1",               // 17
      "calvo_x2",               // 18
      "inflation_aggregation",  // 19
      "price_dispersion",       // 20
      "aggregate_production",   // 21
      "capital_price_foc",      // 22
      "gross_investment",       // 23
      "capital_law_of_motion",  // 24
      "capital_market_clearing",// 25
      "resource_constraint",    // 26
      "government_budget",      // 27
      "bond_taylor_rule",       // 28
      "reserve_rate_rule",      // 29
      "cbdc_rate_rule",         // 30
      "cbdc_spread",            // 31
      "reserve_spread",         // 32
      "reserves_link",          // 33
      "bond_supply",            // 34
      "profit_distribution",    // 35
      "welfare_recursion",      // 36
      "ar1_lambda",             // 37
      "ar1_eps",                // 38
      "ar1_a",                  // 39
      "ar1_g",                  // 40
      "ar1_eta",                // 41
      "innovation_bond_rule",   // 42
      "innovation_cbdc_rule",   // 43
  };
}

EquationSystem::EquationSystem(ModelSpec spec) : spec_(std::move(spec)), names_(equation_name_list()) {
  if (static_cast<int>(names_.size()) != kNumEquations)
    throw std::logic_error("equation name list does not match residual dimension");
}

Eigen::VectorXd EquationSystem::evaluate(const Eigen::VectorXd& prev, const Eigen::VectorXd& curr,
                                         const Eigen::VectorXd& next,
                                         const Eigen::VectorXd& u) const {
  if (prev.size() != kNumVars || curr.size() != kNumVars || next.size() != kNumVars ||
      u.size() != kNumShocks)
    throw std::invalid_argument("evaluate: dimension mismatch");
  Eigen::VectorXd out(kNumEquations);
  eval_residuals<double>(spec_, prev.data(), curr.data(), next.data(), u.data(), out.data());
  return out;
}

Eigen::VectorXd EquationSystem::evaluate_static(const Eigen::VectorXd& x) const {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(kNumShocks);
  return evaluate(x, x, x, u);
}

Eigen::MatrixXd EquationSystem::static_jacobian(const Eigen::VectorXd& x) const {
  std::vector<Grad> v(kNumVars), u(kNumShocks), out(kNumEquations);
  for (int i = 0; i < kNumVars; ++i) v[i] = Grad::seed(x[i], kNumVars, i);
  for (int s = 0; s < kNumShocks; ++s) u[s] = Grad::constant(0.0, kNumVars);
  eval_residuals<Grad>(spec_, v.data(), v.data(), v.data(), u.data(), out.data());
  Eigen::MatrixXd jac(kNumEquations, kNumVars);
  for (int e = 0; e < kNumEquations; ++e) jac.row(e) = out[e].g.transpose();
  return jac;
}

EquationSystem build_equation_system(const Calibration& cal, const ModelVariant& variant) {
  cal.validate();
  ModelSpec spec;
  spec.cal = cal;
  spec.variant = variant;
  spec.ss_mode = false;
  return EquationSystem(spec);
}

}  // namespace cbdcnk
