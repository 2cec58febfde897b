#include "cbdcnk/steady_state.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace cbdcnk {

namespace {

// Monotone root bracketing + bisection with a Newton-like secant polish.
double solve_scalar(const std::function<double(double)>& f, double lo, double hi,
                    const char* what) {
  double flo = f(lo);
  double fhi = f(hi);
  if (std::isnan(flo) || std::isnan(fhi) || flo * fhi > 0.0) {
    std::ostringstream os;
    os << "scalar solve for " << what << " failed to bracket a root: f(" << lo << ")=" << flo
       << ", f(" << hi << ")=" << fhi;
    throw SolverError(os.str());
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double fmid = f(mid);
    if (fmid == 0.0 || hi - lo < 1e-16 * (1.0 + std::abs(mid))) return mid;
    if (flo * fmid <= 0.0) {
      hi = mid;
      fhi = fmid;
    } else {
      lo = mid;
      flo = fmid;
    }
  }
  return 0.5 * (lo + hi);
}

struct CalvoBlock {
  double pi_reset, v_p, gamma;
};

CalvoBlock solve_calvo(double pi, const Calibration& c) {
  double ieta = 1.0 / c.eta_bar;
  double pr_pow = std::pow(pi, 1.0 - ieta) - c.theta_calvo;
  if (pr_pow <= 0.0) throw SolverError("steady state: inflation too far from target for Calvo block");
  CalvoBlock out;
  out.pi_reset = std::pow(pr_pow / (1.0 - c.theta_calvo), 1.0 / (1.0 - ieta));
  double denom = 1.0 - c.theta_calvo * std::pow(pi, ieta);
  if (denom <= 0.0) throw SolverError("steady state: price dispersion undefined");
  out.v_p = (1.0 - c.theta_calvo) * std::pow(pi / out.pi_reset, ieta) / denom;
  double d1 = 1.0 - c.theta_calvo * c.beta * std::pow(pi, ieta);
  double d2 = 1.0 - c.theta_calvo * c.beta * std::pow(pi, ieta - 1.0);
  if (d1 <= 0.0 || d2 <= 0.0) throw SolverError("steady state: Calvo recursions diverge");
  out.gamma = (1.0 - c.eta_bar) * (out.pi_reset / pi) * d1 / d2;
  return out;
}

}  // namespace

double steady_deposit_spread(double chi_m, double marginal_cost, double lambda_bar,
                             double eps_bar, double psi, bool monopolist) {
  if (!monopolist) return marginal_cost;
  if (lambda_bar == 0.0)
    throw SolverError(
        "monopolist deposit pricing has no interior optimum when lambda_bar = 0 "
        "(deposit demand is inelastic); use the competitive variant");
  auto excess = [&](double chi_n) {
    double chi_z = avg_liquidity_cost(chi_m, chi_n, lambda_bar, eps_bar);
    double s = elasticity_weight(chi_m, chi_z, lambda_bar, eps_bar);
    double elas = deposit_demand_elasticity(s, psi, eps_bar);
    return chi_n * (1.0 - 1.0 / elas) - marginal_cost;
  };
  // Below the unit-elasticity point the markup is undefined; bracket above it.
  double lo = 1e-12;
  double hi = 1.0;
  // Walk lo up until excess(lo) < 0 with finite elasticity margin.
  while (excess(lo) > 0.0 && lo < hi) lo *= 2.0;
  return solve_scalar(excess, lo, hi, "steady-state deposit spread");
}

Calibration calibrate_internal_parameters(const Calibration& cal_in,
                                          const CalibrationTargets& targets) {
  cal_in.validate();
  targets.validate();
  Calibration c = cal_in;

  const double pi = c.pi_bar;
  const double R = pi / c.beta;
  const double chi_r = targets.reserve_spread_target;
  c.R_r_bar = R * (1.0 - chi_r);

  // Bank cost level from the liquidity-ratio first-order condition.
  const double zeta = targets.liquidity_ratio_target;
  c.phi = chi_r * std::pow(zeta, c.varphi) / (c.varphi - 1.0);
  const double omega_c = c.phi * std::pow(zeta, 1.0 - c.varphi);
  c.mu_m = (omega_c + zeta * c.mu_r) * c.lambda_bar;

  // Spread block (monopolist pricing anchors the calibration).
  const double R_m = c.R_m_bar;
  const double chi_m = 1.0 - R_m / R;
  if (chi_m <= 0.0) throw SolverError("calibration requires R_m_bar below the bond rate");
  const double mc_n = c.varphi * c.phi * std::pow(zeta, 1.0 - c.varphi);
  const double chi_n =
      steady_deposit_spread(chi_m, mc_n, c.lambda_bar, c.eps_bar, c.psi, true);
  const double chi_z = c.lambda_bar == 0.0
                           ? chi_n
                           : avg_liquidity_cost(chi_m, chi_n, c.lambda_bar, c.eps_bar);

  // Production block at the labor target.
  CalvoBlock calvo = solve_calvo(pi, c);
  const double R_k = 1.0 / c.beta - 1.0 + c.delta;
  const double kl = std::pow(R_k / (c.a_bar * c.alpha * calvo.gamma), 1.0 / (c.alpha - 1.0));
  const double wage = c.a_bar * (1.0 - c.alpha) * calvo.gamma * std::pow(kl, c.alpha);
  const double l = targets.labor_target;
  const double k = kl * l;
  const double y = c.a_bar * std::pow(kl, c.alpha) * l / calvo.v_p;
  const double z = targets.liquidity_output_ratio * y;

  const double share_m = c.lambda_bar == 0.0 ? 0.0 : cbdc_share(chi_m, chi_z, c.lambda_bar, c.eps_bar);
  const double share_n = deposit_share(chi_n, chi_z, c.eps_bar);
  const double liq_cost = share_m * c.mu_m + share_n * (omega_c + zeta * c.mu_r);
  const double cons = y - c.g_bar - c.delta * k - z * liq_cost;
  if (cons <= 0.0) throw SolverError("calibration: negative consumption at targets");

  // Liquidity weight from the aggregate liquidity demand at the z/y target.
  const double ratio = chi_z * std::pow(z / cons, c.psi);
  c.v = ratio / (1.0 + ratio);

  // Labor disutility from the labor-supply condition.
  const double omega_t = omega_of_chi_z(chi_z, c);
  c.xi = wage * omega_t * std::pow(cons, -c.sigma) / std::pow(l, c.iota);

  // Bank equity from the balance sheet at the capital-share target.
  const double n = share_n * z;
  c.e_bank = targets.bank_capital_share_target * k + zeta * n - n;
  if (c.e_bank <= 0.0) throw SolverError("calibration: negative bank equity at targets");

  c.validate();
  return c;
}

SteadyState solve_steady_state(const Calibration& cal, const ModelVariant& variant) {
  cal.validate();
  const Calibration& c = cal;
  const bool monopolist = variant.banking == BankingStructure::monopolist;

  const double pi = c.pi_bar;
  const double R = pi / c.beta;
  const double chi_r = 1.0 - c.R_r_bar / R;
  if (chi_r <= 0.0) throw SolverError("steady state: R_r_bar implies non-positive reserve spread");
  const double R_r = R * (1.0 - chi_r);
  const double R_m = variant.cbdc_rate_regime == CbdcRateRegime::taylor_rule ? c.R_m_bar : 1.0;
  const double chi_m = 1.0 - R_m / R;
  if (chi_m <= 0.0) throw SolverError("steady state: CBDC rate must stay below the bond rate");

  const double zeta = std::pow(chi_r / (c.phi * (c.varphi - 1.0)), -1.0 / c.varphi);
  const double omega_c = c.phi * std::pow(zeta, 1.0 - c.varphi);
  const double mc_n = c.varphi * c.phi * std::pow(zeta, 1.0 - c.varphi);
  const double chi_n = steady_deposit_spread(chi_m, mc_n, c.lambda_bar, c.eps_bar, c.psi, monopolist);
  const double chi_z = c.lambda_bar == 0.0
                           ? chi_n
                           : avg_liquidity_cost(chi_m, chi_n, c.lambda_bar, c.eps_bar);
  const double s_w =
      c.lambda_bar == 0.0 ? 0.0 : elasticity_weight(chi_m, chi_z, c.lambda_bar, c.eps_bar);

  CalvoBlock calvo = solve_calvo(pi, c);
  const double R_k = 1.0 / c.beta - 1.0 + c.delta;
  const double kl = std::pow(R_k / (c.a_bar * c.alpha * calvo.gamma), 1.0 / (c.alpha - 1.0));
  const double wage = c.a_bar * (1.0 - c.alpha) * calvo.gamma * std::pow(kl, c.alpha);

  const double share_m = c.lambda_bar == 0.0 ? 0.0 : cbdc_share(chi_m, chi_z, c.lambda_bar, c.eps_bar);
  const double share_n = deposit_share(chi_n, chi_z, c.eps_bar);
  const double liq_cost = share_m * c.mu_m + share_n * (omega_c + zeta * c.mu_r);
  const double z_per_c = std::pow(c.v / ((1.0 - c.v) * chi_z), 1.0 / c.psi);
  const double omega_t = omega_of_chi_z(chi_z, c);
  const double y_per_l = c.a_bar * std::pow(kl, c.alpha) / calvo.v_p;
  const double net_per_l = y_per_l - c.delta * kl - z_per_c * liq_cost * 0.0;  // cost scales with c

  auto cons_of_l = [&](double l) {
    double y = y_per_l * l;
    double k = kl * l;
    return (y - c.g_bar - c.delta * k) / (1.0 + z_per_c * liq_cost);
  };
  auto labor_excess = [&](double l) {
    double cons = cons_of_l(l);
    if (cons <= 0.0) return -1e12;
    return c.xi * std::pow(l, c.iota) - wage * omega_t * std::pow(cons, -c.sigma);
  };
  if (net_per_l == 0.0) throw SolverError("steady state: degenerate production block");
  double l_lo = c.g_bar / (y_per_l - c.delta * kl) * (1.0 + 1e-12) + 1e-12;
  double l_hi = std::max(10.0, 4.0 * l_lo);
  while (labor_excess(l_hi) < 0.0 && l_hi < 1e6) l_hi *= 2.0;
  const double l = solve_scalar(labor_excess, l_lo, l_hi, "steady-state labor");

  const double k = kl * l;
  const double y = y_per_l * l;
  const double cons = cons_of_l(l);
  const double z = z_per_c * cons;
  const double m = share_m * z;
  const double n = share_n * z;
  const double r_res = zeta * n;
  const double k_b = (n + c.e_bank - r_res);  // q = 1
  const double k_h = k - k_b;
  if (k_h <= 0.0) throw SolverError("steady state: household capital non-positive");
  const double y_m = y * calvo.v_p;
  const double uc = omega_t * std::pow(cons, -c.sigma);
  const double ieta = 1.0 / c.eta_bar;
  const double x1 = uc * y * calvo.gamma / (1.0 - c.theta_calvo * c.beta * std::pow(pi, ieta));
  const double x2 = uc * y / (1.0 - c.theta_calvo * c.beta * std::pow(pi, ieta - 1.0));
  const double b = 0.25 * y;
  const double R_n = R * (1.0 - chi_n);
  const double tau = c.g_bar + (b * R + r_res * R_r + m * R_m) / pi + r_res * c.mu_r +
                     m * c.mu_m - b - r_res - m;
  const double bank_profit = k_b * R_k + r_res * R_r / pi + (1.0 - c.delta) * k_b -
                             n * R_n / pi - c.e_bank - n * omega_c;
  const double d_profit = bank_profit + (y - calvo.gamma * y_m);
  const double welf = utility_flow(cons, z, l, c) / (1.0 - c.beta);

  SteadyState ss;
  ss.cal = c;
  ss.variant = variant;
  ss.values = Eigen::VectorXd::Zero(kNumVars);
  Eigen::VectorXd& x = ss.values;
  x[kC] = cons;
  x[kL] = l;
  x[kZ] = z;
  x[kM] = m;
  x[kN] = n;
  x[kB] = b;
  x[kK] = k;
  x[kKh] = k_h;
  x[kKb] = k_b;
  x[kRres] = r_res;
  x[kZeta] = zeta;
  x[kQ] = 1.0;
  x[kIGross] = c.delta * k;
  x[kINet] = 0.0;
  x[kY] = y;
  x[kYm] = y_m;
  x[kPi] = pi;
  x[kPiReset] = calvo.pi_reset;
  x[kVp] = calvo.v_p;
  x[kX1] = x1;
  x[kX2] = x2;
  x[kGammaMc] = calvo.gamma;
  x[kWage] = wage;
  x[kDProfit] = d_profit;
  x[kTau] = tau;
  x[kRBond] = R;
  x[kRCbdc] = R_m;
  x[kRReserve] = R_r;
  x[kRk] = R_k;
  x[kChiM] = chi_m;
  x[kChiN] = chi_n;
  x[kChiR] = chi_r;
  x[kChiZ] = chi_z;
  x[kOmega] = omega_t;
  x[kSWeight] = s_w;
  x[kOmegaCost] = omega_c;
  x[kWelfare] = welf;
  x[kLambdaPref] = c.lambda_bar;
  x[kEpsPref] = c.eps_bar;
  x[kAProd] = c.a_bar;
  x[kGSpend] = c.g_bar;
  x[kEtaGoods] = c.eta_bar;
  x[kExoR] = 0.0;
  x[kExoM] = 0.0;

  ss.anchors.y_ref = y;
  ss.anchors.R_ref = R;
  ss.anchors.I_bar = c.delta * k;
  ss.anchors.b_bar = b;
  ss.anchors.chi_r_bar = chi_r;

  // Verify against the full residual system; polish with Newton if needed.
  EquationSystem sys = ss.make_system();
  Eigen::VectorXd res = sys.evaluate_static(ss.values);
  double err = res.cwiseAbs().maxCoeff();
  for (int it = 0; it < 25 && err > 1e-12; ++it) {
    Eigen::MatrixXd jac = sys.static_jacobian(ss.values);
    Eigen::VectorXd step = jac.partialPivLu().solve(res);
    ss.values -= step;
    res = sys.evaluate_static(ss.values);
    err = res.cwiseAbs().maxCoeff();
    if (step.cwiseAbs().maxCoeff() < 1e-14) break;
  }
  if (!(err < 1e-10)) {
    std::ostringstream os;
    os << "steady-state residual did not converge below 1e-10 (worst " << err << ")";
    throw SolverError(os.str());
  }
  return ss;
}

double SteadyState::by_name(const std::string& name) const {
  int idx = variable_set().index_of(name);
  if (idx < 0) throw std::invalid_argument("unknown variable: " + name);
  return values[idx];
}

EquationSystem SteadyState::make_system() const {
  ModelSpec spec;
  spec.cal = cal;
  spec.variant = variant;
  spec.anchors = anchors;
  spec.ss_mode = false;
  return EquationSystem(spec);
}

}  // namespace cbdcnk
