#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "cbdcnk/model.hpp"
#include "cbdcnk/steady_state.hpp"

namespace cbdcnk {

// Exact first and second derivatives of the stacked residual
// F(prev, curr, next, u) at the steady state, stacked argument width kStackN.
struct Derivatives {
  Eigen::MatrixXd f_prev;   // n x n
  Eigen::MatrixXd f_curr;   // n x n
  Eigen::MatrixXd f_next;   // n x n
  Eigen::MatrixXd f_shock;  // n x nu
  std::vector<Eigen::MatrixXd> hess;  // n matrices of kStackN x kStackN
};

Derivatives differentiate(const EquationSystem& sys, const SteadyState& ss);

// Replaces the two policy-rule rows (bond and CBDC Taylor rules) with
// closed-form derivatives for the coefficients in spec. The rules are the only
// equations that depend on the Taylor coefficients, so the rest of the cached
// derivative set stays valid across optimizer evaluations.
void patch_policy_rule_rows(const ModelSpec& spec, const SteadyState& ss, Derivatives* d);

struct FirstOrderSolution {
  // Full-vector law of motion: vhat_t = P vhat_{t-1} + Q u_t (deviations).
  Eigen::MatrixXd P;   // n x n (nonzero columns only at state variables)
  Eigen::MatrixXd Q;   // n x nu
  Eigen::MatrixXd gx;  // n x ns: vhat_t = gx * state deviations_{t-1}
  Eigen::MatrixXd hx;  // ns x ns state transition
  Eigen::MatrixXd he;  // ns x nu state impact
  std::vector<std::complex<double>> eigenvalues;  // generalized eigenvalue report
  int n_stable = 0;
  int n_states = 0;
  Eigen::VectorXd steady;  // steady-state levels (for simulation and IRFs)

  double spectral_radius() const;
};

struct SolveOptions {
  double unit_circle_margin = 1e-8;
  bool check_residuals = true;
  double first_order_tol = 1e-9;
  double second_order_tol = 1e-8;
};

FirstOrderSolution solve_first_order(const Derivatives& d, const SteadyState& ss,
                                     const SolveOptions& opts = {});

struct SecondOrderSolution {
  FirstOrderSolution first;
  // Second-derivative tensors of the policy function v = G(w, e, sigma):
  // columns indexed (a,b) -> a*dim2 + b.
  Eigen::MatrixXd g_ww;  // n x ns*ns
  Eigen::MatrixXd g_we;  // n x ns*nu
  Eigen::MatrixXd g_ee;  // n x nu*nu
  Eigen::VectorXd g_ss;  // n: sigma-sigma second derivative (covariance absorbed)
  Eigen::VectorXd sigma2_constant;  // 0.5 * g_ss: constant risk correction
  Eigen::MatrixXd shock_cov;        // nu x nu covariance used

  // Max-abs residuals of the chain-rule systems, filled when verification runs.
  double plugback_ww = 0, plugback_we = 0, plugback_ee = 0, plugback_ss = 0;
};

SecondOrderSolution solve_second_order(const Derivatives& d, const FirstOrderSolution& fo,
                                       const Eigen::MatrixXd& shock_cov,
                                       const SolveOptions& opts = {});

struct PrunedState {
  Eigen::VectorXd w1;  // first-order state deviations
  Eigen::VectorXd w2;  // second-order state deviations
  static PrunedState zero(int ns);
};

// One pruned step: quadratic terms always evaluate on first-order states.
// Returns the new state and the full variable vector (levels) for period t.
std::pair<PrunedState, Eigen::VectorXd> step_pruned(const SecondOrderSolution& sol,
                                                    const PrunedState& st,
                                                    const Eigen::VectorXd& innovations);

// Diagonal covariance from per-shock standard deviations.
Eigen::MatrixXd diagonal_shock_cov(const std::array<double, kNumShocks>& sigmas);

// Stationary covariance of the first-order state: S = hx S hx' + he cov he'.
Eigen::MatrixXd state_covariance(const FirstOrderSolution& fo, const Eigen::MatrixXd& shock_cov);

// Unconditional mean of the pruned second-order law (levels).
Eigen::VectorXd pruned_unconditional_mean(const SecondOrderSolution& sol);

}  // namespace cbdcnk
