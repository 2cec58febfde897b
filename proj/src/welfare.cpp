#include "cbdcnk/welfare.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace cbdcnk {

namespace {

constexpr double kInfeasible = -std::numeric_limits<double>::infinity();

int worker_count(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Index-deterministic parallel for; first worker exception is rethrown.
void parallel_for(int n, int workers, const std::function<void(int)>& body) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto run = [&] {
    try {
      for (int i = next.fetch_add(1); i < n && !failed.load(); i = next.fetch_add(1)) body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
      failed.store(true);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers - 1; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

bool lex_less(const TaylorCoefficients& a, const TaylorCoefficients& b) {
  if (a.theta_pi != b.theta_pi) return a.theta_pi < b.theta_pi;
  if (a.theta_y != b.theta_y) return a.theta_y < b.theta_y;
  return a.rho < b.rho;
}

// Deterministic argmax: higher welfare wins; near-ties go to the
// lexicographically smaller coefficient vector.
bool better_point(double w_new, const TaylorCoefficients& c_new, double w_old,
                  const TaylorCoefficients& c_old) {
  if (std::isinf(w_new) && w_new < 0) return false;
  if (std::isinf(w_old) && w_old < 0) return true;
  if (w_new > w_old + 1e-12) return true;
  if (w_new < w_old - 1e-12) return false;
  return lex_less(c_new, c_old);
}

}  // namespace

WelfareEvaluator::WelfareEvaluator(const Calibration& cal, const ModelVariant& variant)
    : ss_(solve_steady_state(cal, variant)) {
  EquationSystem sys = ss_.make_system();
  base_ = differentiate(sys, ss_);
  shock_cov_ = diagonal_shock_cov(cal.sigma_shocks);
}

SecondOrderSolution WelfareEvaluator::solve(const TaylorCoefficients& bond,
                                            const TaylorCoefficients& cbdc, bool verify) const {
  ModelSpec spec;
  spec.cal = ss_.cal;
  spec.cal.bond_rule = bond;
  spec.cal.cbdc_rule = cbdc;
  spec.variant = ss_.variant;
  spec.anchors = ss_.anchors;
  Derivatives d = base_;
  patch_policy_rule_rows(spec, ss_, &d);
  SolveOptions opts;
  opts.check_residuals = verify;
  FirstOrderSolution fo = solve_first_order(d, ss_, opts);
  return solve_second_order(d, fo, shock_cov_, opts);
}

WelfareResult WelfareEvaluator::conditional_welfare(const TaylorCoefficients& bond,
                                                    const TaylorCoefficients& cbdc) const {
  WelfareResult out;
  out.variant = ss_.variant;
  out.bond_rule = bond;
  out.cbdc_rule = cbdc;
  try {
    SecondOrderSolution so = solve(bond, cbdc, false);
    // Approaching the determinacy boundary, the sigma^2 system degenerates and
    // the risk-adjusted means run away while first-order variances stay
    // finite. True welfare collapses there; such points are treated like
    // indeterminate ones.
    Eigen::VectorXd mean = pruned_unconditional_mean(so);
    double shift = 0.0;
    for (int v : {kY, kC, kL})
      shift = std::max(shift, std::abs(mean[v] / ss_.values[v] - 1.0));
    out.welfare = ss_.values[kWelfare] + so.sigma2_constant[kWelfare];
    if (!std::isfinite(out.welfare) || shift > kMeanShiftGuard) {
      out.welfare = kInfeasible;
      out.determinate = false;
    }
  } catch (const BlanchardKahnError&) {
    out.welfare = kInfeasible;
    out.determinate = false;
  }
  return out;
}

WelfareResult conditional_welfare(const Calibration& cal, const ModelVariant& variant) {
  WelfareEvaluator ev(cal, variant);
  return ev.conditional_welfare(cal.bond_rule, cal.cbdc_rule);
}

double compensating_fraction(double w_ref, double w_alt, const SteadyState& ss) {
  const Calibration& cal = ss.cal;
  const double gap = w_alt - w_ref;
  if (cal.sigma == 1.0) return 100.0 * std::expm1((1.0 - cal.beta) * gap);

  // General case: U((1+d)c, (1+d)z, l) - U(c, z, l) = (1-beta) gap.
  const double c = ss.values[kC], z = ss.values[kZ], l = ss.values[kL];
  const double u0 = utility_flow(c, z, l, cal);
  auto excess = [&](double delta) {
    return utility_flow((1.0 + delta) * c, (1.0 + delta) * z, l, cal) - u0 -
           (1.0 - cal.beta) * gap;
  };
  double lo = -0.99, hi = 10.0;
  double flo = excess(lo), fhi = excess(hi);
  if (flo * fhi > 0.0)
    throw SolverError("compensating fraction outside (-0.99, 10)");
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = excess(mid);
    if (flo * fm <= 0.0) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 100.0 * 0.5 * (lo + hi);
}

double compensating_fraction(const WelfareResult& w_ref, const WelfareResult& w_alt,
                             const SteadyState& ss) {
  if (!w_ref.determinate || !w_alt.determinate)
    throw SolverError("compensating fraction of an indeterminate welfare result");
  return compensating_fraction(w_ref.welfare, w_alt.welfare, ss);
}

// ---------------------------------------------------------------------------
// Rule optimization: coarse grid, then compass-search refinement from the
// best grid points. Deterministic regardless of worker count.

namespace {

struct Objective {
  const WelfareEvaluator* ev;
  const Calibration* cal;
  WhichRule which;

  double operator()(const TaylorCoefficients& r) const {
    TaylorCoefficients bond = which == WhichRule::bond ? r : cal->bond_rule;
    TaylorCoefficients cbdc = which == WhichRule::cbdc ? r : cal->cbdc_rule;
    try {
      return ev->conditional_welfare(bond, cbdc).welfare;
    } catch (const SolverError&) {
      // Numerical failure at a probe point counts as infeasible for the search.
      return kInfeasible;
    }
  }
};

TaylorCoefficients clamp_to(const RuleBounds& b, TaylorCoefficients r) {
  r.theta_pi = std::clamp(r.theta_pi, b.theta_pi_lo, b.theta_pi_hi);
  r.theta_y = std::clamp(r.theta_y, b.theta_y_lo, b.theta_y_hi);
  r.rho = std::clamp(r.rho, b.rho_lo, b.rho_hi);
  return r;
}

}  // namespace

OptimizationResult optimize_rule(const Calibration& cal, const ModelVariant& variant,
                                 WhichRule which, const RuleBounds& bounds,
                                 const OptimizeOptions& opts) {
  WelfareEvaluator ev(cal, variant);
  Objective obj{&ev, &cal, which};
  const int workers = worker_count(opts.workers);

  OptimizationResult out;
  long evals = 0;

  // Coarse grid.
  std::vector<TaylorCoefficients> grid;
  for (int i = 0; i < opts.grid_pi; ++i)
    for (int j = 0; j < opts.grid_y; ++j)
      for (int k = 0; k < opts.grid_rho; ++k) {
        TaylorCoefficients r;
        r.theta_pi = bounds.theta_pi_lo +
                     (bounds.theta_pi_hi - bounds.theta_pi_lo) * i / (opts.grid_pi - 1.0);
        r.theta_y =
            bounds.theta_y_lo + (bounds.theta_y_hi - bounds.theta_y_lo) * j / (opts.grid_y - 1.0);
        r.rho = bounds.rho_lo + (bounds.rho_hi - bounds.rho_lo) * k / (opts.grid_rho - 1.0);
        grid.push_back(r);
      }
  std::vector<double> grid_w(grid.size());
  parallel_for(static_cast<int>(grid.size()), workers,
               [&](int i) { grid_w[i] = obj(grid[i]); });
  evals += static_cast<long>(grid.size());

  std::vector<int> order(grid.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (grid_w[a] != grid_w[b]) return grid_w[a] > grid_w[b];
    return lex_less(grid[a], grid[b]);
  });

  bool any_feasible = false;
  for (double w : grid_w)
    if (!(std::isinf(w) && w < 0)) any_feasible = true;
  if (!any_feasible) throw BlanchardKahnError("optimize_rule: every probed point is indeterminate");

  TaylorCoefficients best = grid[order[0]];
  double best_w = grid_w[order[0]];

  // Compass-search refinement from the leading grid points.
  const int nrestart = std::min<int>(opts.refine_from_best, static_cast<int>(order.size()));
  for (int r = 0; r < nrestart; ++r) {
    if (std::isinf(grid_w[order[r]])) continue;
    TaylorCoefficients p = grid[order[r]];
    double pw = grid_w[order[r]];
    double h_pi = (bounds.theta_pi_hi - bounds.theta_pi_lo) / (opts.grid_pi - 1.0) * 0.5;
    double h_y = (bounds.theta_y_hi - bounds.theta_y_lo) / (opts.grid_y - 1.0) * 0.5;
    double h_rho = (bounds.rho_hi - bounds.rho_lo) / (opts.grid_rho - 1.0) * 0.5;
    long local_evals = 0;
    while (local_evals < opts.max_refine_evals &&
           (h_pi > opts.step_floor || h_y > opts.step_floor || h_rho > opts.step_floor)) {
      std::vector<TaylorCoefficients> cand;
      auto push = [&](double dpi, double dy, double drho) {
        TaylorCoefficients c = p;
        c.theta_pi += dpi;
        c.theta_y += dy;
        c.rho += drho;
        c = clamp_to(bounds, c);
        cand.push_back(c);
      };
      push(+h_pi, 0, 0);
      push(-h_pi, 0, 0);
      push(0, +h_y, 0);
      push(0, -h_y, 0);
      push(0, 0, +h_rho);
      push(0, 0, -h_rho);
      std::vector<double> cw(cand.size());
      parallel_for(static_cast<int>(cand.size()), workers, [&](int i) { cw[i] = obj(cand[i]); });
      local_evals += static_cast<long>(cand.size());
      int pick = -1;
      for (size_t i = 0; i < cand.size(); ++i) {
        if (std::isinf(cw[i]) && cw[i] < 0) continue;
        if (pick < 0) {
          if (cw[i] > pw + opts.welfare_tol) pick = static_cast<int>(i);
        } else if (better_point(cw[i], cand[i], cw[pick], cand[pick])) {
          pick = static_cast<int>(i);
        }
      }
      if (pick < 0) {
        h_pi *= 0.5;
        h_y *= 0.5;
        h_rho *= 0.5;
      } else {
        p = cand[pick];
        pw = cw[pick];
      }
    }
    evals += local_evals;
    if (better_point(pw, p, best_w, best)) {
      best = p;
      best_w = pw;
    }
    ++out.restarts;
  }

  if (std::isinf(best_w) && best_w < 0)
    throw BlanchardKahnError("optimize_rule: refinement found no determinate point");

  out.best = best;
  out.best_welfare = best_w;
  out.evaluations = evals;
  const double tol = 1e-6;
  out.boundary_solution = std::abs(best.theta_pi - bounds.theta_pi_lo) < tol ||
                          std::abs(best.theta_pi - bounds.theta_pi_hi) < tol ||
                          std::abs(best.theta_y - bounds.theta_y_lo) < tol ||
                          std::abs(best.theta_y - bounds.theta_y_hi) < tol ||
                          std::abs(best.rho - bounds.rho_lo) < tol ||
                          std::abs(best.rho - bounds.rho_hi) < tol;
  return out;
}

TwoStepRow run_two_step_experiment(const Calibration& cal_in, BankingStructure banking,
                                   const OptimizeOptions& opts) {
  Calibration cal = cal_in;
  TwoStepRow row;
  row.banking = banking;
  row.lambda_bar = cal.lambda_bar;

  // Step 1: non-interest-bearing CBDC, optimize the bond rule.
  ModelVariant fixed{banking, CbdcRateRegime::fixed_gross_rate_one};
  OptimizationResult step1 = optimize_rule(cal, fixed, WhichRule::bond, RuleBounds{}, opts);
  row.bond_opt = step1.best;
  row.welfare_fixed = step1.best_welfare;
  row.evaluations = step1.evaluations;

  // Step 2: CBDC Taylor rule with the step-1 bond coefficients held fixed.
  cal.bond_rule = step1.best;
  ModelVariant taylor{banking, CbdcRateRegime::taylor_rule};
  WelfareEvaluator ev(cal, taylor);
  WelfareResult base_rule = ev.conditional_welfare(cal.bond_rule, TaylorCoefficients{0.5, 1.5, 0.2});
  OptimizationResult step2 = optimize_rule(cal, taylor, WhichRule::cbdc, RuleBounds{}, opts);
  row.cbdc_opt = step2.best;
  row.evaluations += step2.evaluations;

  if (!base_rule.determinate)
    throw BlanchardKahnError("baseline CBDC Taylor coefficients are indeterminate");
  row.gain_baseline_pct =
      compensating_fraction(row.welfare_fixed, base_rule.welfare, ev.steady_state());
  row.gain_optimized_pct =
      compensating_fraction(row.welfare_fixed, step2.best_welfare, ev.steady_state());
  return row;
}

std::vector<TwoStepRow> run_all_specifications(const Calibration& base,
                                               const CalibrationTargets& targets,
                                               const OptimizeOptions& opts,
                                               std::function<void(const TwoStepRow&)> on_row) {
  Calibration anchor = base;
  anchor.lambda_bar = 1.0;
  anchor.sigma_shocks = welfare_shock_sigmas();
  Calibration cal0 = calibrate_internal_parameters(anchor, targets);
  const double zeta = targets.liquidity_ratio_target;
  const double omega_c = cal0.phi * std::pow(zeta, 1.0 - cal0.varphi);

  struct Spec {
    BankingStructure banking;
    double lambda_bar;
  };
  std::vector<Spec> specs;
  for (BankingStructure banking : {BankingStructure::monopolist, BankingStructure::competitive})
    for (double lam : {1.0, 0.9, 1.1}) specs.push_back({banking, lam});

  std::vector<TwoStepRow> rows(specs.size());
  std::mutex progress_mu;
  parallel_for(static_cast<int>(specs.size()), std::max(1, opts.spec_workers), [&](int i) {
    Calibration cal = cal0;
    cal.lambda_bar = specs[i].lambda_bar;
    cal.mu_m = (omega_c + zeta * cal.mu_r) * specs[i].lambda_bar;  // CBDC cost rule
    rows[i] = run_two_step_experiment(cal, specs[i].banking, opts);
    if (on_row) {
      std::lock_guard<std::mutex> lock(progress_mu);
      on_row(rows[i]);
    }
  });
  return rows;
}

}  // namespace cbdcnk
