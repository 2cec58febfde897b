#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cbdcnk/perturbation.hpp"
#include "cbdcnk/simulation.hpp"
#include "cbdcnk/steady_state.hpp"

namespace cbdcnk {

struct WelfareResult {
  double welfare = 0.0;       // conditional welfare level (model units)
  bool determinate = true;    // false: BK failure, welfare is a -inf marker
  ModelVariant variant;
  TaylorCoefficients bond_rule;
  TaylorCoefficients cbdc_rule;
  std::string preset = "welfare";
};

struct RuleBounds {
  double theta_pi_lo = 0.0, theta_pi_hi = 4.0;
  double theta_y_lo = 0.0, theta_y_hi = 4.0;
  double rho_lo = 0.0, rho_hi = 0.99;
};

struct OptimizationResult {
  TaylorCoefficients best;
  double best_welfare = 0.0;
  double reference_welfare = 0.0;        // filled by the two-step driver
  double compensating_fraction_pct = 0.0;
  long evaluations = 0;
  int restarts = 0;
  bool boundary_solution = false;
  std::vector<TaylorCoefficients> probed_grid;  // diagnostics
};

enum class WhichRule { bond, cbdc };

// Caches the steady state and the policy-independent derivative set for one
// (calibration, variant) pair; objective evaluations patch only the two
// Taylor-rule rows.
class WelfareEvaluator {
 public:
  // A probe whose risk-adjusted unconditional mean moves output, consumption,
  // hours or liquidity further than this (relative to steady state) is outside
  // the approximation's validity region and counts as infeasible.
  static constexpr double kMeanShiftGuard = 0.15;

  WelfareEvaluator(const Calibration& cal, const ModelVariant& variant);

  // Conditional welfare at the deterministic steady state (level plus the
  // welfare sigma^2 constant); -inf marker when indeterminate.
  WelfareResult conditional_welfare(const TaylorCoefficients& bond,
                                    const TaylorCoefficients& cbdc) const;

  const SteadyState& steady_state() const { return ss_; }

  // Full second-order solution for the given rules (throws on BK failure).
  SecondOrderSolution solve(const TaylorCoefficients& bond, const TaylorCoefficients& cbdc,
                            bool verify = false) const;

 private:
  SteadyState ss_;
  Derivatives base_;
  Eigen::MatrixXd shock_cov_;
};

// Conditional welfare under the calibration's embedded rules and the shock
// standard deviations already set in cal.sigma_shocks.
WelfareResult conditional_welfare(const Calibration& cal, const ModelVariant& variant);

// Percent Delta such that scaling the reference economy's steady-state
// consumption-liquidity bundle by (1+Delta) closes the welfare gap.
double compensating_fraction(const WelfareResult& w_ref, const WelfareResult& w_alt,
                             const SteadyState& ss);
double compensating_fraction(double w_ref, double w_alt, const SteadyState& ss);

struct OptimizeOptions {
  int grid_pi = 9, grid_y = 9, grid_rho = 5;
  int refine_from_best = 5;
  double welfare_tol = 1e-8;
  double step_floor = 1e-5;
  int max_refine_evals = 4000;
  int workers = 0;       // objective-evaluation workers (0: hardware concurrency)
  int spec_workers = 1;  // specification fan-out in run_all_specifications
};

OptimizationResult optimize_rule(const Calibration& cal, const ModelVariant& variant,
                                 WhichRule which, const RuleBounds& bounds = {},
                                 const OptimizeOptions& opts = {});

// One row of the six-specification welfare experiment.
struct TwoStepRow {
  BankingStructure banking = BankingStructure::monopolist;
  double lambda_bar = 1.0;
  double welfare_fixed = 0.0;          // column (1)
  double gain_baseline_pct = 0.0;      // column (2): CBDC rule (1.5, 0.2, 0.5)
  double gain_optimized_pct = 0.0;     // column (3)
  TaylorCoefficients bond_opt;         // step-1 optimum
  TaylorCoefficients cbdc_opt;         // step-2 optimum
  long evaluations = 0;
};

// Step 1: optimal bond rule under a fixed (gross rate 1) CBDC; step 2: optimal
// CBDC Taylor rule holding the step-1 bond rule fixed. The calibration must
// already be resolved; sigma_shocks should carry the welfare preset.
TwoStepRow run_two_step_experiment(const Calibration& cal, BankingStructure banking,
                                   const OptimizeOptions& opts = {});

// All six specifications: {monopolist, competitive} x lambda in {0.9, 1, 1.1}.
// Calibrates internal parameters once at the monopolist baseline, then varies
// lambda_bar (with mu_m following its cost rule) and the banking structure.
std::vector<TwoStepRow> run_all_specifications(const Calibration& base,
                                               const CalibrationTargets& targets,
                                               const OptimizeOptions& opts = {},
                                               std::function<void(const TwoStepRow&)> on_row = {});

}  // namespace cbdcnk
