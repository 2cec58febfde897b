#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cbdcnk/perturbation.hpp"

namespace cbdcnk {

// Display units per variable: quantities and prices in percent deviation from
// steady state, interest rates and spreads in basis-point level deviations.
enum class IrfUnit { percent, basis_points };
IrfUnit irf_unit_of(int var_index);

struct IrfResult {
  std::string shock;
  double size_log = 0.0;
  int horizon = 0;
  std::string variant_label;
  std::vector<std::string> columns;  // kNumVars names plus "m_over_n"
  Eigen::MatrixXd level_dev;  // (horizon+1) x columns, level deviations
  Eigen::MatrixXd display;    // (horizon+1) x columns, display units
  Eigen::VectorXd steady;     // steady-state levels per variable column

  int column_of(const std::string& name) const;  // throws if absent
  double impact(const std::string& name) const { return display(0, column_of(name)); }
};

// One-time log innovation at t = 0, zero afterwards; linear propagation.
IrfResult compute_irf(const FirstOrderSolution& sol, const std::string& shock, double size_log,
                      int horizon);

// Pruned second-order IRF with a one-time deterministic innovation.
IrfResult compute_irf(const SecondOrderSolution& sol, const std::string& shock, double size_log,
                      int horizon);

struct IrfOverlay {
  std::string shock;
  double size_log = 0.0;
  int horizon = 0;
  std::vector<std::string> labels;
  std::vector<std::string> columns;
  std::vector<Eigen::MatrixXd> display;  // one block per run, aligned columns
};

IrfOverlay overlay_irfs(const std::vector<IrfResult>& runs);

struct SimulationResult {
  Eigen::MatrixXd levels;  // T x kNumVars
  unsigned long seed = 0;
};

// Pruned stochastic simulation, i.i.d. normal innovations with the standard
// deviations embedded in sol.shock_cov; deterministic given the seed.
SimulationResult simulate(const SecondOrderSolution& sol, int periods, unsigned long seed);

// Portable gaussian stream (splitmix64 + Box-Muller); identical output across
// platforms for a given seed.
class GaussianStream {
 public:
  explicit GaussianStream(unsigned long seed) : state_(seed) {}
  double next();

 private:
  double next_uniform();  // in (0, 1)
  unsigned long long state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cbdcnk
