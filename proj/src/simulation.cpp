#include "cbdcnk/simulation.hpp"

#include <cmath>
#include <stdexcept>

namespace cbdcnk {

IrfUnit irf_unit_of(int var_index) {
  switch (var_index) {
    case kRBond:
    case kRCbdc:
    case kRReserve:
    case kRk:
    case kChiM:
    case kChiN:
    case kChiR:
    case kChiZ:
      return IrfUnit::basis_points;
    default:
      return IrfUnit::percent;
  }
}

namespace {

std::vector<std::string> irf_columns() {
  std::vector<std::string> cols = variable_set().names;
  cols.push_back("m_over_n");
  return cols;
}

// Converts level-deviation paths into display units and assembles the result.
IrfResult finalize_irf(const std::string& shock, double size_log, int horizon,
                       const Eigen::VectorXd& steady, Eigen::MatrixXd level_dev) {
  IrfResult out;
  out.shock = shock;
  out.size_log = size_log;
  out.horizon = horizon;
  out.columns = irf_columns();
  const int ncols = static_cast<int>(out.columns.size());
  const int rows = horizon + 1;
  out.steady.resize(ncols);
  for (int v = 0; v < kNumVars; ++v) out.steady[v] = steady[v];
  out.steady[ncols - 1] = steady[kM] / steady[kN];

  // Derived ratio column from levels.
  Eigen::MatrixXd full(rows, ncols);
  full.leftCols(kNumVars) = level_dev;
  for (int t = 0; t < rows; ++t) {
    double m = steady[kM] + level_dev(t, kM);
    double n = steady[kN] + level_dev(t, kN);
    full(t, ncols - 1) = m / n - out.steady[ncols - 1];
  }
  out.level_dev = full;

  out.display.resize(rows, ncols);
  for (int j = 0; j < ncols; ++j) {
    bool bp = j < kNumVars && irf_unit_of(j) == IrfUnit::basis_points;
    double ss = out.steady[j];
    for (int t = 0; t < rows; ++t) {
      if (bp)
        out.display(t, j) = 1e4 * full(t, j);
      else if (std::abs(ss) > 1e-9)
        out.display(t, j) = 100.0 * full(t, j) / ss;
      else
        out.display(t, j) = 100.0 * full(t, j);  // zero-mean variables: scaled level
    }
  }
  return out;
}

Eigen::VectorXd impulse_vector(const std::string& shock, double size_log) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(kNumShocks);
  u[shock_index(shock)] = size_log;
  return u;
}

}  // namespace

int IrfResult::column_of(const std::string& name) const {
  for (int i = 0; i < static_cast<int>(columns.size()); ++i)
    if (columns[i] == name) return i;
  throw std::invalid_argument("IrfResult: no column named " + name);
}

IrfResult compute_irf(const FirstOrderSolution& sol, const std::string& shock, double size_log,
                      int horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  Eigen::VectorXd u = impulse_vector(shock, size_log);
  Eigen::MatrixXd dev(horizon + 1, kNumVars);
  Eigen::VectorXd vhat = sol.Q * u;
  dev.row(0) = vhat.transpose();
  Eigen::VectorXd w = sol.he * u;
  for (int t = 1; t <= horizon; ++t) {
    vhat = sol.gx * w;
    dev.row(t) = vhat.transpose();
    w = sol.hx * w;
  }
  return finalize_irf(shock, size_log, horizon, sol.steady, std::move(dev));
}

IrfResult compute_irf(const SecondOrderSolution& sol, const std::string& shock, double size_log,
                      int horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  Eigen::VectorXd u = impulse_vector(shock, size_log);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(kNumShocks);
  const int ns = sol.first.n_states;
  Eigen::MatrixXd dev(horizon + 1, kNumVars);
  // Difference against the shock-free pruned path so the sigma^2 drift cancels.
  PrunedState shocked = PrunedState::zero(ns);
  PrunedState base = PrunedState::zero(ns);
  for (int t = 0; t <= horizon; ++t) {
    auto [s_next, s_levels] = step_pruned(sol, shocked, t == 0 ? u : zero);
    auto [b_next, b_levels] = step_pruned(sol, base, zero);
    dev.row(t) = (s_levels - b_levels).transpose();
    shocked = std::move(s_next);
    base = std::move(b_next);
  }
  return finalize_irf(shock, size_log, horizon, sol.first.steady, std::move(dev));
}

IrfOverlay overlay_irfs(const std::vector<IrfResult>& runs) {
  if (runs.empty()) throw std::invalid_argument("overlay_irfs: no runs");
  IrfOverlay out;
  out.shock = runs[0].shock;
  out.size_log = runs[0].size_log;
  out.horizon = runs[0].horizon;
  out.columns = runs[0].columns;
  for (const IrfResult& r : runs) {
    if (r.shock != out.shock || r.horizon != out.horizon)
      throw std::invalid_argument("overlay_irfs: mismatched shock or horizon");
    out.labels.push_back(r.variant_label.empty() ? "run" + std::to_string(out.labels.size())
                                                 : r.variant_label);
    out.display.push_back(r.display);
  }
  return out;
}

double GaussianStream::next_uniform() {
  // splitmix64; top 53 bits mapped into (0, 1).
  state_ += 0x9E3779B97f4A7C15ull;
  unsigned long long x = state_;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  x ^= x >> 31;
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

double GaussianStream::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = next_uniform();
  double u2 = next_uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * M_PI * u2);
  have_spare_ = true;
  return r * std::cos(2.0 * M_PI * u2);
}

SimulationResult simulate(const SecondOrderSolution& sol, int periods, unsigned long seed) {
  if (periods < 1) throw std::invalid_argument("periods must be >= 1");
  const int ns = sol.first.n_states;
  Eigen::VectorXd sigma(kNumShocks);
  for (int s = 0; s < kNumShocks; ++s) sigma[s] = std::sqrt(sol.shock_cov(s, s));

  SimulationResult out;
  out.seed = seed;
  out.levels.resize(periods, kNumVars);
  GaussianStream rng(seed);
  PrunedState st = PrunedState::zero(ns);
  Eigen::VectorXd u(kNumShocks);
  for (int t = 0; t < periods; ++t) {
    for (int s = 0; s < kNumShocks; ++s) u[s] = sigma[s] == 0.0 ? 0.0 : sigma[s] * rng.next();
    auto [next, levels] = step_pruned(sol, st, u);
    out.levels.row(t) = levels.transpose();
    st = std::move(next);
  }
  return out;
}

}  // namespace cbdcnk
