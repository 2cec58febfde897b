#pragma once

#include <Eigen/Dense>

#include "cbdcnk/calibration.hpp"
#include "cbdcnk/model.hpp"

namespace cbdcnk {

struct SteadyState {
  Eigen::VectorXd values;    // per VariableSet entry, levels
  Calibration cal;           // resolved calibration used for the solve
  ModelVariant variant;
  SteadyAnchors anchors;     // constants the dynamic system needs

  double operator[](int idx) const { return values[idx]; }
  double by_name(const std::string& name) const;

  // Dynamic-mode system consistent with this steady state.
  EquationSystem make_system() const;
};

// Replaces (v, xi, phi, e_bank, mu_m) with values that hit every target
// exactly, and aligns R_r_bar with the reserve-spread target. The solve is
// anchored at the monopolist steady state for the calibration's lambda_bar.
Calibration calibrate_internal_parameters(const Calibration& cal,
                                          const CalibrationTargets& targets);

// Deterministic steady state for a fully resolved calibration.
SteadyState solve_steady_state(const Calibration& cal, const ModelVariant& variant);

// Steady-state deposit spread from the pricing equation given the reserve-rate
// block; scalar fixed point over (chi_n, chi_z, s). Exposed for reuse and
// validation against the brute-force oracle in the tests.
double steady_deposit_spread(double chi_m, double marginal_cost, double lambda_bar,
                             double eps_bar, double psi, bool monopolist);

}  // namespace cbdcnk
