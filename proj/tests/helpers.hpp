#pragma once

#include "cbdcnk/welfare.hpp"

namespace cbdcnk::testing {

struct BaselineFixture {
  Calibration cal;             // calibrated to the Table-1 targets
  SteadyState ss;              // monopolist, taylor regime
  Derivatives derivs;
  FirstOrderSolution first;
};

// Shared across test cases; solved once.
inline const BaselineFixture& baseline_fixture() {
  static const BaselineFixture fx = [] {
    Calibration cal = calibrate_internal_parameters(baseline_calibration(), CalibrationTargets{});
    ModelVariant variant{BankingStructure::monopolist, CbdcRateRegime::taylor_rule};
    SteadyState ss = solve_steady_state(cal, variant);
    Derivatives d = differentiate(ss.make_system(), ss);
    FirstOrderSolution fo = solve_first_order(d, ss);
    return BaselineFixture{cal, ss, std::move(d), std::move(fo)};
  }();
  return fx;
}

// Small deterministic generator for test point sampling.
inline double unit_rand(unsigned long long& state) {
  state += 0x9E3779B97f4A7C15ull;
  unsigned long long x = state;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  x ^= x >> 31;
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace cbdcnk::testing
