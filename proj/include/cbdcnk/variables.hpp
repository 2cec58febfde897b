#pragma once

#include <string>
#include <vector>

namespace cbdcnk {

// Model variables, end-of-period timing: stocks, rates and spreads dated t are
// chosen/known at t (rates apply between t and t+1). Lags carry the states.
enum VarIndex : int {
  kC = 0,      // consumption
  kL,          // hours worked
  kZ,          // liquidity services
  kM,          // real CBDC balances
  kN,          // real deposits
  kB,          // real government bonds
  kK,          // capital stock
  kKh,         // household capital
  kKb,         // bank capital
  kRres,       // reserves
  kZeta,       // bank liquidity ratio
  kQ,          // capital price
  kIGross,     // gross investment
  kINet,       // net investment
  kY,          // output
  kYm,         // intermediate output
  kPi,         // gross inflation
  kPiReset,    // reset inflation
  kVp,         // price dispersion
  kX1,         // Calvo recursion numerator
  kX2,         // Calvo recursion denominator
  kGammaMc,    // real marginal cost
  kWage,       // wage
  kDProfit,    // total profit distributed to the household
  kTau,        // lump-sum tax
  kRBond,      // gross bond rate
  kRCbdc,      // gross CBDC rate
  kRReserve,   // gross reserve rate
  kRk,         // return on capital (realized at t)
  kChiM,       // CBDC spread
  kChiN,       // deposit spread
  kChiR,       // reserve spread
  kChiZ,       // average cost of liquidity
  kOmega,      // liquidity price-index term in marginal utility
  kSWeight,    // elasticity weight s_t
  kOmegaCost,  // unit deposit-issuance cost
  kWelfare,    // welfare recursion
  kLambdaPref, // CBDC benefit (AR1)
  kEpsPref,    // inverse elasticity CBDC/deposits (AR1)
  kAProd,      // productivity (AR1)
  kGSpend,     // government spending (AR1)
  kEtaGoods,   // inverse elasticity across goods (AR1)
  kExoR,       // bond-rule innovation carrier
  kExoM,       // CBDC-rule innovation carrier
  kNumVars
};

struct VariableSet {
  std::vector<std::string> names;     // size kNumVars
  std::vector<bool> is_state;        // lag appears somewhere in the system
  std::vector<bool> is_forward;      // lead appears somewhere in the system
  std::vector<int> state_indices;    // variable index per state slot
  std::vector<int> state_slot;       // kNumVars -> slot or -1

  int num_vars() const { return static_cast<int>(names.size()); }
  int num_states() const { return static_cast<int>(state_indices.size()); }
  int index_of(const std::string& name) const;  // -1 if absent
};

const VariableSet& variable_set();

}  // namespace cbdcnk
