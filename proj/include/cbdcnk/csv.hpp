#pragma once

#include <string>
#include <vector>

#include "cbdcnk/simulation.hpp"
#include "cbdcnk/steady_state.hpp"
#include "cbdcnk/welfare.hpp"

namespace cbdcnk {

// 12 significant digits, locale-independent.
std::string format_number(double x);

// Writes via temp file + rename so readers never observe partial output.
void write_text_atomic(const std::string& path, const std::string& content);

std::string steady_state_csv(const SteadyState& ss);
std::string irf_csv(const IrfResult& irf);
std::string overlay_csv(const IrfOverlay& overlay);
std::string simulation_csv(const SimulationResult& sim);
std::string welfare_table_csv(const std::vector<TwoStepRow>& rows);
std::string cbdc_coefficients_csv(const std::vector<TwoStepRow>& rows);
std::string bond_coefficients_csv(const std::vector<TwoStepRow>& rows);

}  // namespace cbdcnk
