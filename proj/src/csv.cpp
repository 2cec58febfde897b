#include "cbdcnk/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace cbdcnk {

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string steady_state_csv(const SteadyState& ss) {
  std::ostringstream os;
  os << "variable,value\n";
  const VariableSet& vs = variable_set();
  for (int i = 0; i < vs.num_vars(); ++i)
    os << vs.names[i] << "," << format_number(ss.values[i]) << "\n";
  return os.str();
}

std::string irf_csv(const IrfResult& irf) {
  std::ostringstream os;
  os << "quarter";
  for (size_t j = 0; j < irf.columns.size(); ++j) {
    bool bp = j < kNumVars && irf_unit_of(static_cast<int>(j)) == IrfUnit::basis_points;
    os << "," << irf.columns[j] << (bp ? "_bp" : "_pct");
  }
  os << "\n";
  for (int t = 0; t <= irf.horizon; ++t) {
    os << t;
    for (int j = 0; j < irf.display.cols(); ++j) os << "," << format_number(irf.display(t, j));
    os << "\n";
  }
  return os.str();
}

std::string overlay_csv(const IrfOverlay& overlay) {
  std::ostringstream os;
  os << "quarter";
  for (size_t r = 0; r < overlay.display.size(); ++r)
    for (size_t j = 0; j < overlay.columns.size(); ++j) {
      bool bp = j < kNumVars && irf_unit_of(static_cast<int>(j)) == IrfUnit::basis_points;
      os << "," << overlay.columns[j] << (bp ? "_bp" : "_pct") << "@" << overlay.labels[r];
    }
  os << "\n";
  for (int t = 0; t <= overlay.horizon; ++t) {
    os << t;
    for (const Eigen::MatrixXd& block : overlay.display)
      for (int j = 0; j < block.cols(); ++j) os << "," << format_number(block(t, j));
    os << "\n";
  }
  return os.str();
}

std::string simulation_csv(const SimulationResult& sim) {
  std::ostringstream os;
  const VariableSet& vs = variable_set();
  os << "period";
  for (const std::string& n : vs.names) os << "," << n;
  os << "\n";
  for (int t = 0; t < sim.levels.rows(); ++t) {
    os << t;
    for (int j = 0; j < sim.levels.cols(); ++j) os << "," << format_number(sim.levels(t, j));
    os << "\n";
  }
  return os.str();
}

namespace {
std::string spec_label(const TwoStepRow& r) {
  std::ostringstream os;
  os << to_string(r.banking) << ",lambda=" << format_number(r.lambda_bar);
  return os.str();
}
}  // namespace

std::string welfare_table_csv(const std::vector<TwoStepRow>& rows) {
  std::ostringstream os;
  os << "banking,specification,welfare_fixed_rate,gain_baseline_taylor_pct,gain_optimized_pct\n";
  for (const TwoStepRow& r : rows)
    os << spec_label(r) << "," << format_number(r.welfare_fixed) << ","
       << format_number(r.gain_baseline_pct) << "," << format_number(r.gain_optimized_pct)
       << "\n";
  return os.str();
}

std::string cbdc_coefficients_csv(const std::vector<TwoStepRow>& rows) {
  std::ostringstream os;
  os << "banking,specification,theta_pi_m,theta_y_m,rho_m\n";
  for (const TwoStepRow& r : rows)
    os << spec_label(r) << "," << format_number(r.cbdc_opt.theta_pi) << ","
       << format_number(r.cbdc_opt.theta_y) << "," << format_number(r.cbdc_opt.rho) << "\n";
  return os.str();
}

std::string bond_coefficients_csv(const std::vector<TwoStepRow>& rows) {
  std::ostringstream os;
  os << "banking,specification,theta_pi,theta_y,rho_R\n";
  for (const TwoStepRow& r : rows)
    os << spec_label(r) << "," << format_number(r.bond_opt.theta_pi) << ","
       << format_number(r.bond_opt.theta_y) << "," << format_number(r.bond_opt.rho) << "\n";
  return os.str();
}

}  // namespace cbdcnk
