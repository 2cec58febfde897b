#include "cbdcnk/calibration.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace cbdcnk {

namespace {

const char* kShockNames[kNumShocks] = {"lambda", "eps", "a", "g", "eta", "e_R", "e_m"};

void require(bool ok, const std::string& field, double value) {
  if (!ok) {
    std::ostringstream os;
    os << field << " out of range (got " << value << ")";
    throw ConfigError(os.str());
  }
}

}  // namespace

const char* shock_name(int idx) {
  if (idx < 0 || idx >= kNumShocks) throw ConfigError("shock index out of range");
  return kShockNames[idx];
}

int shock_index(const std::string& name) {
  for (int i = 0; i < kNumShocks; ++i)
    if (name == kShockNames[i]) return i;
  throw ConfigError("unknown shock name: " + name);
}

std::string to_string(BankingStructure b) {
  return b == BankingStructure::monopolist ? "monopolist" : "competitive";
}

std::string to_string(CbdcRateRegime r) {
  return r == CbdcRateRegime::taylor_rule ? "taylor_rule" : "fixed_gross_rate_one";
}

void Calibration::validate() const {
  require(beta > 0 && beta < 1, "beta", beta);
  require(sigma > 0, "sigma", sigma);
  require(psi > 0, "psi", psi);
  require(iota > 0, "iota", iota);
  require(v > 0 && v < 1, "v", v);
  require(xi > 0, "xi", xi);
  require(lambda_bar >= 0, "lambda_bar", lambda_bar);
  require(eps_bar >= 0, "eps_bar", eps_bar);
  require(phi >= 0, "phi", phi);
  require(varphi > 1, "varphi", varphi);
  require(e_bank > 0, "e_bank", e_bank);
  require(alpha > 0 && alpha < 1, "alpha", alpha);
  require(delta > 0 && delta < 1, "delta", delta);
  require(theta_calvo >= 0 && theta_calvo < 1, "theta_calvo", theta_calvo);
  require(eta_bar > 0 && eta_bar < 1, "eta_bar", eta_bar);
  require(theta_c >= 0, "theta_c", theta_c);
  require(a_bar > 0, "a_bar", a_bar);
  require(mu_r >= 0, "mu_r", mu_r);
  require(mu_m >= 0, "mu_m", mu_m);
  require(g_bar >= 0, "g_bar", g_bar);
  require(pi_bar > 0, "pi_bar", pi_bar);
  require(R_r_bar > 0, "R_r_bar", R_r_bar);
  require(R_m_bar > 0, "R_m_bar", R_m_bar);
  for (const auto* rule : {&bond_rule, &cbdc_rule}) {
    require(rule->rho >= 0 && rule->rho <= 0.99, "rule.rho", rule->rho);
    require(rule->theta_pi >= 0, "rule.theta_pi", rule->theta_pi);
    require(rule->theta_y >= 0, "rule.theta_y", rule->theta_y);
  }
  for (int i = 0; i < kNumShocks; ++i) {
    require(rho_shocks[i] >= 0 && rho_shocks[i] < 1, std::string("rho_") + kShockNames[i],
            rho_shocks[i]);
    require(sigma_shocks[i] >= 0, std::string("sigma_") + kShockNames[i], sigma_shocks[i]);
  }
}

void CalibrationTargets::validate() const {
  require(liquidity_output_ratio > 0, "liquidity_output_ratio", liquidity_output_ratio);
  require(labor_target > 0, "labor_target", labor_target);
  require(liquidity_ratio_target > 0, "liquidity_ratio_target", liquidity_ratio_target);
  require(bank_capital_share_target > 0 && bank_capital_share_target < 1,
          "bank_capital_share_target", bank_capital_share_target);
  require(reserve_spread_target > 0, "reserve_spread_target", reserve_spread_target);
}

Calibration baseline_calibration() {
  Calibration cal;  // defaults are the Table-1 baseline
  cal.R_r_bar = (cal.pi_bar / cal.beta) * (1.0 - CalibrationTargets{}.reserve_spread_target);
  return cal;
}

std::array<double, kNumShocks> welfare_shock_sigmas() {
  return {0.25, 0.25, 0.0064, 0.016, 0.14, 0.0, 0.0};
}

std::array<double, kNumShocks> shock_sigma_preset(const std::string& name) {
  if (name == "welfare") return welfare_shock_sigmas();
  if (name == "zero") return {0, 0, 0, 0, 0, 0, 0};
  throw ConfigError("unknown shock preset: " + name);
}

// ---------------------------------------------------------------------------
// Config file parsing: sectioned key = value lines, '#' or ';' comments.

namespace {

using KvMap = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    double x = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse numeric value for '" + key + "': " + value);
  }
}

struct Sections {
  std::map<std::string, KvMap> by_name;
};

Sections tokenize(const std::string& text) {
  Sections out;
  std::string section = "calibration";
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    size_t hash = s.find_first_of("#;");
    if (hash != std::string::npos) s = trim(s.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw ConfigError("malformed section header at line " + std::to_string(lineno));
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value at line " + std::to_string(lineno));
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key at line " + std::to_string(lineno));
    out.by_name[section][key] = value;
  }
  return out;
}

void apply_calibration(const KvMap& kv, Calibration* cal, CalibrationTargets* targets) {
  std::map<std::string, double*> fields = {
      {"beta", &cal->beta},
      {"sigma", &cal->sigma},
      {"psi", &cal->psi},
      {"iota", &cal->iota},
      {"v", &cal->v},
      {"xi", &cal->xi},
      {"lambda_bar", &cal->lambda_bar},
      {"eps_bar", &cal->eps_bar},
      {"phi", &cal->phi},
      {"varphi", &cal->varphi},
      {"e_bank", &cal->e_bank},
      {"alpha", &cal->alpha},
      {"delta", &cal->delta},
      {"theta_calvo", &cal->theta_calvo},
      {"eta_bar", &cal->eta_bar},
      {"theta_c", &cal->theta_c},
      {"a_bar", &cal->a_bar},
      {"mu_r", &cal->mu_r},
      {"mu_m", &cal->mu_m},
      {"g_bar", &cal->g_bar},
      {"pi_bar", &cal->pi_bar},
      {"R_r_bar", &cal->R_r_bar},
      {"R_m_bar", &cal->R_m_bar},
      {"target_liquidity_output_ratio", &targets->liquidity_output_ratio},
      {"target_labor", &targets->labor_target},
      {"target_liquidity_ratio", &targets->liquidity_ratio_target},
      {"target_bank_capital_share", &targets->bank_capital_share_target},
      {"target_reserve_spread", &targets->reserve_spread_target},
  };
  for (const auto& [key, value] : kv) {
    auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError("unknown key in [calibration]: " + key);
    *it->second = parse_double(key, value);
  }
}

void apply_variant(const KvMap& kv, ModelVariant* variant) {
  for (const auto& [key, value] : kv) {
    if (key == "banking") {
      if (value == "monopolist")
        variant->banking = BankingStructure::monopolist;
      else if (value == "competitive")
        variant->banking = BankingStructure::competitive;
      else
        throw ConfigError("banking must be monopolist or competitive, got " + value);
    } else if (key == "cbdc_rate_regime") {
      if (value == "taylor_rule")
        variant->cbdc_rate_regime = CbdcRateRegime::taylor_rule;
      else if (value == "fixed_gross_rate_one")
        variant->cbdc_rate_regime = CbdcRateRegime::fixed_gross_rate_one;
      else
        throw ConfigError("cbdc_rate_regime must be taylor_rule or fixed_gross_rate_one, got " +
                          value);
    } else {
      throw ConfigError("unknown key in [variant]: " + key);
    }
  }
}

void apply_shocks(const KvMap& kv, Calibration* cal) {
  for (const auto& [key, value] : kv) {
    if (key == "preset") {
      cal->sigma_shocks = shock_sigma_preset(value);
      continue;
    }
    bool done = false;
    for (int i = 0; i < kNumShocks; ++i) {
      if (key == std::string("rho_") + kShockNames[i]) {
        cal->rho_shocks[i] = parse_double(key, value);
        done = true;
      } else if (key == std::string("sigma_") + kShockNames[i]) {
        cal->sigma_shocks[i] = parse_double(key, value);
        done = true;
      }
    }
    if (!done) throw ConfigError("unknown key in [shocks]: " + key);
  }
}

void apply_rules(const KvMap& kv, Calibration* cal) {
  std::map<std::string, double*> fields = {
      {"bond_rho", &cal->bond_rule.rho},
      {"bond_theta_pi", &cal->bond_rule.theta_pi},
      {"bond_theta_y", &cal->bond_rule.theta_y},
      {"cbdc_rho", &cal->cbdc_rule.rho},
      {"cbdc_theta_pi", &cal->cbdc_rule.theta_pi},
      {"cbdc_theta_y", &cal->cbdc_rule.theta_y},
  };
  for (const auto& [key, value] : kv) {
    auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError("unknown key in [rules]: " + key);
    *it->second = parse_double(key, value);
  }
}

void apply_experiment(const KvMap& kv, ExperimentSettings* exp) {
  for (const auto& [key, value] : kv) {
    if (key == "shock") {
      shock_index(value);  // validates
      exp->shock = value;
    } else if (key == "size") {
      // "log:<x>" or "pct:<p>"; bare numbers are log innovations.
      if (value.rfind("pct:", 0) == 0)
        exp->size_log = std::log1p(parse_double(key, value.substr(4)) / 100.0);
      else if (value.rfind("log:", 0) == 0)
        exp->size_log = parse_double(key, value.substr(4));
      else
        exp->size_log = parse_double(key, value);
    } else if (key == "horizon") {
      exp->horizon = static_cast<int>(parse_double(key, value));
      if (exp->horizon < 1) throw ConfigError("horizon must be >= 1");
    } else if (key == "periods") {
      exp->periods = static_cast<int>(parse_double(key, value));
      if (exp->periods < 1) throw ConfigError("periods must be >= 1");
    } else if (key == "seed") {
      exp->seed = static_cast<unsigned long>(parse_double(key, value));
    } else if (key == "order") {
      exp->order = static_cast<int>(parse_double(key, value));
      if (exp->order != 1 && exp->order != 2) throw ConfigError("order must be 1 or 2");
    } else if (key == "output_dir") {
      exp->output_dir = value;
    } else {
      throw ConfigError("unknown key in [experiment]: " + key);
    }
  }
}

}  // namespace

Config parse_config_text(const std::string& text) {
  Config cfg;
  cfg.calibration = baseline_calibration();
  Sections sec = tokenize(text);
  for (const auto& [name, kv] : sec.by_name) {
    if (name == "calibration")
      apply_calibration(kv, &cfg.calibration, &cfg.targets);
    else if (name == "variant")
      apply_variant(kv, &cfg.variant);
    else if (name == "shocks")
      apply_shocks(kv, &cfg.calibration);
    else if (name == "rules")
      apply_rules(kv, &cfg.calibration);
    else if (name == "experiment")
      apply_experiment(kv, &cfg.experiment);
    else
      throw ConfigError("unknown section: [" + name + "]");
  }
  cfg.calibration.validate();
  cfg.targets.validate();
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const Config& cfg) {
  std::ostringstream os;
  os.precision(17);
  const Calibration& c = cfg.calibration;
  os << "[calibration]\n";
  os << "beta = " << c.beta << "\nsigma = " << c.sigma << "\npsi = " << c.psi
     << "\niota = " << c.iota << "\nv = " << c.v << "\nxi = " << c.xi
     << "\nlambda_bar = " << c.lambda_bar << "\neps_bar = " << c.eps_bar << "\nphi = " << c.phi
     << "\nvarphi = " << c.varphi << "\ne_bank = " << c.e_bank << "\nalpha = " << c.alpha
     << "\ndelta = " << c.delta << "\ntheta_calvo = " << c.theta_calvo
     << "\neta_bar = " << c.eta_bar << "\ntheta_c = " << c.theta_c << "\na_bar = " << c.a_bar
     << "\nmu_r = " << c.mu_r << "\nmu_m = " << c.mu_m << "\ng_bar = " << c.g_bar
     << "\npi_bar = " << c.pi_bar << "\nR_r_bar = " << c.R_r_bar << "\nR_m_bar = " << c.R_m_bar
     << "\n";
  os << "target_liquidity_output_ratio = " << cfg.targets.liquidity_output_ratio << "\n";
  os << "target_labor = " << cfg.targets.labor_target << "\n";
  os << "target_liquidity_ratio = " << cfg.targets.liquidity_ratio_target << "\n";
  os << "target_bank_capital_share = " << cfg.targets.bank_capital_share_target << "\n";
  os << "target_reserve_spread = " << cfg.targets.reserve_spread_target << "\n";
  os << "\n[variant]\n";
  os << "banking = " << to_string(cfg.variant.banking) << "\n";
  os << "cbdc_rate_regime = " << to_string(cfg.variant.cbdc_rate_regime) << "\n";
  os << "\n[rules]\n";
  os << "bond_rho = " << c.bond_rule.rho << "\nbond_theta_pi = " << c.bond_rule.theta_pi
     << "\nbond_theta_y = " << c.bond_rule.theta_y << "\n";
  os << "cbdc_rho = " << c.cbdc_rule.rho << "\ncbdc_theta_pi = " << c.cbdc_rule.theta_pi
     << "\ncbdc_theta_y = " << c.cbdc_rule.theta_y << "\n";
  os << "\n[shocks]\n";
  for (int i = 0; i < kNumShocks; ++i)
    os << "rho_" << kShockNames[i] << " = " << c.rho_shocks[i] << "\n";
  for (int i = 0; i < kNumShocks; ++i)
    os << "sigma_" << kShockNames[i] << " = " << c.sigma_shocks[i] << "\n";
  os << "\n[experiment]\n";
  os << "shock = " << cfg.experiment.shock << "\n";
  os << "size = log:" << cfg.experiment.size_log << "\n";
  os << "horizon = " << cfg.experiment.horizon << "\n";
  os << "periods = " << cfg.experiment.periods << "\n";
  os << "seed = " << cfg.experiment.seed << "\n";
  os << "order = " << cfg.experiment.order << "\n";
  os << "output_dir = " << cfg.experiment.output_dir << "\n";
  return os.str();
}

}  // namespace cbdcnk
