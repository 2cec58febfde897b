#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "cbdcnk/csv.hpp"
#include "cbdcnk/svg.hpp"
#include "cbdcnk/welfare.hpp"

namespace {

using namespace cbdcnk;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::string banking;
  std::string regime;
  bool no_calibrate = false;
};

Config load(const CommonArgs& a) {
  Config cfg = a.config_path.empty() ? Config{} : load_config(a.config_path);
  if (a.config_path.empty()) cfg.calibration = baseline_calibration();
  if (!a.banking.empty()) {
    if (a.banking == "monopolist")
      cfg.variant.banking = BankingStructure::monopolist;
    else if (a.banking == "competitive")
      cfg.variant.banking = BankingStructure::competitive;
    else
      throw ConfigError("--banking must be monopolist or competitive");
  }
  if (!a.regime.empty()) {
    if (a.regime == "taylor")
      cfg.variant.cbdc_rate_regime = CbdcRateRegime::taylor_rule;
    else if (a.regime == "fixed")
      cfg.variant.cbdc_rate_regime = CbdcRateRegime::fixed_gross_rate_one;
    else if (a.regime != "both")
      throw ConfigError("--regime must be taylor, fixed or both");
  }
  if (!a.out_dir.empty()) {
    cfg.experiment.output_dir = a.out_dir;
  } else if (const char* env = std::getenv("CBDCNK_OUT_DIR"); env && *env) {
    cfg.experiment.output_dir = env;
  }
  return cfg;
}

Calibration resolved_calibration(const Config& cfg, bool no_calibrate) {
  if (no_calibrate) return cfg.calibration;
  return calibrate_internal_parameters(cfg.calibration, cfg.targets);
}

double parse_size(const std::string& text) {
  if (text.rfind("pct:", 0) == 0) return std::log1p(std::stod(text.substr(4)) / 100.0);
  if (text.rfind("log:", 0) == 0) return std::stod(text.substr(4));
  return std::stod(text);
}

std::string out_path(const Config& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.experiment.output_dir) / name).string();
}

int cmd_steady(const CommonArgs& args) {
  Config cfg = load(args);
  Calibration cal = resolved_calibration(cfg, args.no_calibrate);
  SteadyState ss = solve_steady_state(cal, cfg.variant);
  std::cout << steady_state_csv(ss);
  return 0;
}

int cmd_irf(const CommonArgs& args, const std::string& shock, const std::string& size,
            int horizon, int order, const std::string& regime_flag) {
  Config cfg = load(args);
  Calibration cal = resolved_calibration(cfg, args.no_calibrate);
  double size_log = size.empty() ? cfg.experiment.size_log : parse_size(size);
  if (horizon <= 0) horizon = cfg.experiment.horizon;
  const std::string shock_name = shock.empty() ? cfg.experiment.shock : shock;
  shock_index(shock_name);

  std::vector<CbdcRateRegime> regimes;
  if (regime_flag == "both" || regime_flag.empty())
    regimes = {CbdcRateRegime::taylor_rule, CbdcRateRegime::fixed_gross_rate_one};
  else
    regimes = {cfg.variant.cbdc_rate_regime};

  std::vector<IrfResult> runs;
  for (CbdcRateRegime regime : regimes) {
    ModelVariant variant{cfg.variant.banking, regime};
    SteadyState ss = solve_steady_state(cal, variant);
    Derivatives d = differentiate(ss.make_system(), ss);
    FirstOrderSolution fo = solve_first_order(d, ss);
    IrfResult irf;
    if (order >= 2) {
      SecondOrderSolution so =
          solve_second_order(d, fo, diagonal_shock_cov(cal.sigma_shocks));
      irf = compute_irf(so, shock_name, size_log, horizon);
    } else {
      irf = compute_irf(fo, shock_name, size_log, horizon);
    }
    irf.variant_label = to_string(variant.banking) + "/" +
                        (regime == CbdcRateRegime::taylor_rule ? "taylor-cbdc" : "fixed-cbdc");
    runs.push_back(std::move(irf));
  }

  IrfOverlay overlay = overlay_irfs(runs);
  std::string base = "irf_" + shock_name;
  write_text_atomic(out_path(cfg, base + ".csv"), overlay_csv(overlay));
  write_text_atomic(out_path(cfg, base + ".svg"), overlay_svg(overlay));
  std::cout << "wrote " << out_path(cfg, base + ".csv") << "\n";
  std::cout << "wrote " << out_path(cfg, base + ".svg") << "\n";
  return 0;
}

int cmd_simulate(const CommonArgs& args, int periods, unsigned long seed) {
  Config cfg = load(args);
  Calibration cal = resolved_calibration(cfg, args.no_calibrate);
  if (periods <= 0) periods = cfg.experiment.periods;
  SteadyState ss = solve_steady_state(cal, cfg.variant);
  Derivatives d = differentiate(ss.make_system(), ss);
  FirstOrderSolution fo = solve_first_order(d, ss);
  SecondOrderSolution so = solve_second_order(d, fo, diagonal_shock_cov(cal.sigma_shocks));
  SimulationResult sim = simulate(so, periods, seed);
  std::string path = out_path(cfg, "simulation.csv");
  write_text_atomic(path, simulation_csv(sim));
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_welfare(const CommonArgs& args, const std::string& preset) {
  Config cfg = load(args);
  Calibration cal = resolved_calibration(cfg, args.no_calibrate);
  if (!preset.empty()) cal.sigma_shocks = shock_sigma_preset(preset);
  WelfareEvaluator ev(cal, cfg.variant);
  WelfareResult w = ev.conditional_welfare(cal.bond_rule, cal.cbdc_rule);
  const SteadyState& ss = ev.steady_state();
  std::cout << "conditional_welfare," << format_number(w.welfare) << "\n";
  std::cout << "deterministic_level," << format_number(ss.values[kWelfare]) << "\n";
  std::cout << "sigma2_component," << format_number(w.welfare - ss.values[kWelfare]) << "\n";
  std::cout << "determinate," << (w.determinate ? "yes" : "no") << "\n";
  return w.determinate ? 0 : 4;
}

int cmd_optimize(const CommonArgs& args, const std::string& rule, const std::string& preset,
                 int workers) {
  Config cfg = load(args);
  Calibration cal = resolved_calibration(cfg, args.no_calibrate);
  cal.sigma_shocks = shock_sigma_preset(preset.empty() ? "welfare" : preset);
  WhichRule which = rule == "cbdc" ? WhichRule::cbdc : WhichRule::bond;
  if (rule != "cbdc" && rule != "bond") throw ConfigError("--rule must be bond or cbdc");
  OptimizeOptions opts;
  if (workers > 0) opts.workers = workers;
  OptimizationResult res = optimize_rule(cal, cfg.variant, which, RuleBounds{}, opts);
  std::cout << "rule," << rule << "\n";
  std::cout << "theta_pi," << format_number(res.best.theta_pi) << "\n";
  std::cout << "theta_y," << format_number(res.best.theta_y) << "\n";
  std::cout << "rho," << format_number(res.best.rho) << "\n";
  std::cout << "welfare," << format_number(res.best_welfare) << "\n";
  std::cout << "evaluations," << res.evaluations << "\n";
  std::cout << "boundary," << (res.boundary_solution ? "yes" : "no") << "\n";
  return 0;
}

int cmd_tables(const CommonArgs& args, const std::string& spec, int workers) {
  Config cfg = load(args);
  if (spec != "all" && !spec.empty()) throw ConfigError("--spec supports only 'all'");
  OptimizeOptions opts;
  opts.spec_workers = workers > 0 ? workers : 2;
  opts.workers = 1;  // parallelism lives at the specification level
  std::vector<TwoStepRow> rows = run_all_specifications(
      cfg.calibration, cfg.targets, opts, [](const TwoStepRow& r) {
        std::cerr << "done: " << to_string(r.banking) << " lambda=" << r.lambda_bar
                  << " fixed-rate welfare=" << format_number(r.welfare_fixed) << "\n";
      });
  write_text_atomic(out_path(cfg, "welfare_table.csv"), welfare_table_csv(rows));
  write_text_atomic(out_path(cfg, "cbdc_rule_coefficients.csv"), cbdc_coefficients_csv(rows));
  write_text_atomic(out_path(cfg, "bond_rule_coefficients.csv"), bond_coefficients_csv(rows));
  std::cout << welfare_table_csv(rows);
  std::cout << "wrote " << out_path(cfg, "welfare_table.csv") << "\n";
  std::cout << "wrote " << out_path(cfg, "cbdc_rule_coefficients.csv") << "\n";
  std::cout << "wrote " << out_path(cfg, "bond_rule_coefficients.csv") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"New Keynesian CBDC/banking model: steady state, perturbation solutions, "
               "IRFs, welfare and Taylor-rule optimization"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonArgs common;
  app.add_option("--config,-c", common.config_path, "configuration file");
  app.add_option("--out-dir,-o", common.out_dir,
                 "output directory (default: CBDCNK_OUT_DIR or config)");
  app.add_option("--banking", common.banking, "monopolist | competitive");
  app.add_option("--regime", common.regime, "CBDC rate regime: taylor | fixed | both");
  app.add_flag("--no-calibrate", common.no_calibrate,
               "use configured parameters directly instead of hitting calibration targets");

  auto* steady = app.add_subcommand("steady", "print the steady state as CSV");

  std::string shock, size, regime_flag = "both", rule = "bond", preset, spec = "all";
  int horizon = 0, order = 1, periods = 0, workers = 0;
  unsigned long seed = 42;
  auto* irf = app.add_subcommand("irf", "impulse responses (CSV + SVG overlay)");
  irf->add_option("--shock", shock, "lambda | eps | a | g | eta | e_R | e_m");
  irf->add_option("--size", size, "log:<x> or pct:<p> (default pct:25)");
  irf->add_option("--horizon", horizon, "quarters (default 40)");
  irf->add_option("--order", order, "approximation order 1|2 (default 1)");
  irf->add_option("--overlay", regime_flag, "regimes to overlay: both | taylor | fixed");

  auto* sim = app.add_subcommand("simulate", "pruned second-order stochastic simulation");
  sim->add_option("--periods", periods, "simulation length");
  sim->add_option("--seed", seed, "RNG seed");

  auto* welf = app.add_subcommand("welfare", "conditional welfare under the configured rules");
  welf->add_option("--preset", preset, "shock preset: welfare | zero");

  auto* opt = app.add_subcommand("optimize", "optimize one Taylor rule over the bounded box");
  opt->add_option("--rule", rule, "bond | cbdc");
  opt->add_option("--preset", preset, "shock preset (default welfare)");
  opt->add_option("--workers", workers, "parallel objective evaluations");

  auto* tab = app.add_subcommand("tables", "two-step welfare experiment over six specifications");
  tab->add_option("--spec", spec, "all");
  tab->add_option("--workers", workers, "parallel specifications (default 2)");

  try {
    app.parse(argc, argv);
    if (steady->parsed()) return cmd_steady(common);
    if (irf->parsed()) return cmd_irf(common, shock, size, horizon, order, regime_flag);
    if (sim->parsed()) return cmd_simulate(common, periods, seed);
    if (welf->parsed()) return cmd_welfare(common, preset);
    if (opt->parsed()) return cmd_optimize(common, rule, preset, workers);
    if (tab->parsed()) return cmd_tables(common, spec, workers);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const cbdcnk::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const cbdcnk::BlanchardKahnError& e) {
    std::cerr << "determinacy error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
