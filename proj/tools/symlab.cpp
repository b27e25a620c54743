// symlab command-line front end.
#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>

#include "symlab/symlab.hpp"

namespace fs = std::filesystem;
using namespace symlab;

namespace {

int cmd_catalog() {
  for (const auto& eq : build_catalog()) std::cout << one_line(classify(eq)) << '\n';
  return exit_code::kOk;
}

int cmd_classify(const std::string& target) {
  EquationSpec spec;
  if (auto found = find_equation(target)) {
    spec = *found;
  } else if (fs::exists(target)) {
    std::ifstream in(target);
    try {
      json j = json::parse(in, nullptr, true, true);
      // a full experiment config is accepted as well as a bare equation document
      spec = j.contains("equation") ? config_from_json(j).equation : equation_from_json(j);
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return exit_code::kConfig;
    }
  } else {
    std::cerr << "config error: '" << target << "' is neither a catalog name nor a file\n";
    return exit_code::kConfig;
  }
  ValidationReport v = validate_spec(spec, Grid(256, 2.0 * M_PI), ValidationPurpose::Classify);
  if (!v.ok()) {
    for (const auto& m : v.violations) std::cerr << "validation failed: " << m << '\n';
    return exit_code::kValidation;
  }
  auto report = classify(spec);
  std::cout << one_line(report) << '\n' << to_json(report).dump(2) << '\n';
  return exit_code::kOk;
}

int cmd_run(const std::string& path, ExperimentKind kind) {
  try {
    ExperimentConfig cfg = load_config(path);
    cfg.kind = kind;
    fs::path dir = resolve_output_dir(cfg);
    ExperimentResult r = run_experiment(cfg);
    write_outputs(cfg, r, dir);
    std::cout << one_line(r.classification) << '\n';
    for (const auto& w : r.validation.warnings) std::cout << "warning: " << w << '\n';
    if (r.trajectory) {
      std::cout << "steps " << r.trajectory->steps << ", snapshots " << r.trajectory->snapshots.size() << '\n';
      if (r.trajectory->blowup) std::cout << "blow-up at t=" << r.trajectory->blowup->time << '\n';
    }
    if (r.verification) {
      std::cout << "max defect " << r.verification->max_defect << '\n';
      std::cout << "verdict " << to_string(r.verification->verdict) << '\n';
      for (const auto& d : r.verification->diagnostics) std::cout << "  " << d << '\n';
    }
    std::cout << "outputs in " << dir.string() << '\n';
    return r.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_code::kConfig;
  } catch (const ValidationError& e) {
    for (const auto& m : e.violations) std::cerr << "validation failed: " << m << '\n';
    return exit_code::kValidation;
  }
}

int cmd_selftest() {
  auto cases = run_selftest();
  bool ok = true;
  for (const auto& c : cases) {
    std::cout << (c.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(50) << c.name << c.detail << '\n';
    ok = ok && c.passed;
  }
  return ok ? exit_code::kOk : 1;
}

int cmd_export_catalog(const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& eq : build_catalog()) {
    std::ofstream out(dir / (eq.name + ".json"), std::ios::trunc);
    out << to_json(eq).dump(2) << '\n';
  }
  std::cout << "wrote " << build_catalog().size() << " equations to " << dir.string() << '\n';
  return exit_code::kOk;
}

int cmd_batch(const std::vector<std::string>& paths) {
  std::vector<fs::path> configs(paths.begin(), paths.end());
  int worst = exit_code::kOk;
  for (const auto& item : run_batch(configs)) {
    std::cout << item.config.string() << ": exit " << item.exit_code << ", " << item.message << '\n';
    worst = std::max(worst, item.exit_code);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symlab: symmetry principles for nonlocal evolution equations"};
  app.require_subcommand(1);

  auto* catalog = app.add_subcommand("catalog", "list the built-in equations with their labels");
  std::string target;
  auto* classify_cmd = app.add_subcommand("classify", "classify a catalog equation or an equation file");
  classify_cmd->add_option("target", target, "catalog name or JSON file")->required();
  std::string config;
  auto* simulate = app.add_subcommand("simulate", "integrate the configured experiment");
  simulate->add_option("config", config, "experiment config")->required();
  auto* verify_cmd = app.add_subcommand("verify", "integrate and check the predicted symmetry behaviour");
  verify_cmd->add_option("config", config, "experiment config")->required();
  auto* selftest = app.add_subcommand("selftest", "run the embedded property checks");
  std::string dir;
  auto* export_cmd = app.add_subcommand("export-catalog", "write each catalog equation as JSON");
  export_cmd->add_option("dir", dir, "output directory")->required();
  std::vector<std::string> batch_configs;
  auto* batch = app.add_subcommand("batch", "run several configs concurrently");
  batch->add_option("configs", batch_configs, "experiment configs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : exit_code::kConfig;
  }

  try {
    if (*catalog) return cmd_catalog();
    if (*classify_cmd) return cmd_classify(target);
    if (*simulate) return cmd_run(config, ExperimentKind::Simulate);
    if (*verify_cmd) return cmd_run(config, ExperimentKind::Verify);
    if (*selftest) return cmd_selftest();
    if (*export_cmd) return cmd_export_catalog(dir);
    if (*batch) return cmd_batch(batch_configs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
