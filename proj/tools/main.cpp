#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "qmelab/experiments.hpp"
#include "qmelab/version.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::string qme_list;
  long long seed = -1;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool config_required) {
  auto* config = cmd->add_option("--config", opts.config_path,
                                 "experiment configuration (JSON)");
  if (config_required) config->required();
  cmd->add_option("--out", opts.out_path, "output CSV path (default stdout)");
  cmd->add_option("--qme", opts.qme_list,
                  "comma separated subset of re,lle,ele,ule");
  cmd->add_option("--seed", opts.seed, "override the config seed");
}

qmelab::ExperimentConfig load(const CommonOptions& opts) {
  qmelab::ExperimentConfig cfg = qmelab::load_config(opts.config_path);
  if (!opts.qme_list.empty()) {
    cfg.qmes.clear();
    std::stringstream ss(opts.qme_list);
    std::string token;
    while (std::getline(ss, token, ','))
      if (!token.empty()) cfg.qmes.push_back(qmelab::qme_from_label(token));
    if (cfg.qmes.empty())
      throw qmelab::ConfigError("config: --qme: empty QME list");
  }
  if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
  return cfg;
}

int emit(const qmelab::CommandResult& result, const CommonOptions& opts) {
  for (const std::string& msg : result.messages) std::cerr << msg << "\n";
  if (opts.out_path.empty()) {
    result.table.write_csv(std::cout);
  } else {
    std::ofstream out(opts.out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot open output file '" << opts.out_path
                << "'\n";
      return 2;
    }
    result.table.write_csv(out);
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weak-coupling quantum master equations for boundary-driven "
               "spin chains"};
  app.set_version_flag("--version", std::string("qmelab ") + qmelab::kVersion);
  app.require_subcommand(1);

  CommonOptions ness_opts, sweep_opts, check_opts, evolve_opts;
  std::string validate_path;

  auto* ness = app.add_subcommand("ness", "steady state and audit per QME");
  add_common(ness, ness_opts, true);
  auto* sweep = app.add_subcommand("sweep", "parameter sweep over g or epsilon");
  add_common(sweep, sweep_opts, true);
  auto* check = app.add_subcommand(
      "check", "audit matrix against the expected weak-coupling pattern");
  add_common(check, check_opts, true);
  auto* evolve = app.add_subcommand("evolve", "state trajectory per QME");
  add_common(evolve, evolve_opts, true);
  auto* validate = app.add_subcommand(
      "validate", "verify the provenance header of an output file");
  validate->add_option("--out", validate_path, "CSV file to validate")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      std::ifstream in(validate_path, std::ios::binary);
      if (!in) {
        std::cerr << "error: cannot open '" << validate_path << "'\n";
        return 2;
      }
      const std::string why = qmelab::validate_csv_provenance(in);
      if (!why.empty()) {
        std::cerr << "validate: " << why << "\n";
        return 2;
      }
      return 0;
    }
    if (ness->parsed()) return emit(qmelab::cmd_ness(load(ness_opts)), ness_opts);
    if (sweep->parsed())
      return emit(qmelab::cmd_sweep(load(sweep_opts)), sweep_opts);
    if (check->parsed())
      return emit(qmelab::cmd_check(load(check_opts)), check_opts);
    if (evolve->parsed())
      return emit(qmelab::cmd_evolve(load(evolve_opts)), evolve_opts);
  } catch (const qmelab::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const qmelab::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
