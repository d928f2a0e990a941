#include <CLI11.hpp>

#include <iostream>

#include "swarmsid/experiment.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string seed, out, model, phase, ic;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "key = value configuration file");
  cmd->add_option("--set", flags.overrides, "override a config key (key=value, repeatable)");
  cmd->add_option("--seed", flags.seed, "training-run seed (u64)");
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--model", flags.model, "ols|mlp|rnn|cnn|node");
  cmd->add_option("--phase", flags.phase, "transient|steady");
  cmd->add_option("--ic", flags.ic, "same|different");
}

swarmsid::ExperimentConfig resolve(const CommonFlags& flags) {
  swarmsid::KvConfig kv;
  if (!flags.config_path.empty()) kv = swarmsid::KvConfig::parse_file(flags.config_path);
  for (const std::string& o : flags.overrides) kv.set_assignment(o);
  if (!flags.seed.empty()) kv.set("seed", flags.seed);
  if (!flags.out.empty()) kv.set("out", flags.out);
  if (!flags.model.empty()) kv.set("model", flags.model);
  if (!flags.phase.empty()) kv.set("phase", flags.phase);
  if (!flags.ic.empty()) kv.set("ic_match", flags.ic);
  return swarmsid::ExperimentConfig::from_kv(kv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"swarm trajectory simulation and system-identification toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  CLI::App* simulate = app.add_subcommand("simulate", "integrate the swarm model and write a trajectory CSV");
  CLI::App* make_dataset =
      app.add_subcommand("make-dataset", "build one methodology cell's train/test CSVs");
  CLI::App* train = app.add_subcommand("train", "fit the selected forecaster and save it");
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "roll the trained model over the test segment and score MFE");
  CLI::App* compare =
      app.add_subcommand("compare", "train and evaluate every configured (model, methodology) cell");
  for (CLI::App* cmd : {simulate, make_dataset, train, evaluate, compare}) add_common(cmd, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    const swarmsid::ExperimentConfig cfg = resolve(flags);
    if (simulate->parsed()) swarmsid::run_simulate(cfg);
    if (make_dataset->parsed()) swarmsid::run_make_dataset(cfg);
    if (train->parsed()) swarmsid::run_train(cfg);
    if (evaluate->parsed()) swarmsid::run_evaluate(cfg);
    if (compare->parsed()) swarmsid::run_compare(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
