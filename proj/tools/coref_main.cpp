#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coref/cli.h"
#include "coref/config.h"

namespace {

coref::RunConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides) {
  coref::RunConfig config;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream text;
    text << in.rdbuf();
    config = coref::config_from_json(text.str());
  }
  for (const std::string& assignment : overrides) {
    coref::apply_override(&config, assignment);
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"End-to-end span-ranking coreference resolver"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string input_path, output_path, gold_path, system_path;
  std::vector<std::string> model_paths;
  std::vector<double> lambda_sweep;
  bool attention = false;

  CLI::App* train = app.add_subcommand("train", "Train a model");
  train->add_option("--config", config_path, "JSON configuration file");
  train->add_option("--set", overrides, "key=value configuration override");

  CLI::App* predict =
      app.add_subcommand("predict", "Predict coreference clusters");
  predict->add_option("--config", config_path, "JSON configuration file");
  predict->add_option("--set", overrides, "key=value configuration override");
  predict->add_option("--input", input_path, "input CoNLL file")->required();
  predict->add_option("--output", output_path, "output CoNLL file")
      ->required();
  predict->add_option("--model", model_paths,
                      "model checkpoint (repeat for an ensemble)");
  predict->add_flag("--attention", attention,
                    "include attention records in the sidecar");

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Score a system file against gold");
  evaluate->add_option("--gold", gold_path, "gold CoNLL file")->required();
  evaluate->add_option("--system", system_path, "system CoNLL file")
      ->required();

  CLI::App* analyze =
      app.add_subcommand("analyze", "Pruning and attention analysis");
  analyze->add_option("--config", config_path, "JSON configuration file");
  analyze->add_option("--set", overrides, "key=value configuration override");
  analyze->add_option("--input", input_path, "input CoNLL file")->required();
  analyze->add_option("--model", model_paths, "model checkpoint");
  analyze->add_option("--lambda-sweep", lambda_sweep,
                      "span ratios for the recall curve")
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      return coref::cmd_train(load_config(config_path, overrides), std::cout,
                              std::cerr);
    }
    if (predict->parsed()) {
      std::vector<std::string> members = model_paths;
      if (members.empty() && !config_path.empty()) {
        const coref::RunConfig config = load_config(config_path, {});
        members = config.ensemble_members;
        if (members.empty() && !config.checkpoint_path.empty()) {
          members.push_back(config.checkpoint_path);
        }
      }
      return coref::cmd_predict(members, input_path, output_path, overrides,
                                attention, std::cout, std::cerr);
    }
    if (evaluate->parsed()) {
      return coref::cmd_evaluate(gold_path, system_path, std::cout,
                                 std::cerr);
    }
    if (analyze->parsed()) {
      std::string model_path;
      if (!model_paths.empty()) {
        model_path = model_paths.front();
      } else if (!config_path.empty()) {
        model_path = load_config(config_path, {}).checkpoint_path;
      }
      return coref::cmd_analyze(model_path, input_path, lambda_sweep,
                                overrides, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
