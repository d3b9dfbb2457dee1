#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "lerg/config.hpp"
#include "lerg/pipeline.hpp"

#include "CLI11.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "lerg: storage- and compute-budgeted graph collaborative filtering "
      "pipeline"};

  std::string config_path;
  std::string stage_name = "all";
  std::string out_dir = "artifacts";
  std::optional<std::uint64_t> seed;
  bool dry = false;

  app.add_option("--config", config_path, "Configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--stage", stage_name,
                 "Stage to run: ingest, pretrain, rewire, placeholders, "
                 "finetune, eval, report, all");
  app.add_option("--out", out_dir, "Artifact directory");
  app.add_option("--seed", seed, "Override every seed in the config");
  app.add_flag("--dry-run", dry,
               "List the files the stage would read and write, then exit");

  CLI11_PARSE(app, argc, argv);

  try {
    const lerg::Config cfg = lerg::load_config(config_path);
    const lerg::Stage stage = lerg::parse_stage(stage_name);
    lerg::PipelineOptions opts;
    opts.out_dir = out_dir;
    opts.dry_run = dry;
    opts.seed_override = seed;
    return lerg::run_stage(stage, cfg, opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
