#pragma once

#include <optional>
#include <string>

#include "lerg/config.hpp"

namespace lerg {

enum class Stage {
  ingest,
  pretrain,
  rewire,
  placeholders,
  finetune,
  eval,
  report,
  all
};

Stage parse_stage(const std::string& name);

struct PipelineOptions {
  std::string out_dir;
  bool dry_run = false;
  /// When set, overrides every seed in the config (split, partition, train,
  /// clustering, finetune get distinct derived values).
  std::optional<std::uint64_t> seed_override;
};

/// Runs one stage (or `all`) against the artifact directory. Outputs are
/// written atomically (temp file + rename) with a JSON sidecar recording the
/// config hash and declared inputs; a lock file serializes stages per
/// directory. Dry-run lists the files the stage would read and write without
/// touching anything else. Returns the process exit status.
int run_stage(Stage stage, Config cfg, const PipelineOptions& opts);

}  // namespace lerg
