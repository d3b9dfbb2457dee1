#include "lerg/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "lerg/assignment.hpp"
#include "lerg/csr.hpp"
#include "lerg/dataset.hpp"
#include "lerg/evaluation.hpp"
#include "lerg/finetune.hpp"
#include "lerg/partition.hpp"
#include "lerg/placeholder.hpp"
#include "lerg/propagation.hpp"
#include "lerg/quantizer.hpp"
#include "lerg/rewiring.hpp"
#include "lerg/trainer.hpp"

#include "json.hpp"

namespace fs = std::filesystem;

namespace lerg {

Stage parse_stage(const std::string& name) {
  if (name == "ingest") return Stage::ingest;
  if (name == "pretrain") return Stage::pretrain;
  if (name == "rewire") return Stage::rewire;
  if (name == "placeholders") return Stage::placeholders;
  if (name == "finetune") return Stage::finetune;
  if (name == "eval") return Stage::eval;
  if (name == "report") return Stage::report;
  if (name == "all") return Stage::all;
  throw std::invalid_argument("unknown stage '" + name + "'");
}

namespace {

std::string stage_name(Stage s) {
  switch (s) {
    case Stage::ingest: return "ingest";
    case Stage::pretrain: return "pretrain";
    case Stage::rewire: return "rewire";
    case Stage::placeholders: return "placeholders";
    case Stage::finetune: return "finetune";
    case Stage::eval: return "eval";
    case Stage::report: return "report";
    case Stage::all: return "all";
  }
  return "?";
}

std::string ratio_tag(double ratio) {
  std::ostringstream os;
  os << "ratio_" << ratio;
  std::string s = os.str();
  for (char& ch : s)
    if (ch == '.') ch = 'p';
  return s;
}

struct Paths {
  fs::path out;
  fs::path split() const { return out / "split.bin"; }
  fs::path assignment() const { return out / "assignment.bin"; }
  fs::path codebook() const { return out / "codebook_pretrain.bin"; }
  fs::path pretrain_log() const { return out / "pretrain_epochs.jsonl"; }
  fs::path ratio_dir(double r) const { return out / ratio_tag(r); }
  fs::path rewired(double r) const { return ratio_dir(r) / "rewired.bin"; }
  fs::path placeholder(double r) const {
    return ratio_dir(r) / "placeholder.bin";
  }
  fs::path finetuned(double r) const {
    return ratio_dir(r) / "codebook_finetune.bin";
  }
  fs::path finetune_log(double r) const {
    return ratio_dir(r) / "finetune_epochs.jsonl";
  }
  fs::path eval_json(double r) const { return ratio_dir(r) / "eval.json"; }
  fs::path report_csv() const { return out / "report.csv"; }
};

struct LockGuard {
  fs::path lock;
  explicit LockGuard(const fs::path& dir) : lock(dir / ".lock") {
    if (fs::exists(lock))
      throw std::runtime_error(
          "artifact directory is locked by another stage (" + lock.string() +
          "); remove the stale lock if no process is running");
    std::ofstream(lock) << "locked\n";
  }
  ~LockGuard() {
    std::error_code ec;
    fs::remove(lock, ec);
  }
};

void require_artifact(const fs::path& p, const std::string& producer) {
  if (!fs::exists(p))
    throw std::runtime_error("missing artifact " + p.string() +
                             "; produce it with stage '" + producer + "'");
}

// Atomic publish: the writer sees only the temp path; the final name appears
// in one rename. A JSON sidecar records provenance for the whole run.
template <typename Fn>
void atomic_write(const fs::path& path, Fn&& writer, Stage stage,
                  std::uint64_t cfg_hash,
                  const std::vector<fs::path>& inputs) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  writer(tmp.string());
  fs::rename(tmp, path);

  nlohmann::json meta;
  meta["config_hash"] = cfg_hash;
  meta["stage"] = stage_name(stage);
  nlohmann::json in = nlohmann::json::array();
  for (const fs::path& p : inputs) in.push_back(p.string());
  meta["inputs"] = in;
  std::ofstream(path.string() + ".meta.json") << meta.dump(2) << "\n";
}

TrainConfig pretrain_config(const Config& cfg) {
  TrainConfig t;
  t.learning_rate = cfg.learning_rate;
  t.weight_decay = cfg.weight_decay;
  t.l2_lambda = cfg.lambda;
  t.batch_size = cfg.batch_size;
  t.max_epochs = cfg.max_epochs;
  t.patience = cfg.patience;
  t.seed = cfg.train_seed;
  t.layers = cfg.layers;
  t.bits = cfg.bits;
  t.lsq_grad_scale = cfg.lsq_grad_scale;
  return t;
}

TrainConfig finetune_config(const Config& cfg) {
  TrainConfig t = pretrain_config(cfg);
  t.learning_rate = cfg.finetune_learning_rate;
  t.max_epochs = cfg.finetune_max_epochs;
  t.patience = cfg.finetune_patience;
  t.seed = cfg.finetune_seed;
  return t;
}

MetricsSink jsonl_sink(std::ofstream& log) {
  return [&log](const EpochRecord& rec) {
    nlohmann::json j;
    j["epoch"] = rec.epoch;
    j["train_loss"] = rec.train_loss;
    j["recall@10"] = rec.recall10;
    j["ndcg@10"] = rec.ndcg10;
    j["recall@20"] = rec.recall20;
    j["ndcg@20"] = rec.ndcg20;
    j["seconds"] = rec.seconds;
    log << j.dump() << "\n";
  };
}

std::size_t retained_count(const Config& cfg, double ratio, std::size_t n) {
  auto m = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(n)));
  (void)cfg;
  return std::min(std::max<std::size_t>(m, 1), n);
}

// The propagated table induced by the persisted pretrain artifacts.
Matrix pretrain_table(const Config& cfg, const InteractionDataset& ds,
                      const AssignmentMatrix& s, const QuantizedCodebook& q) {
  const Csr norm = normalize_symmetric(build_adjacency(ds));
  const Matrix h0 = infer_full_table(s, dequantize(q));
  return propagate(norm, h0, cfg.layers);
}

RetentionPlan plan_from_mask(std::vector<std::uint8_t> mask) {
  RetentionPlan plan;
  plan.retained_mask = std::move(mask);
  plan.scores.assign(plan.retained_mask.size(), 0.0);
  for (std::uint32_t e = 0; e < plan.retained_mask.size(); ++e)
    (plan.retained_mask[e] ? plan.retained : plan.pruned).push_back(e);
  plan.m = plan.retained.size();
  return plan;
}

// Entities that cannot broadcast or receive anything end up served purely by
// placeholder imputation: demote them from the retained set and nullify
// their columns, repeating until no retained row is empty.
void demote_unrecovered(RewiredGraph& g, RetentionPlan& plan) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::uint32_t> demote;
    for (std::uint32_t e = 0; e < plan.retained_mask.size(); ++e)
      if (plan.retained_mask[e] == 1 && g.adjacency.row_nnz(e) == 0)
        demote.push_back(e);
    if (demote.empty()) break;
    require(demote.size() < plan.m,
            "every entity became unrecoverable; graph too sparse for this "
            "retention ratio");
    for (std::uint32_t e : demote) plan.retained_mask[e] = 0;
    g.adjacency = prune_columns(g.adjacency, demote);
    g.retained_mask = plan.retained_mask;
    changed = true;
  }
  const std::vector<double> scores = std::move(plan.scores);
  RetentionPlan rebuilt = plan_from_mask(std::move(plan.retained_mask));
  rebuilt.scores = scores;
  plan = std::move(rebuilt);
  g.unrecovered.clear();
}

struct LoadedSplit {
  InteractionDataset ds;
  DatasetSplit split;
};

LoadedSplit load_split_artifact(const Paths& paths) {
  require_artifact(paths.split(), "ingest");
  LoadedSplit ls;
  load_split(paths.split().string(), ls.ds, ls.split);
  return ls;
}

void stage_ingest(const Config& cfg, const Paths& paths,
                  std::uint64_t cfg_hash) {
  require(!cfg.data_path.empty(), "data.path is required for ingest");
  InteractionDataset ds = load_interactions(cfg.data_path, cfg.data_format);
  std::cout << "ingest: " << ds.num_users << " users, " << ds.num_items
            << " items, " << ds.pairs.size() << " interactions\n";
  DatasetSplit split = split_dataset(
      ds, {cfg.train_ratio, cfg.valid_ratio, cfg.test_ratio}, cfg.split_seed);
  sample_negatives(split, ds, cfg.negatives, cfg.split_seed + 1);
  atomic_write(
      paths.split(),
      [&](const std::string& tmp) { save_split(tmp, ds, split); },
      Stage::ingest, cfg_hash, {fs::path(cfg.data_path)});
}

void stage_pretrain(const Config& cfg, const Paths& paths,
                    std::uint64_t cfg_hash) {
  LoadedSplit ls = load_split_artifact(paths);
  const std::size_t n = ls.ds.num_entities();
  require(cfg.c <= n, "model.c exceeds the entity count");

  const Csr adj = build_adjacency(ls.ds);
  PartitionLabels parts =
      cfg.partition_labels.empty()
          ? partition_entities(adj, cfg.c, cfg.partition_seed,
                               cfg.balance_epsilon)
          : load_partition_labels(cfg.partition_labels, n, cfg.c);
  AssignmentMatrix s =
      init_assignment(parts, cfg.c, cfg.w_star, cfg.partition_seed + 1);

  Matrix backbone0 = init_codebook(cfg.c, cfg.d, cfg.train_seed);
  std::vector<double> step0 = init_step(backbone0, cfg.bits);

  const fs::path log_tmp = paths.pretrain_log().string() + ".tmp";
  fs::create_directories(paths.out);
  std::ofstream log(log_tmp);
  PretrainArtifacts art =
      pretrain(ls.ds, ls.split, normalize_symmetric(adj), s,
               std::move(backbone0), std::move(step0), pretrain_config(cfg),
               jsonl_sink(log));
  log.close();
  fs::rename(log_tmp, paths.pretrain_log());

  atomic_write(
      paths.assignment(),
      [&](const std::string& tmp) { save_assignment(tmp, s); },
      Stage::pretrain, cfg_hash, {paths.split()});
  atomic_write(
      paths.codebook(),
      [&](const std::string& tmp) { save_quantized(tmp, art.codebook); },
      Stage::pretrain, cfg_hash, {paths.split()});
}

void stage_rewire(const Config& cfg, const Paths& paths,
                  std::uint64_t cfg_hash) {
  LoadedSplit ls = load_split_artifact(paths);
  require_artifact(paths.assignment(), "pretrain");
  require_artifact(paths.codebook(), "pretrain");
  const AssignmentMatrix s = load_assignment(paths.assignment().string());
  const QuantizedCodebook q = load_quantized(paths.codebook().string());

  const Matrix h = pretrain_table(cfg, ls.ds, s, q);
  const std::vector<double> scores = contribution_scores(h);
  const Csr adj = build_adjacency(ls.ds);

  for (double ratio : cfg.retention_ratio) {
    const std::size_t m = retained_count(cfg, ratio, ls.ds.num_entities());
    RetentionPlan plan = select_retained(scores, m, cfg.rounding_boundary);
    RewiredGraph g = rewire(adj, plan, cfg.t_max);
    demote_unrecovered(g, plan);
    std::cout << "rewire " << ratio_tag(ratio) << ": retained " << plan.m
              << "/" << ls.ds.num_entities() << ", nnz "
              << g.adjacency.nnz() << "\n";
    atomic_write(
        paths.rewired(ratio),
        [&](const std::string& tmp) { save_rewired(tmp, g); }, Stage::rewire,
        cfg_hash, {paths.split(), paths.assignment(), paths.codebook()});
  }
}

void stage_placeholders(const Config& cfg, const Paths& paths,
                        std::uint64_t cfg_hash) {
  LoadedSplit ls = load_split_artifact(paths);
  require_artifact(paths.assignment(), "pretrain");
  require_artifact(paths.codebook(), "pretrain");
  const AssignmentMatrix s = load_assignment(paths.assignment().string());
  const QuantizedCodebook q = load_quantized(paths.codebook().string());
  const Matrix h = pretrain_table(cfg, ls.ds, s, q);

  for (double ratio : cfg.retention_ratio) {
    require_artifact(paths.rewired(ratio), "rewire");
    const RewiredGraph g = load_rewired(paths.rewired(ratio).string());
    const RetentionPlan plan = plan_from_mask(g.retained_mask);

    PlaceholderCodebook pc;
    if (plan.pruned.empty()) {
      pc.r = 0;
      pc.d = h.cols;
    } else {
      Matrix h_prune(plan.pruned.size(), h.cols);
      for (std::size_t i = 0; i < plan.pruned.size(); ++i)
        std::copy_n(h.row(plan.pruned[i]), h.cols, h_prune.row(i));
      const std::size_t r = std::min(cfg.placeholder_r, plan.pruned.size());
      pc = cluster_pruned(h_prune, r, cfg.cluster_seed);
    }
    atomic_write(
        paths.placeholder(ratio),
        [&](const std::string& tmp) { save_placeholder(tmp, pc); },
        Stage::placeholders, cfg_hash,
        {paths.split(), paths.assignment(), paths.codebook(),
         paths.rewired(ratio)});
  }
}

void stage_finetune(const Config& cfg, const Paths& paths,
                    std::uint64_t cfg_hash) {
  LoadedSplit ls = load_split_artifact(paths);
  require_artifact(paths.assignment(), "pretrain");
  require_artifact(paths.codebook(), "pretrain");
  const AssignmentMatrix s = load_assignment(paths.assignment().string());
  const QuantizedCodebook q = load_quantized(paths.codebook().string());

  for (double ratio : cfg.retention_ratio) {
    require_artifact(paths.rewired(ratio), "rewire");
    require_artifact(paths.placeholder(ratio), "placeholders");
    const RewiredGraph g = load_rewired(paths.rewired(ratio).string());
    const PlaceholderCodebook pc =
        load_placeholder(paths.placeholder(ratio).string());
    const RetentionPlan plan = plan_from_mask(g.retained_mask);

    const fs::path log_tmp = paths.finetune_log(ratio).string() + ".tmp";
    fs::create_directories(paths.ratio_dir(ratio));
    std::ofstream log(log_tmp);
    FinetuneArtifacts art =
        finetune(dequantize(q), q.step, s, plan, g, pc, ls.ds, ls.split,
                 finetune_config(cfg), jsonl_sink(log));
    log.close();
    fs::rename(log_tmp, paths.finetune_log(ratio));

    atomic_write(
        paths.finetuned(ratio),
        [&](const std::string& tmp) { save_quantized(tmp, art.codebook); },
        Stage::finetune, cfg_hash,
        {paths.split(), paths.assignment(), paths.codebook(),
         paths.rewired(ratio), paths.placeholder(ratio)});
  }
}

void stage_eval(const Config& cfg, const Paths& paths,
                std::uint64_t cfg_hash) {
  LoadedSplit ls = load_split_artifact(paths);
  require_artifact(paths.assignment(), "pretrain");
  const AssignmentMatrix s = load_assignment(paths.assignment().string());

  for (double ratio : cfg.retention_ratio) {
    require_artifact(paths.rewired(ratio), "rewire");
    require_artifact(paths.placeholder(ratio), "placeholders");
    require_artifact(paths.finetuned(ratio), "finetune");
    const RewiredGraph g = load_rewired(paths.rewired(ratio).string());
    const PlaceholderCodebook pc =
        load_placeholder(paths.placeholder(ratio).string());
    const QuantizedCodebook q = load_quantized(paths.finetuned(ratio).string());
    const RetentionPlan plan = plan_from_mask(g.retained_mask);

    const auto t0 = std::chrono::steady_clock::now();
    const Matrix table =
        assemble_inference_table(dequantize(q), s, plan, g, pc, cfg.layers);
    BudgetInfo budget;
    budget.c = cfg.c;
    budget.d = cfg.d;
    budget.bits = cfg.bits;
    budget.r = pc.r;
    budget.n = ls.ds.num_entities();
    budget.m = plan.m;
    budget.graph_nnz = g.adjacency.nnz();
    const MetricsReport rep =
        evaluate(table, ls.ds, ls.split.train, ls.split.test, cfg.eval_n,
                 budget);
    const auto t1 = std::chrono::steady_clock::now();
    const std::string json =
        report_to_json(rep, cfg.dataset_name, cfg_hash,
                       std::chrono::duration<double>(t1 - t0).count());
    atomic_write(
        paths.eval_json(ratio),
        [&](const std::string& tmp) { std::ofstream(tmp) << json << "\n"; },
        Stage::eval, cfg_hash,
        {paths.split(), paths.assignment(), paths.rewired(ratio),
         paths.placeholder(ratio), paths.finetuned(ratio)});
    std::cout << "eval " << ratio_tag(ratio) << ": " << json << "\n";
  }
}

void stage_report(const Config& cfg, const Paths& paths,
                  std::uint64_t cfg_hash) {
  std::ostringstream csv;
  csv << "retention_ratio";
  for (int n : cfg.eval_n) csv << ",ndcg@" << n << ",recall@" << n;
  csv << ",macs_per_layer,storage_total_bytes\n";

  std::vector<fs::path> inputs;
  for (double ratio : cfg.retention_ratio) {
    require_artifact(paths.eval_json(ratio), "eval");
    inputs.push_back(paths.eval_json(ratio));
    std::ifstream in(paths.eval_json(ratio));
    nlohmann::json j = nlohmann::json::parse(in);
    csv << ratio;
    for (int n : cfg.eval_n) {
      const auto& mv = j["metrics"][std::to_string(n)];
      csv << "," << mv["ndcg"].get<double>() << ","
          << mv["recall"].get<double>();
    }
    csv << "," << j["macs_per_layer"].get<std::uint64_t>() << ","
        << j["storage_bytes"]["total"].get<std::uint64_t>() << "\n";
  }
  atomic_write(
      paths.report_csv(),
      [&](const std::string& tmp) { std::ofstream(tmp) << csv.str(); },
      Stage::report, cfg_hash, inputs);
  std::cout << csv.str();
}

void dry_run(Stage stage, const Config& cfg, const Paths& paths) {
  auto reads = [](const fs::path& p) {
    std::cout << "would read: " << p.string() << "\n";
  };
  auto writes = [](const fs::path& p) {
    std::cout << "would write: " << p.string() << "\n";
  };
  switch (stage) {
    case Stage::ingest:
      reads(cfg.data_path);
      writes(paths.split());
      break;
    case Stage::pretrain:
      reads(paths.split());
      if (!cfg.partition_labels.empty()) reads(cfg.partition_labels);
      writes(paths.assignment());
      writes(paths.codebook());
      writes(paths.pretrain_log());
      break;
    case Stage::rewire:
      reads(paths.split());
      reads(paths.assignment());
      reads(paths.codebook());
      for (double r : cfg.retention_ratio) writes(paths.rewired(r));
      break;
    case Stage::placeholders:
      reads(paths.split());
      reads(paths.assignment());
      reads(paths.codebook());
      for (double r : cfg.retention_ratio) {
        reads(paths.rewired(r));
        writes(paths.placeholder(r));
      }
      break;
    case Stage::finetune:
      reads(paths.split());
      reads(paths.assignment());
      reads(paths.codebook());
      for (double r : cfg.retention_ratio) {
        reads(paths.rewired(r));
        reads(paths.placeholder(r));
        writes(paths.finetuned(r));
        writes(paths.finetune_log(r));
      }
      break;
    case Stage::eval:
      reads(paths.split());
      reads(paths.assignment());
      for (double r : cfg.retention_ratio) {
        reads(paths.rewired(r));
        reads(paths.placeholder(r));
        reads(paths.finetuned(r));
        writes(paths.eval_json(r));
      }
      break;
    case Stage::report:
      for (double r : cfg.retention_ratio) reads(paths.eval_json(r));
      writes(paths.report_csv());
      break;
    case Stage::all:
      for (Stage s : {Stage::ingest, Stage::pretrain, Stage::rewire,
                      Stage::placeholders, Stage::finetune, Stage::eval,
                      Stage::report})
        dry_run(s, cfg, paths);
      break;
  }
}

}  // namespace

int run_stage(Stage stage, Config cfg, const PipelineOptions& opts) {
  cfg.validate();
  if (opts.seed_override) {
    const std::uint64_t s = *opts.seed_override;
    cfg.split_seed = s;
    cfg.partition_seed = s + 1;
    cfg.train_seed = s + 2;
    cfg.cluster_seed = s + 3;
    cfg.finetune_seed = s + 4;
  }
  Paths paths{fs::path(opts.out_dir)};
  if (opts.dry_run) {
    dry_run(stage, cfg, paths);
    return 0;
  }

  fs::create_directories(paths.out);
  LockGuard lock(paths.out);
  const std::uint64_t h = config_hash(cfg);

  auto run_one = [&](Stage s) {
    switch (s) {
      case Stage::ingest: stage_ingest(cfg, paths, h); break;
      case Stage::pretrain: stage_pretrain(cfg, paths, h); break;
      case Stage::rewire: stage_rewire(cfg, paths, h); break;
      case Stage::placeholders: stage_placeholders(cfg, paths, h); break;
      case Stage::finetune: stage_finetune(cfg, paths, h); break;
      case Stage::eval: stage_eval(cfg, paths, h); break;
      case Stage::report: stage_report(cfg, paths, h); break;
      case Stage::all: break;
    }
  };

  if (stage == Stage::all) {
    for (Stage s : {Stage::ingest, Stage::pretrain, Stage::rewire,
                    Stage::placeholders, Stage::finetune, Stage::eval,
                    Stage::report})
      run_one(s);
  } else {
    run_one(stage);
  }
  return 0;
}

}  // namespace lerg
