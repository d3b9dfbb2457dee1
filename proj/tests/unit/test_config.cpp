#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <string>

#include "lerg/config.hpp"
#include "lerg/error.hpp"

using namespace lerg;

namespace {

const char* kPath = "lerg_test_cfg.ini";

void write_file(const std::string& text) {
  std::ofstream out(kPath, std::ios::trunc);
  out << text;
}

struct FileGuard {
  ~FileGuard() { std::remove(kPath); }
} guard;

}  // namespace

TEST_CASE("config defaults") {
  write_file("[data]\npath = x.tsv\n");
  const Config cfg = load_config(kPath);
  CHECK(cfg.c == 2000);
  CHECK(cfg.d == 128);
  CHECK(cfg.bits == 16);
  CHECK(cfg.w_star == 0.9);
  CHECK(cfg.layers == 4);
  CHECK(cfg.learning_rate == 1e-3);
  CHECK(cfg.weight_decay == 1e-5);
  CHECK(cfg.lambda == 5e-4);
  CHECK(cfg.retention_ratio == std::vector<double>{1.0});
  CHECK(cfg.t_max == 4);
  CHECK(cfg.placeholder_r == 500);
  CHECK(cfg.eval_n == std::vector<int>{10, 20});
  CHECK(cfg.split_seed == 7);
  CHECK(cfg.train_seed == 42);
}

TEST_CASE("config parses sections, comments and lists") {
  write_file(
      "# leading comment\n"
      "[data]\n"
      "path = /tmp/a.tsv\n"
      "; another comment\n"
      "name = toy\n"
      "negatives = 3\n"
      "\n"
      "[model]\n"
      "c = 32\n"
      "d = 16\n"
      "bits = 8\n"
      "layers = 3\n"
      "\n"
      "[train]\n"
      "learning_rate = 0.01\n"
      "batch_size = 128\n"
      "\n"
      "[rewire]\n"
      "retention_ratio = 1.0, 0.7, 0.5\n"
      "placeholder_r = 4\n"
      "\n"
      "[finetune]\n"
      "max_epochs = 9\n"
      "\n"
      "[eval]\n"
      "n = 5, 50\n");
  const Config cfg = load_config(kPath);
  CHECK(cfg.data_path == "/tmp/a.tsv");
  CHECK(cfg.dataset_name == "toy");
  CHECK(cfg.negatives == 3);
  CHECK(cfg.c == 32);
  CHECK(cfg.d == 16);
  CHECK(cfg.bits == 8);
  CHECK(cfg.layers == 3);
  CHECK(cfg.learning_rate == 0.01);
  CHECK(cfg.batch_size == 128);
  CHECK(cfg.retention_ratio == std::vector<double>{1.0, 0.7, 0.5});
  CHECK(cfg.placeholder_r == 4);
  CHECK(cfg.finetune_max_epochs == 9);
  CHECK(cfg.eval_n == std::vector<int>{5, 50});
}

TEST_CASE("unknown keys and sections are named in the error") {
  write_file("[model]\nbogus_key = 1\n");
  try {
    load_config(kPath);
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("model.bogus_key") != std::string::npos);
  }

  write_file("[nonsense]\nx = 1\n");
  try {
    load_config(kPath);
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("nonsense") != std::string::npos);
  }

  write_file("[model]\nno equals sign here\n");
  try {
    load_config(kPath);
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }

  write_file("orphan = 1\n[data]\npath = x\n");
  CHECK_THROWS(load_config(kPath));
}

TEST_CASE("validation rejects out-of-range values") {
  write_file("[data]\npath = x\n");
  Config cfg = load_config(kPath);
  cfg.validate();  // baseline is fine

  Config bad = cfg;
  bad.bits = 5;
  CHECK_THROWS(bad.validate());

  bad = cfg;
  bad.w_star = 1.5;
  CHECK_THROWS(bad.validate());

  bad = cfg;
  bad.train_ratio = 0.0;
  CHECK_THROWS(bad.validate());

  bad = cfg;
  bad.retention_ratio = {0.5, 1.5};
  CHECK_THROWS(bad.validate());

  bad = cfg;
  bad.retention_ratio.clear();
  CHECK_THROWS(bad.validate());

  bad = cfg;
  bad.c = 1;
  CHECK_THROWS(bad.validate());

  bad = cfg;
  bad.eval_n = {0};
  CHECK_THROWS(bad.validate());
}

TEST_CASE("config hash is stable under reparse and sensitive to changes") {
  write_file("[data]\npath = x\n[model]\nc = 40\n");
  const Config a = load_config(kPath);
  const Config b = load_config(kPath);
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_to_string(a) == config_to_string(b));

  Config c = a;
  c.c = 41;
  CHECK(config_hash(c) != config_hash(a));
  Config d = a;
  d.retention_ratio = {0.7};
  CHECK(config_hash(d) != config_hash(a));
}

TEST_CASE("missing file is an error") {
  CHECK_THROWS(load_config("lerg_definitely_missing.ini"));
}
