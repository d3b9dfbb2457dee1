#include "lerg/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lerg/error.hpp"

namespace lerg {

void Config::validate() const {
  require(train_ratio > 0 && valid_ratio >= 0 && test_ratio >= 0,
          "split ratios must be nonnegative with positive train share");
  require(c >= 2, "model.c must be >= 2");
  require(d >= 1, "model.d must be >= 1");
  require(bits == 4 || bits == 8 || bits == 16, "model.bits must be 4, 8 or 16");
  require(w_star > 0.0 && w_star < 1.0, "model.w_star must lie in (0, 1)");
  require(!retention_ratio.empty(), "rewire.retention_ratio must be nonempty");
  for (double ratio : retention_ratio)
    require(ratio > 0.0 && ratio <= 1.0,
            "retention ratios must lie in (0, 1]");
  require(t_max >= 2, "rewire.t_max must be >= 2");
  require(rounding_boundary >= 0.0 && rounding_boundary <= 1.0,
          "rewire.rounding_boundary must lie in [0, 1]");
  require(!eval_n.empty(), "eval.n must be nonempty");
  for (int n : eval_n) require(n >= 1, "eval.n entries must be >= 1");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<double> parse_double_list(const std::string& v,
                                      const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw std::invalid_argument("config key '" + key +
                                  "': cannot parse number '" + tok + "'");
    }
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& v, const std::string& key) {
  std::vector<int> out;
  for (double x : parse_double_list(v, key)) out.push_back(static_cast<int>(x));
  return out;
}

struct Setter {
  Config& cfg;
  std::string key;  // "section.name"
  std::string value;

  [[noreturn]] void fail(const std::string& why) const {
    throw std::invalid_argument("config key '" + key + "': " + why);
  }
  double num() const {
    try {
      return std::stod(value);
    } catch (const std::exception&) {
      fail("cannot parse number '" + value + "'");
    }
  }
  std::uint64_t unum() const {
    try {
      return std::stoull(value);
    } catch (const std::exception&) {
      fail("cannot parse integer '" + value + "'");
    }
  }
  bool flag() const {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    fail("cannot parse boolean '" + value + "'");
  }
};

void apply(Config& cfg, const std::string& section, const std::string& name,
           const std::string& value) {
  const std::string key = section + "." + name;
  Setter s{cfg, key, value};

  if (section == "data") {
    if (name == "path") cfg.data_path = value;
    else if (name == "format") {
      if (value == "tsv_pairs") cfg.data_format = PairFormat::tsv_pairs;
      else if (value == "csv_pairs") cfg.data_format = PairFormat::csv_pairs;
      else s.fail("unknown format '" + value + "'");
    } else if (name == "name") cfg.dataset_name = value;
    else if (name == "train_ratio") cfg.train_ratio = s.num();
    else if (name == "valid_ratio") cfg.valid_ratio = s.num();
    else if (name == "test_ratio") cfg.test_ratio = s.num();
    else if (name == "negatives") cfg.negatives = s.unum();
    else if (name == "split_seed") cfg.split_seed = s.unum();
    else s.fail("unknown key");
  } else if (section == "model") {
    if (name == "c") cfg.c = s.unum();
    else if (name == "d") cfg.d = s.unum();
    else if (name == "bits") cfg.bits = static_cast<int>(s.unum());
    else if (name == "w_star") cfg.w_star = s.num();
    else if (name == "layers") cfg.layers = static_cast<unsigned>(s.unum());
    else if (name == "balance_epsilon") cfg.balance_epsilon = s.num();
    else if (name == "partition_seed") cfg.partition_seed = s.unum();
    else if (name == "partition_labels") cfg.partition_labels = value;
    else s.fail("unknown key");
  } else if (section == "train") {
    if (name == "learning_rate") cfg.learning_rate = s.num();
    else if (name == "weight_decay") cfg.weight_decay = s.num();
    else if (name == "lambda") cfg.lambda = s.num();
    else if (name == "batch_size") cfg.batch_size = s.unum();
    else if (name == "max_epochs") cfg.max_epochs = s.unum();
    else if (name == "patience") cfg.patience = s.unum();
    else if (name == "seed") cfg.train_seed = s.unum();
    else if (name == "lsq_grad_scale") cfg.lsq_grad_scale = s.flag();
    else s.fail("unknown key");
  } else if (section == "rewire") {
    if (name == "retention_ratio")
      cfg.retention_ratio = parse_double_list(value, key);
    else if (name == "t_max") cfg.t_max = static_cast<unsigned>(s.unum());
    else if (name == "rounding_boundary") cfg.rounding_boundary = s.num();
    else if (name == "placeholder_r") cfg.placeholder_r = s.unum();
    else if (name == "cluster_seed") cfg.cluster_seed = s.unum();
    else s.fail("unknown key");
  } else if (section == "finetune") {
    if (name == "learning_rate") cfg.finetune_learning_rate = s.num();
    else if (name == "max_epochs") cfg.finetune_max_epochs = s.unum();
    else if (name == "patience") cfg.finetune_patience = s.unum();
    else if (name == "seed") cfg.finetune_seed = s.unum();
    else s.fail("unknown key");
  } else if (section == "eval") {
    if (name == "n") cfg.eval_n = parse_int_list(value, key);
    else s.fail("unknown key");
  } else {
    throw std::invalid_argument("config section '" + section + "' is unknown");
  }
}

}  // namespace

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);

  Config cfg;
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    if (section.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": key outside any section");
    apply(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

std::string config_to_string(const Config& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "[data]\n"
     << "path = " << cfg.data_path << "\n"
     << "format = "
     << (cfg.data_format == PairFormat::tsv_pairs ? "tsv_pairs" : "csv_pairs")
     << "\n"
     << "name = " << cfg.dataset_name << "\n"
     << "train_ratio = " << cfg.train_ratio << "\n"
     << "valid_ratio = " << cfg.valid_ratio << "\n"
     << "test_ratio = " << cfg.test_ratio << "\n"
     << "negatives = " << cfg.negatives << "\n"
     << "split_seed = " << cfg.split_seed << "\n"
     << "[model]\n"
     << "c = " << cfg.c << "\n"
     << "d = " << cfg.d << "\n"
     << "bits = " << cfg.bits << "\n"
     << "w_star = " << cfg.w_star << "\n"
     << "layers = " << cfg.layers << "\n"
     << "balance_epsilon = " << cfg.balance_epsilon << "\n"
     << "partition_seed = " << cfg.partition_seed << "\n"
     << "partition_labels = " << cfg.partition_labels << "\n"
     << "[train]\n"
     << "learning_rate = " << cfg.learning_rate << "\n"
     << "weight_decay = " << cfg.weight_decay << "\n"
     << "lambda = " << cfg.lambda << "\n"
     << "batch_size = " << cfg.batch_size << "\n"
     << "max_epochs = " << cfg.max_epochs << "\n"
     << "patience = " << cfg.patience << "\n"
     << "seed = " << cfg.train_seed << "\n"
     << "lsq_grad_scale = " << (cfg.lsq_grad_scale ? "true" : "false") << "\n"
     << "[rewire]\n"
     << "retention_ratio = ";
  for (std::size_t i = 0; i < cfg.retention_ratio.size(); ++i)
    os << (i ? "," : "") << cfg.retention_ratio[i];
  os << "\n"
     << "t_max = " << cfg.t_max << "\n"
     << "rounding_boundary = " << cfg.rounding_boundary << "\n"
     << "placeholder_r = " << cfg.placeholder_r << "\n"
     << "cluster_seed = " << cfg.cluster_seed << "\n"
     << "[finetune]\n"
     << "learning_rate = " << cfg.finetune_learning_rate << "\n"
     << "max_epochs = " << cfg.finetune_max_epochs << "\n"
     << "patience = " << cfg.finetune_patience << "\n"
     << "seed = " << cfg.finetune_seed << "\n"
     << "[eval]\n"
     << "n = ";
  for (std::size_t i = 0; i < cfg.eval_n.size(); ++i)
    os << (i ? "," : "") << cfg.eval_n[i];
  os << "\n";
  return os.str();
}

std::uint64_t config_hash(const Config& cfg) {
  const std::string s = config_to_string(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace lerg
