// Copyright 2026 The SHEFL Simulator Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shefl/config.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <variant>

namespace shefl {

std::string algo_name(Algo algo) {
  switch (algo) {
    case Algo::kShefl: return "SHEFL";
    case Algo::kFedAvg: return "FedAvg";
    case Algo::kFedProx: return "FedProx";
    case Algo::kFedEns: return "FedEns";
  }
  return "?";
}

Algo algo_from_name(const std::string& name) {
  if (name == "SHEFL") return Algo::kShefl;
  if (name == "FedAvg") return Algo::kFedAvg;
  if (name == "FedProx") return Algo::kFedProx;
  if (name == "FedEns") return Algo::kFedEns;
  throw ConfigError(ConfigError::Kind::kType, 0,
                    "unknown algorithm '" + name +
                        "' (expected SHEFL, FedAvg, FedProx, or FedEns)");
}

namespace {

struct Value {
  enum class Type { kBool, kInt, kFloat, kString, kArray };
  Type type;
  bool b = false;
  long long i = 0;
  double f = 0.0;
  std::string s;
  std::vector<Value> items;
  int line = 0;
};

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool is_integer_token(const std::string& s) {
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(i), s.end(),
                     [](unsigned char c) { return std::isdigit(c); });
}

Value parse_scalar(const std::string& token, int line) {
  Value v;
  v.line = line;
  if (token.size() >= 2 && token.front() == '"' && token.back() == '"') {
    v.type = Value::Type::kString;
    v.s = token.substr(1, token.size() - 2);
    return v;
  }
  if (token == "true" || token == "false") {
    v.type = Value::Type::kBool;
    v.b = token == "true";
    return v;
  }
  if (is_integer_token(token)) {
    v.type = Value::Type::kInt;
    try {
      v.i = std::stoll(token);
    } catch (const std::exception&) {
      throw ConfigError(ConfigError::Kind::kSyntax, line, "integer out of range: " + token);
    }
    return v;
  }
  char* end = nullptr;
  double f = std::strtod(token.c_str(), &end);
  if (end == token.c_str() + token.size() && !token.empty()) {
    v.type = Value::Type::kFloat;
    v.f = f;
    return v;
  }
  throw ConfigError(ConfigError::Kind::kSyntax, line, "cannot parse value: " + token);
}

Value parse_value(const std::string& raw, int line) {
  std::string token = trim(raw);
  if (token.empty()) {
    throw ConfigError(ConfigError::Kind::kSyntax, line, "missing value");
  }
  if (token.front() == '[') {
    if (token.back() != ']') {
      throw ConfigError(ConfigError::Kind::kSyntax, line, "unterminated array");
    }
    Value v;
    v.type = Value::Type::kArray;
    v.line = line;
    std::string inner = token.substr(1, token.size() - 2);
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) {
        throw ConfigError(ConfigError::Kind::kSyntax, line, "empty array element");
      }
      v.items.push_back(parse_scalar(item, line));
    }
    return v;
  }
  return parse_scalar(token, line);
}

// Strips a trailing # comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

class KeyTable {
 public:
  explicit KeyTable(std::map<std::string, Value> values) : values_(std::move(values)) {}

  const Value* take(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return nullptr;
    taken_.push_back(key);
    return &it->second;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : values_) {
      if (std::find(taken_.begin(), taken_.end(), key) == taken_.end()) {
        throw ConfigError(ConfigError::Kind::kUnknownKey, value.line,
                          "unknown key '" + key + "'");
      }
    }
  }

 private:
  std::map<std::string, Value> values_;
  std::vector<std::string> taken_;
};

ConfigError type_error(const std::string& key, const Value& v, const char* want) {
  return ConfigError(ConfigError::Kind::kType, v.line,
                     "key '" + key + "' expects " + want);
}

void bind_int(KeyTable& table, const std::string& key, int& out) {
  if (const Value* v = table.take(key)) {
    if (v->type != Value::Type::kInt) throw type_error(key, *v, "an integer");
    out = static_cast<int>(v->i);
  }
}

void bind_double(KeyTable& table, const std::string& key, double& out) {
  if (const Value* v = table.take(key)) {
    if (v->type == Value::Type::kInt) {
      out = static_cast<double>(v->i);
    } else if (v->type == Value::Type::kFloat) {
      out = v->f;
    } else {
      throw type_error(key, *v, "a number");
    }
  }
}

void bind_bool(KeyTable& table, const std::string& key, bool& out) {
  if (const Value* v = table.take(key)) {
    if (v->type != Value::Type::kBool) throw type_error(key, *v, "true or false");
    out = v->b;
  }
}

void bind_string(KeyTable& table, const std::string& key, std::string& out) {
  if (const Value* v = table.take(key)) {
    if (v->type != Value::Type::kString) throw type_error(key, *v, "a quoted string");
    out = v->s;
  }
}

template <typename T>
void bind_int_array(KeyTable& table, const std::string& key, std::vector<T>& out) {
  if (const Value* v = table.take(key)) {
    if (v->type != Value::Type::kArray) throw type_error(key, *v, "an array");
    out.clear();
    for (const Value& item : v->items) {
      if (item.type != Value::Type::kInt) throw type_error(key, *v, "integer elements");
      out.push_back(static_cast<T>(item.i));
    }
  }
}

template <typename Enum>
void bind_enum(KeyTable& table, const std::string& key, Enum& out,
               const std::vector<std::pair<std::string, Enum>>& mapping) {
  if (const Value* v = table.take(key)) {
    if (v->type != Value::Type::kString) throw type_error(key, *v, "a quoted string");
    for (const auto& [name, value] : mapping) {
      if (v->s == name) {
        out = value;
        return;
      }
    }
    std::string valid;
    for (const auto& [name, value] : mapping) {
      if (!valid.empty()) valid += ", ";
      valid += name;
    }
    throw ConfigError(ConfigError::Kind::kType, v->line,
                      "key '" + key + "': invalid value '" + v->s + "' (expected " +
                          valid + ")");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, Value> values;
  std::string section;
  std::stringstream ss(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(ss, raw)) {
    ++line_no;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError(ConfigError::Kind::kSyntax, line_no, "malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError(ConfigError::Kind::kSyntax, line_no, "empty section name");
      }
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(ConfigError::Kind::kSyntax, line_no, "expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError(ConfigError::Kind::kSyntax, line_no, "missing key before '='");
    }
    std::string full_key = section.empty() ? key : section + "." + key;
    if (values.count(full_key)) {
      throw ConfigError(ConfigError::Kind::kSyntax, line_no,
                        "duplicate key '" + full_key + "'");
    }
    values.emplace(full_key, parse_value(line.substr(eq + 1), line_no));
  }

  KeyTable table(std::move(values));
  ExperimentConfig cfg;

  bind_enum(table, "dataset", cfg.dataset,
            {{"blobs", DatasetKind::kBlobs},
             {"mnist", DatasetKind::kMnist},
             {"fmnist", DatasetKind::kFmnist}});
  bind_enum(table, "model", cfg.model,
            {{"logreg", ModelKind::kLogReg}, {"mlp", ModelKind::kMlp}});

  if (const Value* v = table.take("algo")) {
    cfg.algos.clear();
    if (v->type == Value::Type::kString) {
      cfg.algos.push_back(algo_from_name(v->s));
    } else if (v->type == Value::Type::kArray) {
      for (const Value& item : v->items) {
        if (item.type != Value::Type::kString) {
          throw type_error("algo", *v, "string elements");
        }
        cfg.algos.push_back(algo_from_name(item.s));
      }
    } else {
      throw type_error("algo", *v, "a string or array of strings");
    }
  }

  bind_int(table, "rounds", cfg.rounds);
  bind_int_array(table, "seeds", cfg.seeds);
  if (const Value* v = table.take("data_seed")) {
    if (v->type != Value::Type::kInt) throw type_error("data_seed", *v, "an integer");
    cfg.data_seed = static_cast<std::uint64_t>(v->i);
  }
  bind_int(table, "num_clients", cfg.num_clients);
  bind_int(table, "hpc_count", cfg.hpc_count);
  bind_int(table, "clients_per_round", cfg.clients_per_round);
  bind_int(table, "hpc_per_round", cfg.hpc_per_round);
  bind_int(table, "M", cfg.ensemble_size);
  bind_double(table, "k_frac", cfg.k_frac);
  bind_double(table, "ratio_r", cfg.ratio_r);
  bind_enum(table, "partition", cfg.partition,
            {{"dirichlet", PartitionKind::kDirichlet},
             {"pathological", PartitionKind::kPathological}});
  bind_double(table, "alpha", cfg.alpha);
  bind_int(table, "shards_per_client", cfg.shards_per_client);
  bind_double(table, "mu", cfg.mu);
  bind_enum(table, "coefficients", cfg.coefficients,
            {{"eq2", CoeffMode::kEq2}, {"balanced", CoeffMode::kBalanced}});
  bind_bool(table, "normalize", cfg.normalize);
  bind_bool(table, "wire_quantize", cfg.wire_quantize);
  bind_double(table, "threshold", cfg.threshold);
  bind_int_array(table, "hidden", cfg.hidden);

  bind_double(table, "local.lr", cfg.local.lr);
  bind_int(table, "local.batch", cfg.local.batch);
  bind_double(table, "local.weight_decay", cfg.local.weight_decay);
  bind_int(table, "local.iters", cfg.local.iters);
  bind_double(table, "local.decay", cfg.local.decay);
  bind_int(table, "local.decay_every", cfg.local.decay_every);

  bind_int(table, "blobs.classes", cfg.blobs.classes);
  bind_int(table, "blobs.dim", cfg.blobs.dim);
  bind_int(table, "blobs.n_train", cfg.blobs.n_train);
  bind_int(table, "blobs.n_test", cfg.blobs.n_test);
  bind_double(table, "blobs.class_sep", cfg.blobs.class_sep);

  bind_string(table, "data.train_images", cfg.data.train_images);
  bind_string(table, "data.train_labels", cfg.data.train_labels);
  bind_string(table, "data.test_images", cfg.data.test_images);
  bind_string(table, "data.test_labels", cfg.data.test_labels);

  table.reject_unknown();
  validate_config(cfg);
  return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& msg) {
    throw ConfigError(ConfigError::Kind::kInvariant, 0, msg);
  };
  if (cfg.rounds < 1) fail("rounds must be >= 1");
  if (cfg.seeds.empty()) fail("seeds must be non-empty");
  if (cfg.algos.empty()) fail("algo must name at least one algorithm");
  if (cfg.num_clients < 1) fail("num_clients must be >= 1");
  if (cfg.hpc_count < 0 || cfg.hpc_count > cfg.num_clients) {
    fail("hpc_count must be in [0, num_clients]");
  }
  if (cfg.clients_per_round < 1 || cfg.clients_per_round > cfg.num_clients) {
    fail("clients_per_round must be in [1, num_clients]");
  }
  if (cfg.hpc_per_round < 0 || cfg.hpc_per_round > cfg.clients_per_round) {
    fail("hpc_per_round must be in [0, clients_per_round]");
  }
  if (cfg.hpc_per_round > cfg.hpc_count) {
    fail("hpc_per_round exceeds hpc_count");
  }
  if (cfg.clients_per_round - cfg.hpc_per_round > cfg.num_clients - cfg.hpc_count) {
    fail("not enough LPC clients for clients_per_round - hpc_per_round");
  }
  if (cfg.ensemble_size < 1) fail("M must be >= 1");
  if (!(cfg.k_frac > 0.0 && cfg.k_frac <= 1.0)) fail("k_frac must be in (0, 1]");
  if (!(cfg.ratio_r >= 1.0)) fail("ratio_r must be >= 1");
  if (!(cfg.alpha > 0.0)) fail("alpha must be > 0");
  if (cfg.shards_per_client < 1) fail("shards_per_client must be >= 1");
  if (!(cfg.mu >= 0.0)) fail("mu must be >= 0");
  if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0)) fail("threshold must be in (0, 1)");
  if (!(cfg.local.lr > 0.0)) fail("local.lr must be > 0");
  if (cfg.local.batch < 1) fail("local.batch must be >= 1");
  if (!(cfg.local.weight_decay >= 0.0)) fail("local.weight_decay must be >= 0");
  if (cfg.local.iters < 0) fail("local.iters must be >= 0");
  if (!(cfg.local.decay > 0.0 && cfg.local.decay <= 1.0)) {
    fail("local.decay must be in (0, 1]");
  }
  if (cfg.local.decay_every < 1) fail("local.decay_every must be >= 1");
  if (cfg.hidden.empty()) fail("hidden must name at least one layer width");
  for (int h : cfg.hidden) {
    if (h < 1) fail("hidden layer widths must be >= 1");
  }
  if (cfg.blobs.classes < 2) fail("blobs.classes must be >= 2");
  if (cfg.blobs.dim < 1) fail("blobs.dim must be >= 1");
  if (cfg.blobs.n_train < cfg.blobs.classes || cfg.blobs.n_test < cfg.blobs.classes) {
    fail("blobs sample counts must be >= blobs.classes");
  }
  if (!(cfg.blobs.class_sep >= 0.0)) fail("blobs.class_sep must be >= 0");
}

}  // namespace shefl
