// Copyright 2026 The wsrank Authors
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

#include "wsrank/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "wsrank/artifact.hpp"
#include "wsrank/error.hpp"
#include "wsrank/format.hpp"

namespace wsrank {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void line_error(std::size_t line, const std::string& what) {
  throw InputError("config line " + std::to_string(line) + ": " + what);
}

// Parses a quoted string starting at s[pos] == '"'; advances pos past the
// closing quote.
std::string parse_quoted(std::string_view s, std::size_t& pos, std::size_t line) {
  std::string out;
  ++pos;
  while (pos < s.size()) {
    const char c = s[pos++];
    if (c == '"') return out;
    if (c != '\\') {
      out.push_back(c);
      continue;
    }
    if (pos >= s.size()) break;
    const char e = s[pos++];
    switch (e) {
      case '"': out.push_back('"'); break;
      case '\\': out.push_back('\\'); break;
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      default: line_error(line, std::string("unknown escape \\") + e);
    }
  }
  line_error(line, "unterminated string");
}

// Cuts a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (quoted && s[i] == '\\') {
      ++i;
    } else if (s[i] == '"') {
      quoted = !quoted;
    } else if (s[i] == '#' && !quoted) {
      return s.substr(0, i);
    }
  }
  return s;
}

ConfigValue parse_value(std::string_view v, std::size_t line) {
  if (v.empty()) line_error(line, "missing value");
  if (v.front() == '"') {
    std::size_t pos = 0;
    std::string s = parse_quoted(v, pos, line);
    if (!trim(v.substr(pos)).empty()) line_error(line, "text after string value");
    return s;
  }
  if (v.front() == '[') {
    if (v.back() != ']') line_error(line, "arrays must close on the same line");
    std::vector<std::string> items;
    const std::string_view body = v.substr(1, v.size() - 2);
    std::size_t pos = 0;
    for (;;) {
      while (pos < body.size() && (body[pos] == ' ' || body[pos] == '\t')) ++pos;
      if (pos >= body.size()) break;
      if (body[pos] != '"') line_error(line, "arrays may only hold strings");
      items.push_back(parse_quoted(body, pos, line));
      while (pos < body.size() && (body[pos] == ' ' || body[pos] == '\t')) ++pos;
      if (pos >= body.size()) break;
      if (body[pos] != ',') line_error(line, "expected ',' between array items");
      ++pos;
    }
    return items;
  }
  if (v == "true") return true;
  if (v == "false") return false;
  std::string digits;
  for (char c : v) {
    if (c != '_') digits.push_back(c);
  }
  const bool is_float = digits.find_first_of(".eE") != std::string::npos ||
                        digits == "inf" || digits == "nan";
  if (!is_float) {
    std::int64_t n = 0;
    const char* begin = digits.data() + (digits.front() == '+' ? 1 : 0);
    const auto [p, ec] = std::from_chars(begin, digits.data() + digits.size(), n);
    if (ec != std::errc() || p != digits.data() + digits.size()) {
      line_error(line, "cannot parse value '" + std::string(v) + "'");
    }
    return n;
  }
  try {
    return parse_double(digits);
  } catch (const InputError&) {
    line_error(line, "cannot parse value '" + std::string(v) + "'");
  }
}

bool valid_key(std::string_view k) {
  if (k.empty()) return false;
  return std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

const char* type_name(const ConfigValue& v) {
  switch (v.index()) {
    case 0: return "string";
    case 1: return "integer";
    case 2: return "float";
    case 3: return "boolean";
    default: return "string array";
  }
}

// Hands out values and remembers which were read, so leftovers can be
// reported as unknown.
class Reader {
 public:
  explicit Reader(const ConfigTable& table) : table_(table) {}

  const ConfigValue* find(const std::string& section, const std::string& key) {
    const auto s = table_.find(section);
    if (s == table_.end()) return nullptr;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    used_.insert(section + "." + key);
    return &k->second;
  }

  template <typename T>
  const T* get(const std::string& section, const std::string& key, const char* expected) {
    const ConfigValue* v = find(section, key);
    if (v == nullptr) return nullptr;
    const T* t = std::get_if<T>(v);
    if (t == nullptr) {
      throw InputError("config field " + section + "." + key + ": expected " + expected +
                       ", got " + type_name(*v));
    }
    return t;
  }

  void string(const std::string& s, const std::string& k, std::string& out) {
    if (const auto* v = get<std::string>(s, k, "string")) out = *v;
  }
  void boolean(const std::string& s, const std::string& k, bool& out) {
    if (const auto* v = get<bool>(s, k, "boolean")) out = *v;
  }
  void strings(const std::string& s, const std::string& k, std::vector<std::string>& out) {
    if (const auto* v = get<std::vector<std::string>>(s, k, "string array")) out = *v;
  }
  void number(const std::string& s, const std::string& k, double& out) {
    const ConfigValue* v = find(s, k);
    if (v == nullptr) return;
    if (const auto* i = std::get_if<std::int64_t>(v)) {
      out = static_cast<double>(*i);
    } else if (const auto* d = std::get_if<double>(v)) {
      out = *d;
    } else {
      throw InputError("config field " + s + "." + k + ": expected number, got " + type_name(*v));
    }
    if (!std::isfinite(out)) throw InputError("config field " + s + "." + k + ": must be finite");
  }
  template <typename Int>
  void integer(const std::string& s, const std::string& k, Int& out, std::int64_t lo,
               std::int64_t hi) {
    if (const auto* v = get<std::int64_t>(s, k, "integer")) {
      if (*v < lo || *v > hi) {
        throw InputError("config field " + s + "." + k + ": must be in [" + std::to_string(lo) +
                         ", " + std::to_string(hi) + "]");
      }
      out = static_cast<Int>(*v);
    }
  }

  void reject_unknown() const {
    for (const auto& [section, keys] : table_) {
      for (const auto& [key, value] : keys) {
        const std::string name = section + "." + key;
        if (!used_.count(name)) throw InputError("config field " + name + ": unknown key");
      }
    }
  }

 private:
  const ConfigTable& table_;
  std::set<std::string> used_;
};

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw InputError("config field " + field + ": " + what);
}

std::string method_name(AggregationMethod m) {
  return m == AggregationMethod::kMajority ? "majority" : "generative";
}

}  // namespace

ConfigTable parse_config_table(std::istream& in) {
  ConfigTable table;
  table[""];
  std::string section;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') line_error(line_no, "malformed section header");
      const std::string_view name = trim(line.substr(1, line.size() - 2));
      if (!valid_key(name)) line_error(line_no, "bad section name");
      section = std::string(name);
      if (table.count(section) && !table[section].empty()) {
        line_error(line_no, "section [" + section + "] appears twice");
      }
      table[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) line_error(line_no, "expected key = value");
    std::string_view key = trim(line.substr(0, eq));
    if (key.size() >= 2 && key.front() == '"' && key.back() == '"') {
      key = key.substr(1, key.size() - 2);
    }
    if (key.empty()) line_error(line_no, "empty key");
    auto& keys = table[section];
    if (keys.count(std::string(key))) line_error(line_no, "duplicate key '" + std::string(key) + "'");
    keys.emplace(std::string(key), parse_value(trim(line.substr(eq + 1)), line_no));
  }
  return table;
}

PipelineConfig config_from_table(const ConfigTable& table, const std::filesystem::path& base_dir) {
  static const std::set<std::string> known_sections{
      "", "data", "embeddings", "tokenizer", "bm25", "labeling",
      "aggregation", "triplets", "train", "run"};
  for (const auto& [section, keys] : table) {
    if (!known_sections.count(section)) {
      throw InputError("config section [" + section + "]: unknown section");
    }
  }

  PipelineConfig c;
  c.base_dir = base_dir;
  Reader r(table);

  std::string path;
  r.string("data", "train", path);
  if (path.empty()) field_error("data.train", "required");
  c.train_path = path;
  path.clear();
  r.string("data", "val", path);
  if (!path.empty()) c.val_path = path;
  path.clear();
  r.string("data", "test", path);
  if (!path.empty()) c.test_path = path;
  c.eval_split = c.test_path ? "test" : "train";
  r.string("data", "eval_split", c.eval_split);
  if (c.eval_split == "val" && !c.val_path) field_error("data.eval_split", "no data.val path");
  if (c.eval_split == "test" && !c.test_path) field_error("data.eval_split", "no data.test path");
  if (c.eval_split != "train" && c.eval_split != "val" && c.eval_split != "test") {
    field_error("data.eval_split", "must be train, val or test");
  }

  if (const auto it = table.find("embeddings"); it != table.end()) {
    for (const auto& [name, value] : it->second) {
      std::string p;
      r.string("embeddings", name, p);
      if (p.empty()) field_error("embeddings." + name, "empty path");
      if (name == "bm25" || name == "tfidf") field_error("embeddings." + name, "reserved name");
      c.embeddings.emplace(name, p);
    }
  }

  r.boolean("tokenizer", "lowercase", c.tokenizer.lowercase);
  r.boolean("tokenizer", "strip_punctuation", c.tokenizer.strip_punctuation);
  r.integer("tokenizer", "min_token_len", c.tokenizer.min_token_len, 1, 1 << 20);
  std::vector<std::string> stop;
  r.strings("tokenizer", "stopwords", stop);
  c.tokenizer.stopwords.insert(stop.begin(), stop.end());

  r.number("bm25", "k1", c.bm25.k1);
  r.number("bm25", "b", c.bm25.b);
  if (c.bm25.k1 < 0.0) field_error("bm25.k1", "must be >= 0");
  if (c.bm25.b < 0.0 || c.bm25.b > 1.0) field_error("bm25.b", "must be in [0, 1]");

  std::vector<std::string> names;
  r.strings("labeling", "functions", names);
  if (names.empty()) field_error("labeling.functions", "required, at least one function");
  std::set<std::string> seen;
  for (const auto& name : names) {
    if (!seen.insert(name).second) field_error("labeling.functions", "duplicate '" + name + "'");
    LabelingFunction fn;
    fn.name = name;
    fn.bm25 = c.bm25;
    if (name == "bm25") {
      fn.kind = ScoreKind::kBm25;
    } else if (name == "tfidf") {
      fn.kind = ScoreKind::kTfidf;
    } else if (c.embeddings.count(name)) {
      fn.kind = ScoreKind::kEmbedding;
      fn.store = name;
    } else {
      field_error("labeling.functions",
                  "'" + name + "' is neither bm25, tfidf nor an [embeddings] entry");
    }
    c.functions.push_back(std::move(fn));
  }
  r.boolean("labeling", "multi_positive_ties", c.labeling.multi_positive_ties);

  std::string method = method_name(c.method);
  r.string("aggregation", "method", method);
  if (method == "generative" || method == "gm") {
    c.method = AggregationMethod::kGenerative;
  } else if (method == "majority" || method == "mv") {
    c.method = AggregationMethod::kMajority;
  } else {
    field_error("aggregation.method", "must be generative or majority");
  }
  r.number("aggregation", "gamma", c.gamma);
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) field_error("aggregation.gamma", "must be in (0, 1)");
  r.number("aggregation", "step_size", c.fit.step_size);
  if (!(c.fit.step_size > 0.0)) field_error("aggregation.step_size", "must be > 0");
  r.number("aggregation", "max_step", c.fit.max_step);
  if (c.fit.max_step < c.fit.step_size) field_error("aggregation.max_step", "must be >= step_size");
  r.integer("aggregation", "max_iterations", c.fit.max_iterations, 0, 100000000);
  r.number("aggregation", "tolerance", c.fit.tolerance);
  if (c.fit.tolerance < 0.0) field_error("aggregation.tolerance", "must be >= 0");
  r.number("aggregation", "init_alpha", c.fit.init_alpha);
  if (!(c.fit.init_alpha > 0.5 && c.fit.init_alpha < 1.0)) {
    field_error("aggregation.init_alpha", "must be in (0.5, 1)");
  }
  r.number("aggregation", "init_beta", c.fit.init_beta);
  if (!(c.fit.init_beta > 0.0 && c.fit.init_beta < 1.0)) {
    field_error("aggregation.init_beta", "must be in (0, 1)");
  }

  r.integer("triplets", "per_query", c.per_query_samples, 1, 1 << 30);

  r.number("train", "margin", c.train.margin);
  if (!(c.train.margin > 0.0)) field_error("train.margin", "must be > 0");
  r.number("train", "learning_rate", c.train.learning_rate);
  if (!(c.train.learning_rate > 0.0)) field_error("train.learning_rate", "must be > 0");
  r.integer("train", "epochs", c.train.epochs, 0, 1000000);
  r.integer("train", "batch_size", c.train.batch_size, 1, 1 << 30);
  r.boolean("train", "noise_aware", c.train.noise_aware);
  r.number("train", "init_scale", c.train.init_scale);
  if (!(c.train.init_scale > 0.0)) field_error("train.init_scale", "must be > 0");
  r.string("train", "feature_embedding", c.feature_embedding);
  if (!c.feature_embedding.empty() && !c.embeddings.count(c.feature_embedding)) {
    field_error("train.feature_embedding", "'" + c.feature_embedding + "' is not an [embeddings] entry");
  }
  c.feature_scores = names;
  r.strings("train", "feature_scores", c.feature_scores);
  for (const auto& s : c.feature_scores) {
    if (!seen.count(s)) field_error("train.feature_scores", "'" + s + "' is not a labeling function");
  }
  if (c.feature_embedding.empty() && c.feature_scores.empty()) {
    field_error("train.feature_scores", "the scorer needs at least one feature");
  }

  std::int64_t seed = 0;
  r.integer("run", "seed", seed, 0, INT64_MAX);
  c.seed = static_cast<std::uint64_t>(seed);
  r.integer("run", "threads", c.threads, 1, 1024);
  std::string out;
  r.string("run", "out_dir", out);
  if (!out.empty()) c.out_dir = out;

  r.reject_unknown();
  return c;
}

PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  return config_from_table(parse_config_table(in), base_dir);
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  return parse_config(in, path.parent_path());
}

std::filesystem::path PipelineConfig::resolve(const std::filesystem::path& p) const {
  return p.is_absolute() ? p : base_dir / p;
}

std::filesystem::path PipelineConfig::eval_path() const {
  if (eval_split == "test" && test_path) return resolve(*test_path);
  if (eval_split == "val" && val_path) return resolve(*val_path);
  return resolve(train_path);
}

const LabelingFunction& PipelineConfig::function(const std::string& name) const {
  for (const auto& fn : functions) {
    if (fn.name == name) return fn;
  }
  throw InputError("no labeling function named '" + name + "'");
}

std::string PipelineConfig::canonical() const {
  std::ostringstream o;
  auto list = [](const auto& items) {
    std::string s;
    for (const auto& i : items) s += (s.empty() ? "" : ",") + std::string(i);
    return s;
  };
  o << "data.train=" << train_path.generic_string() << '\n';
  o << "data.val=" << (val_path ? val_path->generic_string() : "") << '\n';
  o << "data.test=" << (test_path ? test_path->generic_string() : "") << '\n';
  o << "data.eval_split=" << eval_split << '\n';
  for (const auto& [name, p] : embeddings) o << "embeddings." << name << '=' << p.generic_string() << '\n';
  o << "tokenizer.lowercase=" << tokenizer.lowercase << '\n';
  o << "tokenizer.strip_punctuation=" << tokenizer.strip_punctuation << '\n';
  o << "tokenizer.min_token_len=" << tokenizer.min_token_len << '\n';
  o << "tokenizer.stopwords=" << list(tokenizer.stopwords) << '\n';
  o << "bm25.k1=" << format_double(bm25.k1) << '\n';
  o << "bm25.b=" << format_double(bm25.b) << '\n';
  std::vector<std::string> names;
  for (const auto& fn : functions) names.push_back(fn.name);
  o << "labeling.functions=" << list(names) << '\n';
  o << "labeling.multi_positive_ties=" << labeling.multi_positive_ties << '\n';
  o << "aggregation.method=" << method_name(method) << '\n';
  o << "aggregation.gamma=" << format_double(gamma) << '\n';
  o << "aggregation.step_size=" << format_double(fit.step_size) << '\n';
  o << "aggregation.max_step=" << format_double(fit.max_step) << '\n';
  o << "aggregation.max_iterations=" << fit.max_iterations << '\n';
  o << "aggregation.tolerance=" << format_double(fit.tolerance) << '\n';
  o << "aggregation.init_alpha=" << format_double(fit.init_alpha) << '\n';
  o << "aggregation.init_beta=" << format_double(fit.init_beta) << '\n';
  o << "triplets.per_query=" << per_query_samples << '\n';
  o << "train.margin=" << format_double(train.margin) << '\n';
  o << "train.learning_rate=" << format_double(train.learning_rate) << '\n';
  o << "train.epochs=" << train.epochs << '\n';
  o << "train.batch_size=" << train.batch_size << '\n';
  o << "train.noise_aware=" << train.noise_aware << '\n';
  o << "train.init_scale=" << format_double(train.init_scale) << '\n';
  o << "train.feature_embedding=" << feature_embedding << '\n';
  o << "train.feature_scores=" << list(feature_scores) << '\n';
  return o.str();
}

std::string PipelineConfig::hash() const { return fnv1a_hex(canonical()); }

std::string config_reference() {
  return R"(# Configuration reference

Configs are TOML-style: `[section]` headers, `key = value` lines and `#`
comments. Values are double-quoted strings, integers, floats, `true`/`false`
or single-line string arrays. Unknown sections or keys are rejected.
Relative paths resolve against the directory of the config file.

| key | default | meaning |
|-----|---------|---------|
| `data.train` | required | JSONL dataset that is labeled and trained on |
| `data.val` | none | optional validation split |
| `data.test` | none | optional test split |
| `data.eval_split` | `test` if given, else `train` | split ranked and evaluated |
| `embeddings.<name>` | none | EMB1 file; `<name>` becomes a labeling function and feature source |
| `tokenizer.lowercase` | `true` | lowercase after NFKC normalization |
| `tokenizer.strip_punctuation` | `true` | delete punctuation inside tokens |
| `tokenizer.min_token_len` | `1` | shortest kept token, in code points |
| `tokenizer.stopwords` | `[]` | tokens to drop |
| `bm25.k1` | `1.2` | term frequency saturation |
| `bm25.b` | `0.75` | length normalization |
| `labeling.functions` | required | ordered list of `bm25`, `tfidf` and embedding names |
| `labeling.multi_positive_ties` | `false` | every passage tied at the top score gets +1 |
| `aggregation.method` | `generative` | `generative` (`gm`) or `majority` (`mv`) |
| `aggregation.gamma` | `0.5` | prior Pr(y = +1), in (0, 1) |
| `aggregation.step_size` | `1.0` | first trial step of the fit |
| `aggregation.max_step` | `1000.0` | cap on the step after accepted iterations double it |
| `aggregation.max_iterations` | `5000` | fit iteration limit |
| `aggregation.tolerance` | `1e-8` | stop when the objective gains less |
| `aggregation.init_alpha` | `0.7` | initial accuracy of every function |
| `aggregation.init_beta` | `0.5` | initial firing rate of every function |
| `triplets.per_query` | `4` | triplets drawn per query |
| `train.margin` | `1.0` | hinge margin, > 0 |
| `train.learning_rate` | `0.001` | gradient descent step |
| `train.epochs` | `50` | passes over the triplets |
| `train.batch_size` | `32` | triplets per update |
| `train.noise_aware` | `false` | weight each triplet loss by its confidence |
| `train.init_scale` | `1.0` | multiplier on the Glorot-uniform init range |
| `train.feature_embedding` | none | embedding whose vectors form the dense feature block |
| `train.feature_scores` | all labeling functions | scores appended as standardized features |
| `run.seed` | `0` | master seed, overridden by `--seed` |
| `run.threads` | `1` | worker threads, overridden by `--threads` |
| `run.out_dir` | `out` | artifact directory, overridden by `--out-dir` |
)";
}

}  // namespace wsrank
