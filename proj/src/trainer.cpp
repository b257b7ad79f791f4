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

#include "wsrank/trainer.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

#include "wsrank/error.hpp"
#include "wsrank/format.hpp"
#include "wsrank/parallel.hpp"
#include "wsrank/rng.hpp"
#include "wsrank/simd/kernels.hpp"

namespace wsrank {

ScorerParams::ScorerParams(std::size_t input_dim) : input_dim_(input_dim) {
  if (input_dim == 0) throw InputError("scorer input dimension must be >= 1");
  values_.assign(offset(kLayers), 0.0);
}

std::size_t ScorerParams::layer_inputs(std::size_t layer) const {
  return layer == 0 ? input_dim_ : kHiddenSizes[layer - 1];
}

std::size_t ScorerParams::layer_outputs(std::size_t layer) const {
  return layer < kHiddenSizes.size() ? kHiddenSizes[layer] : 1;
}

std::size_t ScorerParams::offset(std::size_t layer) const {
  std::size_t off = 0;
  for (std::size_t l = 0; l < layer; ++l) off += layer_outputs(l) * (layer_inputs(l) + 1);
  return off;
}

std::span<double> ScorerParams::weights(std::size_t layer) {
  return {values_.data() + offset(layer), layer_outputs(layer) * layer_inputs(layer)};
}
std::span<const double> ScorerParams::weights(std::size_t layer) const {
  return {values_.data() + offset(layer), layer_outputs(layer) * layer_inputs(layer)};
}
std::span<double> ScorerParams::bias(std::size_t layer) {
  return {values_.data() + offset(layer) + layer_outputs(layer) * layer_inputs(layer),
          layer_outputs(layer)};
}
std::span<const double> ScorerParams::bias(std::size_t layer) const {
  return {values_.data() + offset(layer) + layer_outputs(layer) * layer_inputs(layer),
          layer_outputs(layer)};
}

ScorerParams init_scorer(std::size_t input_dim, std::uint64_t seed, double init_scale) {
  ScorerParams params(input_dim);
  Rng rng(derive_seed(seed, 0x1417));
  for (std::size_t l = 0; l < ScorerParams::kLayers; ++l) {
    const double fan = static_cast<double>(params.layer_inputs(l) + params.layer_outputs(l));
    const double a = init_scale * std::sqrt(6.0 / fan);
    for (double& w : params.weights(l)) w = rng.uniform(-a, a);
  }
  return params;
}

namespace {

struct Activations {
  std::array<double, kHiddenSizes[0]> z1{};
  std::array<double, kHiddenSizes[0]> a1{};
  std::array<double, kHiddenSizes[1]> z2{};
  std::array<double, kHiddenSizes[1]> a2{};
  double out = 0.0;
};

void forward(const ScorerParams& p, std::span<const double> x, Activations& act) {
  simd::gemv(p.weights(0), p.bias(0), x, act.z1);
  for (std::size_t i = 0; i < act.z1.size(); ++i) act.a1[i] = act.z1[i] > 0.0 ? act.z1[i] : 0.0;
  simd::gemv(p.weights(1), p.bias(1), act.a1, act.z2);
  for (std::size_t i = 0; i < act.z2.size(); ++i) act.a2[i] = act.z2[i] > 0.0 ? act.z2[i] : 0.0;
  act.out = p.bias(2)[0] + simd::dot(p.weights(2), act.a2);
}

// grad += d(out)/d(params) * dout
void backward(const ScorerParams& p, std::span<const double> x, const Activations& act,
              double dout, ScorerParams& grad) {
  simd::axpy(dout, act.a2, grad.weights(2));
  grad.bias(2)[0] += dout;

  std::array<double, kHiddenSizes[1]> delta2{};
  const auto w3 = p.weights(2);
  for (std::size_t r = 0; r < delta2.size(); ++r) {
    delta2[r] = act.z2[r] > 0.0 ? dout * w3[r] : 0.0;
  }
  simd::add_outer(delta2, act.a1, grad.weights(1));
  simd::axpy(1.0, delta2, grad.bias(1));

  std::array<double, kHiddenSizes[0]> delta1{};
  simd::gemv_transposed_acc(p.weights(1), delta2, delta1);
  for (std::size_t r = 0; r < delta1.size(); ++r) {
    if (!(act.z1[r] > 0.0)) delta1[r] = 0.0;
  }
  simd::add_outer(delta1, x, grad.weights(0));
  simd::axpy(1.0, delta1, grad.bias(0));
}

struct ResolvedTriplet {
  std::span<const double> pos;
  std::span<const double> neg;
  double weight = 1.0;  // confidence when noise-aware, else 1
};

std::vector<ResolvedTriplet> resolve(std::span<const Triplet> triplets,
                                     const FeatureTable& features, const TrainOptions& options) {
  std::vector<ResolvedTriplet> out;
  out.reserve(triplets.size());
  for (const auto& t : triplets) {
    out.push_back({features.at(t.query_id, t.pos_id), features.at(t.query_id, t.neg_id),
                   options.noise_aware ? t.confidence : 1.0});
  }
  return out;
}

void check_dim(const ScorerParams& params, const FeatureTable& features) {
  if (features.dim() != params.input_dim()) {
    throw InputError("feature dimension " + std::to_string(features.dim()) +
                     " does not match scorer input " + std::to_string(params.input_dim()));
  }
}

constexpr std::size_t kChunk = 16;

// Sum of w_i * l_i over the selected triplets, reduced chunk by chunk.
double weighted_loss_sum(const ScorerParams& params, std::span<const ResolvedTriplet> all,
                         std::span<const std::size_t> idx, double margin, int threads) {
  const std::size_t chunks = (idx.size() + kChunk - 1) / kChunk;
  std::vector<double> partial(chunks, 0.0);
  parallel_for(chunks, threads, [&](std::size_t c) {
    Activations pos;
    Activations neg;
    double sum = 0.0;
    for (std::size_t i = c * kChunk; i < std::min(idx.size(), (c + 1) * kChunk); ++i) {
      const auto& t = all[idx[i]];
      forward(params, t.pos, pos);
      forward(params, t.neg, neg);
      sum += t.weight * hinge_loss(pos.out, neg.out, margin);
    }
    partial[c] = sum;
  });
  return std::accumulate(partial.begin(), partial.end(), 0.0);
}

LossAndGradient gradient_impl(const ScorerParams& params, std::span<const ResolvedTriplet> all,
                              std::span<const std::size_t> idx, double margin, int threads) {
  const std::size_t chunks = (idx.size() + kChunk - 1) / kChunk;
  std::vector<ScorerParams> partial_grad(chunks, ScorerParams(params.input_dim()));
  std::vector<double> partial_loss(chunks, 0.0);
  parallel_for(chunks, threads, [&](std::size_t c) {
    Activations pos;
    Activations neg;
    double sum = 0.0;
    for (std::size_t i = c * kChunk; i < std::min(idx.size(), (c + 1) * kChunk); ++i) {
      const auto& t = all[idx[i]];
      forward(params, t.pos, pos);
      forward(params, t.neg, neg);
      const double loss = hinge_loss(pos.out, neg.out, margin);
      sum += t.weight * loss;
      if (loss > 0.0 && t.weight != 0.0) {
        backward(params, t.pos, pos, -t.weight, partial_grad[c]);
        backward(params, t.neg, neg, t.weight, partial_grad[c]);
      }
    }
    partial_loss[c] = sum;
  });
  LossAndGradient out{0.0, ScorerParams(params.input_dim())};
  for (std::size_t c = 0; c < chunks; ++c) {
    out.loss += partial_loss[c];
    simd::axpy(1.0, partial_grad[c].values(), out.gradient.values());
  }
  if (!idx.empty()) {
    const double n = static_cast<double>(idx.size());
    out.loss /= n;
    for (double& g : out.gradient.values()) g /= n;
  }
  return out;
}

}  // namespace

double score(const ScorerParams& params, std::span<const double> x) {
  if (x.size() != params.input_dim()) {
    throw InputError("feature vector has dimension " + std::to_string(x.size()) +
                     ", scorer expects " + std::to_string(params.input_dim()));
  }
  Activations act;
  forward(params, x, act);
  return act.out;
}

double hinge_loss(double s_pos, double s_neg, double margin) {
  return std::max(0.0, margin - (s_pos - s_neg));
}

double batch_loss(const ScorerParams& params, std::span<const Triplet> batch,
                  const FeatureTable& features, const TrainOptions& options) {
  check_dim(params, features);
  if (batch.empty()) return 0.0;
  const auto resolved = resolve(batch, features, options);
  std::vector<std::size_t> idx(resolved.size());
  std::iota(idx.begin(), idx.end(), 0);
  return weighted_loss_sum(params, resolved, idx, options.margin, options.threads) /
         static_cast<double>(idx.size());
}

LossAndGradient gradient(const ScorerParams& params, std::span<const Triplet> batch,
                         const FeatureTable& features, const TrainOptions& options) {
  check_dim(params, features);
  const auto resolved = resolve(batch, features, options);
  std::vector<std::size_t> idx(resolved.size());
  std::iota(idx.begin(), idx.end(), 0);
  return gradient_impl(params, resolved, idx, options.margin, options.threads);
}

TrainResult train(std::span<const Triplet> triplets, const FeatureTable& features,
                  const TrainOptions& options) {
  return train(triplets, features, options,
               init_scorer(features.dim(), options.seed, options.init_scale));
}

TrainResult train(std::span<const Triplet> triplets, const FeatureTable& features,
                  const TrainOptions& options, ScorerParams initial) {
  if (triplets.empty()) throw InputError("no triplets to train on");
  if (options.batch_size == 0 || options.epochs < 0 || !(options.margin > 0.0) ||
      !(options.learning_rate >= 0.0)) {
    throw InputError("invalid training options");
  }
  check_dim(initial, features);
  TrainResult result{std::move(initial), {}};
  const auto resolved = resolve(triplets, features, options);
  const std::size_t n = resolved.size();
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);

  auto full_loss = [&](int epoch) {
    const double loss =
        weighted_loss_sum(result.params, resolved, all, options.margin, options.threads) /
        static_cast<double>(n);
    if (!std::isfinite(loss)) {
      throw NumericError("non-finite training loss after epoch " + std::to_string(epoch) +
                         "; lower the learning rate");
    }
    return loss;
  };

  result.loss_trace.push_back(full_loss(0));
  std::vector<std::size_t> order(n);
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(options.seed, 0x5eed0000ULL + static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t start = 0; start < n; start += options.batch_size) {
      const std::size_t len = std::min(options.batch_size, n - start);
      const auto step = gradient_impl(result.params, resolved,
                                      std::span<const std::size_t>(order).subspan(start, len),
                                      options.margin, options.threads);
      simd::axpy(-options.learning_rate, step.gradient.values(), result.params.values());
    }
    result.loss_trace.push_back(full_loss(epoch));
  }
  return result;
}

std::vector<RankedCandidate> rank(const ScorerParams& params, std::string_view query_id,
                                  std::span<const std::string> candidate_ids,
                                  const FeatureTable& features) {
  check_dim(params, features);
  std::vector<RankedCandidate> out;
  out.reserve(candidate_ids.size());
  for (const auto& pid : candidate_ids) {
    out.push_back({pid, score(params, features.at(query_id, pid))});
  }
  std::sort(out.begin(), out.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.passage_id < b.passage_id;
  });
  return out;
}

namespace {

using nlohmann::ordered_json;

std::string kind_name(ScoreKind k) {
  switch (k) {
    case ScoreKind::kTfidf:
      return "tfidf";
    case ScoreKind::kEmbedding:
      return "embedding";
    case ScoreKind::kBm25:
      break;
  }
  return "bm25";
}

ScoreKind parse_kind(const std::string& s) {
  if (s == "bm25") return ScoreKind::kBm25;
  if (s == "tfidf") return ScoreKind::kTfidf;
  if (s == "embedding") return ScoreKind::kEmbedding;
  throw InputError("unknown score kind '" + s + "'");
}

constexpr const char* kCheckpointFormat = "wsrank-scorer";

}  // namespace

void write_checkpoint(const Checkpoint& ck, std::ostream& out) {
  ordered_json header;
  header["format"] = kCheckpointFormat;
  header["version"] = kArtifactVersion;
  header["input_dim"] = ck.params.input_dim();
  header["hidden"] = kHiddenSizes;
  header["payload_doubles"] = ck.params.values().size();
  ordered_json schema;
  schema["dense_store"] = ck.schema.dense_store;
  schema["embedding_dim"] = ck.schema.embedding_dim;
  schema["tokenizer"] = {{"lowercase", ck.schema.tokenizer.lowercase},
                         {"strip_punctuation", ck.schema.tokenizer.strip_punctuation},
                         {"min_token_len", ck.schema.tokenizer.min_token_len},
                         {"stopwords", ck.schema.tokenizer.stopwords}};
  ordered_json scalars = ordered_json::array();
  for (const auto& s : ck.schema.scalars) {
    scalars.push_back({{"name", s.source.name},
                       {"kind", kind_name(s.source.kind)},
                       {"store", s.source.store},
                       {"k1", s.source.bm25.k1},
                       {"b", s.source.bm25.b},
                       {"mean", s.mean},
                       {"stddev", s.stddev}});
  }
  schema["scalars"] = std::move(scalars);
  schema["feature_names"] = ck.schema.feature_names();
  header["feature_schema"] = std::move(schema);
  if (ck.provenance) header["provenance"] = provenance_json(*ck.provenance);
  out << header.dump() << '\n';
  for (double v : ck.params.values()) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<char, 8> bytes;
    for (std::size_t i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    out.write(bytes.data(), bytes.size());
  }
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("checkpoint: missing header");
  Checkpoint ck;
  std::size_t payload = 0;
  try {
    const auto header = nlohmann::json::parse(line);
    if (header.at("format").get<std::string>() != kCheckpointFormat) {
      throw InputError("checkpoint: unknown format");
    }
    const auto hidden = header.at("hidden").get<std::vector<std::size_t>>();
    if (hidden != std::vector<std::size_t>(kHiddenSizes.begin(), kHiddenSizes.end())) {
      throw InputError("checkpoint: hidden sizes do not match this build");
    }
    ck.params = ScorerParams(header.at("input_dim").get<std::size_t>());
    payload = header.at("payload_doubles").get<std::size_t>();
    const auto& schema = header.at("feature_schema");
    ck.schema.dense_store = schema.at("dense_store").get<std::string>();
    ck.schema.embedding_dim = schema.at("embedding_dim").get<std::size_t>();
    const auto& tok = schema.at("tokenizer");
    ck.schema.tokenizer.lowercase = tok.at("lowercase").get<bool>();
    ck.schema.tokenizer.strip_punctuation = tok.at("strip_punctuation").get<bool>();
    ck.schema.tokenizer.min_token_len = tok.at("min_token_len").get<std::size_t>();
    ck.schema.tokenizer.stopwords = tok.at("stopwords").get<std::set<std::string>>();
    for (const auto& s : schema.at("scalars")) {
      ScalarFeature f;
      f.source.name = s.at("name").get<std::string>();
      f.source.kind = parse_kind(s.at("kind").get<std::string>());
      f.source.store = s.at("store").get<std::string>();
      f.source.bm25 = {s.at("k1").get<double>(), s.at("b").get<double>()};
      f.mean = s.at("mean").get<double>();
      f.stddev = s.at("stddev").get<double>();
      ck.schema.scalars.push_back(std::move(f));
    }
    if (header.contains("provenance")) {
      const auto& p = header["provenance"];
      ck.provenance = Provenance{p.at("stage").get<std::string>(),
                                 p.at("config_hash").get<std::string>(),
                                 p.at("seed").get<std::uint64_t>(), p.at("version").get<int>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("checkpoint header: ") + e.what());
  }
  if (ck.schema.dim() != ck.params.input_dim()) {
    throw InputError("checkpoint: feature schema and input dimension disagree");
  }
  if (payload != ck.params.values().size()) {
    throw InputError("checkpoint: payload size does not match the layer shapes");
  }
  std::vector<char> bytes(payload * 8);
  in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw InputError("checkpoint: truncated payload");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw InputError("checkpoint: trailing bytes");
  for (std::size_t i = 0; i < payload; ++i) {
    std::uint64_t bits = 0;
    for (std::size_t b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i * 8 + b])) << (8 * b);
    }
    const double v = std::bit_cast<double>(bits);
    if (!std::isfinite(v)) throw InputError("checkpoint: non-finite weight");
    ck.params.values()[i] = v;
  }
  return ck;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write checkpoint " + path.string());
  write_checkpoint(checkpoint, out);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

void write_loss_trace(std::span<const double> trace, std::ostream& out,
                      const std::optional<Provenance>& provenance) {
  if (provenance) out << provenance_comment(*provenance) << '\n';
  out << "epoch,loss\n";
  for (std::size_t e = 0; e < trace.size(); ++e) out << e << ',' << format_double(trace[e]) << '\n';
}

}  // namespace wsrank
