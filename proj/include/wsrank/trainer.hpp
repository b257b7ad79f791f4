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

#pragma once

// Feedforward pair scorer (d -> 100 -> 10 -> 1, ReLU on the hidden layers,
// linear output) trained on triplets with the pairwise hinge loss
//
//   l(pos, neg) = max(0, margin - (S(pos) - S(neg)))
//
// and, optionally, the noise-aware objective that weights each triplet's
// loss by its confidence. Gradients are exact backprop; the subgradient at
// the hinge and ReLU kinks is 0.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wsrank/artifact.hpp"
#include "wsrank/features.hpp"
#include "wsrank/triplets.hpp"

namespace wsrank {

inline constexpr std::array<std::size_t, 2> kHiddenSizes{100, 10};

/// All weights and biases in one flat buffer:
/// W1 (h1 x d) | b1 | W2 (h2 x h1) | b2 | W3 (1 x h2) | b3.
class ScorerParams {
 public:
  static constexpr std::size_t kLayers = 3;

  ScorerParams() = default;
  explicit ScorerParams(std::size_t input_dim);  // all zeros

  std::size_t input_dim() const { return input_dim_; }
  std::size_t layer_inputs(std::size_t layer) const;
  std::size_t layer_outputs(std::size_t layer) const;

  std::span<double> weights(std::size_t layer);
  std::span<const double> weights(std::size_t layer) const;
  std::span<double> bias(std::size_t layer);
  std::span<const double> bias(std::size_t layer) const;

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const ScorerParams&, const ScorerParams&) = default;

 private:
  std::size_t offset(std::size_t layer) const;

  std::size_t input_dim_ = 0;
  std::vector<double> values_;
};

/// Weights uniform in [-a, a], a = init_scale * sqrt(6 / (fan_in + fan_out));
/// zero biases.
ScorerParams init_scorer(std::size_t input_dim, std::uint64_t seed, double init_scale = 1.0);

/// Forward pass. Throws InputError on a dimension mismatch.
double score(const ScorerParams& params, std::span<const double> x);

double hinge_loss(double s_pos, double s_neg, double margin);

struct TrainOptions {
  double margin = 1.0;
  double learning_rate = 1e-3;
  int epochs = 50;
  std::size_t batch_size = 32;
  bool noise_aware = false;
  std::uint64_t seed = 0;
  double init_scale = 1.0;
  int threads = 1;
};

/// Mean over the batch of w_i * l_i, with w_i = confidence when noise-aware,
/// else 1. Never renormalized by the weights.
double batch_loss(const ScorerParams& params, std::span<const Triplet> batch,
                  const FeatureTable& features, const TrainOptions& options);

struct LossAndGradient {
  double loss = 0.0;
  ScorerParams gradient;
};

/// Exact gradient of batch_loss. The batch is reduced in fixed chunks in a
/// fixed order, so the result does not depend on options.threads.
LossAndGradient gradient(const ScorerParams& params, std::span<const Triplet> batch,
                         const FeatureTable& features, const TrainOptions& options);

struct TrainResult {
  ScorerParams params;
  std::vector<double> loss_trace;  // [0] before training, [e] after epoch e
};

/// Mini-batch gradient descent. Deterministic in options.seed. Throws
/// NumericError on a non-finite loss.
TrainResult train(std::span<const Triplet> triplets, const FeatureTable& features,
                  const TrainOptions& options);
TrainResult train(std::span<const Triplet> triplets, const FeatureTable& features,
                  const TrainOptions& options, ScorerParams initial);

struct RankedCandidate {
  std::string passage_id;
  double score = 0.0;
};

/// Descending score, ties by ascending passage id.
std::vector<RankedCandidate> rank(const ScorerParams& params, std::string_view query_id,
                                  std::span<const std::string> candidate_ids,
                                  const FeatureTable& features);

struct Checkpoint {
  FeatureSchema schema;
  ScorerParams params;
  std::optional<Provenance> provenance;
};

/// One line of JSON (dims, feature schema, standardization constants,
/// provenance), then the parameters as little-endian f64.
void write_checkpoint(const Checkpoint& checkpoint, std::ostream& out);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

void write_loss_trace(std::span<const double> trace, std::ostream& out,
                      const std::optional<Provenance>& provenance = std::nullopt);

}  // namespace wsrank
