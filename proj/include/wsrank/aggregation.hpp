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

// Fusing k weak-label columns into one binary label with a confidence.
//
// Two strategies: majority vote over non-abstaining columns, and a
// conditionally independent generative model. Under the model each column j
// fires with probability beta_j and, when it fires, agrees with the hidden
// label y with probability alpha_j:
//
//   Pr(l_j | y) = beta_j * alpha_j        if l_j == y
//               = beta_j * (1 - alpha_j)  if l_j == -y
//               = 1 - beta_j              if l_j == 0
//
// with Pr(y = +1) = gamma fixed. alpha and beta are fit by projected
// gradient ascent on the mean marginal log-likelihood, with alpha kept above
// 0.5 so the two label signs are not interchangeable.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wsrank/artifact.hpp"
#include "wsrank/labeling.hpp"

namespace wsrank {

/// Distance kept from the edges of the parameter box.
inline constexpr double kBoxMargin = 1e-4;

struct GenerativeParams {
  std::vector<std::string> functions;  // column identities, may be empty
  std::vector<double> alpha;
  std::vector<double> beta;
  double gamma = 0.5;

  std::size_t k() const { return alpha.size(); }
};

/// Clamp alpha into [0.5 + margin, 1 - margin] and beta into [margin, 1 - margin].
void project_to_box(GenerativeParams& params);
bool in_box(const GenerativeParams& params);

struct AggregatedLabel {
  WeakLabel label = WeakLabel::kAbstain;  // kPositive or kNegative
  double confidence = 0.0;               // in [0, 1]
  friend bool operator==(const AggregatedLabel&, const AggregatedLabel&) = default;
};

/// nullopt when every column abstains or the votes tie.
std::optional<AggregatedLabel> majority_vote(std::span<const WeakLabel> row);

/// Distinct label rows with multiplicities, rows in lexicographic order.
/// Likelihood sums over patterns, so results do not depend on row order.
struct LabelPatterns {
  std::size_t k = 0;
  std::vector<WeakLabel> rows;  // pattern-major, k entries each
  std::vector<double> counts;
  double total = 0.0;

  std::size_t size() const { return counts.size(); }
  std::span<const WeakLabel> pattern(std::size_t p) const { return {rows.data() + p * k, k}; }
};

LabelPatterns compress(const LabelMatrix& matrix);

/// (1/N) sum_i log sum_y Pr(y) prod_j Pr(l_ij | y).
double marginal_log_likelihood(const GenerativeParams& params, const LabelMatrix& matrix);
double marginal_log_likelihood(const GenerativeParams& params, const LabelPatterns& patterns);

struct LikelihoodGradient {
  double value = 0.0;
  std::vector<double> d_alpha;
  std::vector<double> d_beta;
};

LikelihoodGradient likelihood_gradient(const GenerativeParams& params,
                                       const LabelPatterns& patterns);

/// Pr(y = +1 | row). Exactly gamma when every column abstains.
double posterior(const GenerativeParams& params, std::span<const WeakLabel> row);

struct FitOptions {
  double step_size = 1.0;     // first trial step
  double max_step = 1e3;      // accepted steps double up to this
  int max_iterations = 5000;
  double tolerance = 1e-8;    // on the objective increase
  double init_alpha = 0.7;
  double init_beta = 0.5;
  std::uint64_t seed = 0;     // unused: initialization is deterministic
};

struct FitTraceEntry {
  int iteration = 0;
  double objective = 0.0;
  double step = 0.0;
};

struct FitResult {
  GenerativeParams params;
  std::vector<FitTraceEntry> trace;  // entry 0 is the initial point
  int iterations = 0;
  bool converged = false;
};

/// Projected gradient ascent with backtracking: a trial step is halved until
/// the objective does not decrease, so the trace is non-decreasing.
/// Throws NumericError on a non-finite gradient.
FitResult fit_generative_model(const LabelMatrix& matrix, double gamma,
                               const FitOptions& options = {});

enum class AggregationMethod { kMajority, kGenerative };

struct AggregatedLabels {
  std::vector<PairKey> pairs;
  std::vector<std::optional<AggregatedLabel>> labels;  // nullopt = abstain

  std::size_t size() const { return pairs.size(); }
  friend bool operator==(const AggregatedLabels&, const AggregatedLabels&) = default;
};

AggregatedLabels aggregate_majority(const LabelMatrix& matrix);

/// One column taken as is: +1/-1 with confidence 1, abstain for 0.
AggregatedLabels single_column(const LabelMatrix& matrix, std::size_t column);

/// y = +1 iff posterior > 0.5, abstain at exactly 0.5,
/// confidence max(posterior, 1 - posterior). Throws InputError when the
/// params were fit on different columns.
AggregatedLabels aggregate_generative(const LabelMatrix& matrix, const GenerativeParams& params);

// Artifacts.
void write_aggregated(const AggregatedLabels& labels, std::ostream& out,
                      const std::optional<Provenance>& provenance = std::nullopt);
AggregatedLabels read_aggregated(std::istream& in);
AggregatedLabels load_aggregated(const std::filesystem::path& path);

void write_params_json(const GenerativeParams& params, std::ostream& out,
                       const std::optional<Provenance>& provenance = std::nullopt);
GenerativeParams read_params_json(std::istream& in);

void write_fit_trace(std::span<const FitTraceEntry> trace, std::ostream& out,
                     const std::optional<Provenance>& provenance = std::nullopt);

}  // namespace wsrank
