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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "wsrank/aggregation.hpp"
#include "wsrank/error.hpp"
#include "wsrank/rng.hpp"

namespace wsrank {
namespace {

using L = WeakLabel;
constexpr L P = L::kPositive;
constexpr L N = L::kNegative;
constexpr L A = L::kAbstain;

LabelMatrix matrix_of(const std::vector<std::vector<L>>& rows) {
  LabelMatrix m;
  for (std::size_t j = 0; j < rows.at(0).size(); ++j) m.functions.push_back("f" + std::to_string(j));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    m.pairs.push_back({"q" + std::to_string(i / 3), "p" + std::to_string(i)});
    m.labels.insert(m.labels.end(), rows[i].begin(), rows[i].end());
  }
  m.rebuild_offsets();
  return m;
}

GenerativeParams params(std::vector<double> a, std::vector<double> b, double g) {
  GenerativeParams p;
  p.alpha = std::move(a);
  p.beta = std::move(b);
  p.gamma = g;
  return p;
}

TEST(MajorityVote, Examples) {
  const std::vector<L> row1{P, P, N, A};
  const auto r = majority_vote(row1);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->label, P);
  EXPECT_DOUBLE_EQ(r->confidence, 2.0 / 3.0);
  const std::vector<L> zeros{A, A, A, A};
  EXPECT_FALSE(majority_vote(zeros));
  const std::vector<L> tie{P, N, A, A};
  EXPECT_FALSE(majority_vote(tie));
  const std::vector<L> neg{N, A, A, A};
  EXPECT_EQ(majority_vote(neg)->label, N);
  EXPECT_EQ(majority_vote(neg)->confidence, 1.0);
}

TEST(MajorityVote, InvariantToColumnOrder) {
  Rng rng(21);
  for (int t = 0; t < 500; ++t) {
    std::vector<L> row(1 + rng.below(7));
    for (auto& l : row) l = weak_label_from_int(static_cast<int>(rng.below(3)) - 1);
    const auto a = majority_vote(row);
    for (std::size_t i = row.size(); i > 1; --i) std::swap(row[i - 1], row[rng.below(i)]);
    const auto b = majority_vote(row);
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) {
      EXPECT_EQ(a->label, b->label);
      EXPECT_EQ(a->confidence, b->confidence);
    }
  }
}

TEST(Likelihood, ClosedForms) {
  const LabelMatrix abstain = matrix_of({{A}, {A}, {A}});
  EXPECT_NEAR(marginal_log_likelihood(params({0.8}, {0.3}, 0.4), abstain), std::log(0.7), 1e-15);
  const LabelMatrix one = matrix_of({{P}});
  EXPECT_NEAR(marginal_log_likelihood(params({0.8}, {1.0}, 0.5), one), std::log(0.5), 1e-15);
}

TEST(Likelihood, MatchesBruteForceOnFourRows) {
  const LabelMatrix m = matrix_of({{P, N}, {A, P}, {N, N}, {P, A}});
  const auto p = params({0.7, 0.9}, {0.6, 0.2}, 0.3);
  EXPECT_NEAR(marginal_log_likelihood(p, m), oracle::mean_log_likelihood(p, m), 1e-14);
}

TEST(Likelihood, ExhaustiveAgainstOracle) {
  Rng rng(22);
  for (int setting = 0; setting < 40; ++setting) {
    const std::size_t k = 1 + setting % 4;
    const auto p = gen::random_params(rng, k);
    for (const auto& row : oracle::all_rows(k)) {
      EXPECT_NEAR(posterior(p, row), oracle::posterior(p, row), 1e-12);
      LabelMatrix one;
      one.functions.assign(k, "f");
      for (std::size_t j = 0; j < k; ++j) one.functions[j] += std::to_string(j);
      one.pairs = {{"q", "p"}};
      one.labels = row;
      one.rebuild_offsets();
      EXPECT_NEAR(marginal_log_likelihood(p, one), std::log(oracle::row_probability(p, row)), 1e-12);
    }
  }
}

TEST(Likelihood, ExactlyIndependentOfRowOrder) {
  Rng rng(23);
  for (int t = 0; t < 20; ++t) {
    const auto p = gen::random_params(rng, 3);
    LabelMatrix m = gen::random_matrix(200, 3, rng);
    const double before = marginal_log_likelihood(p, m);
    const auto g_before = likelihood_gradient(p, compress(m));
    // shuffle whole rows
    std::vector<std::size_t> perm(m.rows());
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    LabelMatrix s = m;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      s.pairs[i] = m.pairs[perm[i]];
      std::copy_n(m.labels.begin() + perm[i] * 3, 3, s.labels.begin() + i * 3);
    }
    EXPECT_EQ(marginal_log_likelihood(p, s), before);
    const auto g_after = likelihood_gradient(p, compress(s));
    EXPECT_EQ(g_before.d_alpha, g_after.d_alpha);
    EXPECT_EQ(g_before.d_beta, g_after.d_beta);
  }
}

TEST(Likelihood, ValueIsNonPositiveAndFinite) {
  Rng rng(24);
  for (int t = 0; t < 50; ++t) {
    const std::size_t k = 1 + rng.below(6);
    const auto p = gen::random_params(rng, k);
    const LabelMatrix m = gen::random_matrix(50, k, rng);
    const double v = marginal_log_likelihood(p, m);
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_LE(v, 0.0);
  }
}

TEST(Compress, PatternsAreSortedWithCounts) {
  const LabelMatrix m = matrix_of({{P, A}, {N, N}, {P, A}, {A, A}});
  const LabelPatterns pat = compress(m);
  ASSERT_EQ(pat.size(), 3u);
  EXPECT_EQ(pat.total, 4.0);
  EXPECT_EQ(std::vector<L>(pat.pattern(0).begin(), pat.pattern(0).end()), (std::vector<L>{N, N}));
  EXPECT_EQ(std::vector<L>(pat.pattern(2).begin(), pat.pattern(2).end()), (std::vector<L>{P, A}));
  EXPECT_EQ(pat.counts[2], 2.0);
}

TEST(Gradient, MatchesCentralDifferences) {
  Rng rng(25);
  const double h = 1e-5;
  for (int point = 0; point < 20; ++point) {
    const std::size_t k = 1 + rng.below(5);
    const LabelMatrix m = gen::sample_matrix(gen::random_params(rng, k, 0.6, 0.95), 300, rng);
    GenerativeParams p = gen::random_params(rng, k, 0.55, 0.95);
    for (double& b : p.beta) b = rng.uniform(0.05, 0.95);
    const auto g = likelihood_gradient(p, compress(m));
    EXPECT_NEAR(g.value, marginal_log_likelihood(p, m), 1e-12);
    for (std::size_t j = 0; j < k; ++j) {
      for (auto* v : {&p.alpha, &p.beta}) {
        const double saved = (*v)[j];
        (*v)[j] = saved + h;
        const double up = marginal_log_likelihood(p, m);
        (*v)[j] = saved - h;
        const double down = marginal_log_likelihood(p, m);
        (*v)[j] = saved;
        const double numeric = (up - down) / (2 * h);
        const double analytic = v == &p.alpha ? g.d_alpha[j] : g.d_beta[j];
        EXPECT_LE(std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6}), 1e-4);
      }
    }
  }
}

TEST(Posterior, Examples) {
  const std::vector<L> pos{P};
  EXPECT_NEAR(posterior(params({0.8}, {1.0}, 0.5), pos), 0.8, 1e-15);
  const std::vector<L> none{A, A, A};
  const auto p = params({0.7, 0.8, 0.9}, {0.1, 0.5, 0.9}, 0.137);
  EXPECT_EQ(posterior(p, none), 0.137);
  const std::vector<L> mixed{P, N, A};
  EXPECT_NEAR(posterior(p, mixed), oracle::posterior(p, mixed), 1e-15);
}

TEST(Box, ProjectionClampsIntoBox) {
  auto p = params({0.2, 1.0, 0.7}, {0.0, 1.0, 0.5}, 0.5);
  EXPECT_FALSE(in_box(p));
  project_to_box(p);
  EXPECT_TRUE(in_box(p));
  EXPECT_EQ(p.alpha, (std::vector<double>{0.5 + kBoxMargin, 1 - kBoxMargin, 0.7}));
  EXPECT_EQ(p.beta, (std::vector<double>{kBoxMargin, 1 - kBoxMargin, 0.5}));
}

TEST(Fit, NeverAbstainingColumnDrivesBetaToTheEdge) {
  Rng rng(26);
  auto truth = params({0.8, 0.75}, {1.0, 0.4}, 0.3);
  const LabelMatrix m = gen::sample_matrix(truth, 2000, rng);
  const FitResult r = fit_generative_model(m, 0.3);
  EXPECT_GE(r.params.beta[0], 1 - kBoxMargin - 1e-8);
  EXPECT_TRUE(in_box(r.params));
}

TEST(Fit, AllAbstainKeepsAlphaAndSendsBetaDown) {
  const LabelMatrix m = matrix_of({{A, A}, {A, A}, {A, A}, {A, A}});
  const FitResult r = fit_generative_model(m, 0.2);
  EXPECT_EQ(r.params.alpha, (std::vector<double>{0.7, 0.7}));
  for (double b : r.params.beta) EXPECT_NEAR(b, kBoxMargin, 1e-12);
}

TEST(Fit, TraceIsMonotoneAndParamsStayInBox) {
  Rng rng(27);
  for (int t = 0; t < 30; ++t) {
    const std::size_t k = 1 + rng.below(6);
    const LabelMatrix m = t % 2 ? gen::random_matrix(250, k, rng)
                                : gen::sample_matrix(gen::random_params(rng, k), 250, rng);
    const FitResult r = fit_generative_model(m, rng.uniform(0.02, 0.98));
    ASSERT_FALSE(r.trace.empty());
    EXPECT_EQ(r.trace[0].iteration, 0);
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
      EXPECT_GE(r.trace[i].objective, r.trace[i - 1].objective);
    }
    EXPECT_TRUE(in_box(r.params));
    EXPECT_EQ(r.trace.back().objective, marginal_log_likelihood(r.params, m));
  }
}

TEST(Fit, RowOrderDoesNotChangeParameters) {
  Rng rng(28);
  const LabelMatrix m = gen::sample_matrix(gen::random_params(rng, 4), 1500, rng);
  LabelMatrix rev = m;
  const std::size_t k = m.cols();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    rev.pairs[i] = m.pairs[m.rows() - 1 - i];
    std::copy_n(m.labels.begin() + (m.rows() - 1 - i) * k, k, rev.labels.begin() + i * k);
  }
  const FitResult a = fit_generative_model(m, 0.4);
  const FitResult b = fit_generative_model(rev, 0.4);
  EXPECT_EQ(a.params.alpha, b.params.alpha);
  EXPECT_EQ(a.params.beta, b.params.beta);
}

TEST(Fit, RecoversGeneratingParameters) {
  Rng rng(29);
  const auto truth = params({0.85, 0.7, 0.9, 0.65}, {0.5, 0.8, 0.3, 0.6}, 0.1);
  const LabelMatrix m = gen::sample_matrix(truth, 10000, rng);
  const FitResult r = fit_generative_model(m, 0.1);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_NEAR(r.params.alpha[j], truth.alpha[j], 0.05);
    EXPECT_NEAR(r.params.beta[j], truth.beta[j], 0.05);
  }
  EXPECT_TRUE(r.converged);
}

TEST(Fit, RejectsBadGamma) {
  const LabelMatrix m = matrix_of({{P}});
  EXPECT_THROW(fit_generative_model(m, 0.0), InputError);
  EXPECT_THROW(fit_generative_model(m, 1.0), InputError);
}

TEST(Aggregate, GenerativeThresholdsAndConfidence) {
  const auto p = params({0.9}, {0.5}, 0.5);
  const LabelMatrix m = matrix_of({{P}, {N}, {A}});
  auto fitted = p;
  fitted.functions = m.functions;
  const AggregatedLabels out = aggregate_generative(m, fitted);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out.labels[0]->label, P);
  EXPECT_NEAR(out.labels[0]->confidence, 0.9, 1e-15);
  EXPECT_EQ(out.labels[1]->label, N);
  EXPECT_NEAR(out.labels[1]->confidence, 0.9, 1e-15);
  EXPECT_FALSE(out.labels[2].has_value());  // posterior exactly gamma = 0.5

  auto other = fitted;
  other.functions = {"something-else"};
  EXPECT_THROW(aggregate_generative(m, other), InputError);
}

TEST(Aggregate, LowPosteriorGivesNegativeWithComplementConfidence) {
  // posterior 0.2 -> (-1, 0.8): one firing column, gamma chosen to land there
  const auto p = params({0.8}, {0.5}, 0.5);
  const LabelMatrix m = matrix_of({{N}});
  const AggregatedLabels out = aggregate_generative(m, p);
  EXPECT_EQ(out.labels[0]->label, N);
  EXPECT_NEAR(out.labels[0]->confidence, 0.8, 1e-15);
}

TEST(Aggregate, MajorityAndSingleColumn) {
  const LabelMatrix m = matrix_of({{P, P, N, A}, {A, A, A, A}, {P, N, A, A}});
  const AggregatedLabels mv = aggregate_majority(m);
  EXPECT_EQ(mv.labels[0]->label, P);
  EXPECT_FALSE(mv.labels[1]);
  EXPECT_FALSE(mv.labels[2]);
  const AggregatedLabels col = single_column(m, 2);
  EXPECT_EQ(col.labels[0]->label, N);
  EXPECT_EQ(col.labels[0]->confidence, 1.0);
  EXPECT_FALSE(col.labels[1]);
  EXPECT_THROW(single_column(m, 4), InputError);
}

TEST(Artifacts, AggregatedRoundTrip) {
  AggregatedLabels a;
  a.pairs = {{"q", "a"}, {"q", "b"}, {"r", "c"}};
  a.labels = {AggregatedLabel{P, 0.9123456789012345}, std::nullopt, AggregatedLabel{N, 1.0}};
  std::stringstream buf;
  write_aggregated(a, buf, Provenance{"aggregate", "h", 1});
  EXPECT_TRUE(read_aggregated(buf) == a);
}

TEST(Artifacts, ParamsRoundTripExactly) {
  GenerativeParams p = params({0.7000000000000001, 0.9999}, {0.1, 0.123456789}, 0.01);
  p.functions = {"bm25", "tfidf"};
  std::stringstream buf;
  write_params_json(p, buf, Provenance{"aggregate", "h", 1});
  const GenerativeParams q = read_params_json(buf);
  EXPECT_EQ(q.alpha, p.alpha);
  EXPECT_EQ(q.beta, p.beta);
  EXPECT_EQ(q.gamma, p.gamma);
  EXPECT_EQ(q.functions, p.functions);
}

TEST(Artifacts, FitTraceCsv) {
  const std::vector<FitTraceEntry> trace{{0, -1.5, 0.0}, {1, -1.25, 0.5}};
  std::ostringstream out;
  write_fit_trace(trace, out);
  EXPECT_EQ(out.str(), "iteration,objective,step_size\n0,-1.5,0\n1,-1.25,0.5\n");
}

}  // namespace
}  // namespace wsrank
