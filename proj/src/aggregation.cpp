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

#include "wsrank/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

#include "wsrank/error.hpp"
#include "wsrank/format.hpp"

namespace wsrank {

void project_to_box(GenerativeParams& params) {
  for (double& a : params.alpha) a = std::clamp(a, 0.5 + kBoxMargin, 1.0 - kBoxMargin);
  for (double& b : params.beta) b = std::clamp(b, kBoxMargin, 1.0 - kBoxMargin);
}

bool in_box(const GenerativeParams& params) {
  for (double a : params.alpha) {
    if (!(a >= 0.5 + kBoxMargin && a <= 1.0 - kBoxMargin)) return false;
  }
  for (double b : params.beta) {
    if (!(b >= kBoxMargin && b <= 1.0 - kBoxMargin)) return false;
  }
  return params.gamma > 0.0 && params.gamma < 1.0;
}

std::optional<AggregatedLabel> majority_vote(std::span<const WeakLabel> row) {
  int pos = 0;
  int neg = 0;
  for (WeakLabel l : row) {
    pos += l == WeakLabel::kPositive;
    neg += l == WeakLabel::kNegative;
  }
  if (pos == neg) return std::nullopt;
  const int majority = std::max(pos, neg);
  return AggregatedLabel{pos > neg ? WeakLabel::kPositive : WeakLabel::kNegative,
                         static_cast<double>(majority) / static_cast<double>(pos + neg)};
}

LabelPatterns compress(const LabelMatrix& matrix) {
  const std::size_t k = matrix.cols();
  std::map<std::vector<WeakLabel>, double> counts;
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    auto row = matrix.row(i);
    counts[std::vector<WeakLabel>(row.begin(), row.end())] += 1.0;
  }
  LabelPatterns out;
  out.k = k;
  for (const auto& [pattern, count] : counts) {
    out.rows.insert(out.rows.end(), pattern.begin(), pattern.end());
    out.counts.push_back(count);
    out.total += count;
  }
  return out;
}

namespace {

void check_shape(const GenerativeParams& params, std::size_t k) {
  if (params.alpha.size() != k || params.beta.size() != k) {
    throw InputError("generative params have " + std::to_string(params.alpha.size()) +
                     " columns, label matrix has " + std::to_string(k));
  }
}

// log Pr(l | y) for one column.
double log_conditional(WeakLabel l, WeakLabel y, double alpha, double beta) {
  if (l == WeakLabel::kAbstain) return std::log1p(-beta);
  return std::log(beta) + (l == y ? std::log(alpha) : std::log1p(-alpha));
}

struct JointLogs {
  double pos = 0.0;  // log Pr(y=+1, row)
  double neg = 0.0;  // log Pr(y=-1, row)
  double marginal = 0.0;
};

JointLogs joint_logs(const GenerativeParams& params, std::span<const WeakLabel> row) {
  JointLogs j;
  j.pos = std::log(params.gamma);
  j.neg = std::log1p(-params.gamma);
  for (std::size_t c = 0; c < row.size(); ++c) {
    j.pos += log_conditional(row[c], WeakLabel::kPositive, params.alpha[c], params.beta[c]);
    j.neg += log_conditional(row[c], WeakLabel::kNegative, params.alpha[c], params.beta[c]);
  }
  const double hi = std::max(j.pos, j.neg);
  j.marginal = hi + std::log(std::exp(j.pos - hi) + std::exp(j.neg - hi));
  return j;
}

}  // namespace

double marginal_log_likelihood(const GenerativeParams& params, const LabelPatterns& patterns) {
  check_shape(params, patterns.k);
  if (patterns.total == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t p = 0; p < patterns.size(); ++p) {
    sum += patterns.counts[p] * joint_logs(params, patterns.pattern(p)).marginal;
  }
  return sum / patterns.total;
}

double marginal_log_likelihood(const GenerativeParams& params, const LabelMatrix& matrix) {
  return marginal_log_likelihood(params, compress(matrix));
}

LikelihoodGradient likelihood_gradient(const GenerativeParams& params,
                                       const LabelPatterns& patterns) {
  check_shape(params, patterns.k);
  const std::size_t k = patterns.k;
  LikelihoodGradient g;
  g.d_alpha.assign(k, 0.0);
  g.d_beta.assign(k, 0.0);
  if (patterns.total == 0.0) return g;
  double value = 0.0;
  for (std::size_t p = 0; p < patterns.size(); ++p) {
    const auto row = patterns.pattern(p);
    const JointLogs j = joint_logs(params, row);
    const double c = patterns.counts[p];
    const double w_pos = std::exp(j.pos - j.marginal);
    const double w_neg = std::exp(j.neg - j.marginal);
    value += c * j.marginal;
    for (std::size_t col = 0; col < k; ++col) {
      const double a = params.alpha[col];
      const double b = params.beta[col];
      switch (row[col]) {
        case WeakLabel::kPositive:
          g.d_alpha[col] += c * (w_pos / a - w_neg / (1.0 - a));
          g.d_beta[col] += c / b;
          break;
        case WeakLabel::kNegative:
          g.d_alpha[col] += c * (w_neg / a - w_pos / (1.0 - a));
          g.d_beta[col] += c / b;
          break;
        case WeakLabel::kAbstain:
          g.d_beta[col] -= c / (1.0 - b);
          break;
      }
    }
  }
  g.value = value / patterns.total;
  for (double& d : g.d_alpha) d /= patterns.total;
  for (double& d : g.d_beta) d /= patterns.total;
  return g;
}

double posterior(const GenerativeParams& params, std::span<const WeakLabel> row) {
  check_shape(params, row.size());
  double log_odds = 0.0;
  bool any = false;
  for (std::size_t c = 0; c < row.size(); ++c) {
    if (row[c] == WeakLabel::kAbstain) continue;
    any = true;
    const double agree = std::log(params.alpha[c]);
    const double disagree = std::log1p(-params.alpha[c]);
    log_odds += row[c] == WeakLabel::kPositive ? agree - disagree : disagree - agree;
  }
  if (!any) return params.gamma;
  log_odds += std::log(params.gamma) - std::log1p(-params.gamma);
  return 1.0 / (1.0 + std::exp(-log_odds));
}

FitResult fit_generative_model(const LabelMatrix& matrix, double gamma,
                               const FitOptions& options) {
  if (matrix.rows() == 0 || matrix.cols() == 0) {
    throw InputError("cannot fit a generative model on an empty label matrix");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw InputError("gamma must lie in (0, 1)");
  if (!(options.step_size > 0.0) || !(options.tolerance > 0.0) || options.max_iterations < 0) {
    throw InputError("fit options must be positive");
  }

  const LabelPatterns patterns = compress(matrix);
  FitResult result;
  GenerativeParams& params = result.params;
  params.functions = matrix.functions;
  params.gamma = gamma;
  params.alpha.assign(matrix.cols(), options.init_alpha);
  params.beta.assign(matrix.cols(), options.init_beta);
  project_to_box(params);

  LikelihoodGradient grad = likelihood_gradient(params, patterns);
  double objective = grad.value;
  result.trace.push_back({0, objective, 0.0});
  double step = options.step_size;
  constexpr double kMinStep = 1e-20;

  for (int it = 1; it <= options.max_iterations; ++it) {
    for (std::size_t c = 0; c < params.k(); ++c) {
      if (!std::isfinite(grad.d_alpha[c]) || !std::isfinite(grad.d_beta[c])) {
        throw NumericError("non-finite likelihood gradient at iteration " + std::to_string(it));
      }
    }
    GenerativeParams trial = params;
    double trial_objective = 0.0;
    bool moved = false;
    while (step >= kMinStep) {
      for (std::size_t c = 0; c < params.k(); ++c) {
        trial.alpha[c] = params.alpha[c] + step * grad.d_alpha[c];
        trial.beta[c] = params.beta[c] + step * grad.d_beta[c];
      }
      project_to_box(trial);
      trial_objective = marginal_log_likelihood(trial, patterns);
      if (trial_objective >= objective) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) {
      result.converged = true;
      break;
    }
    const bool same_point = trial.alpha == params.alpha && trial.beta == params.beta;
    const double gain = trial_objective - objective;
    params = std::move(trial);
    objective = trial_objective;
    result.iterations = it;
    result.trace.push_back({it, objective, step});
    if (same_point || gain < options.tolerance) {
      result.converged = true;
      break;
    }
    step = std::min(step * 2.0, options.max_step);
    grad = likelihood_gradient(params, patterns);
  }
  return result;
}

AggregatedLabels aggregate_majority(const LabelMatrix& matrix) {
  AggregatedLabels out;
  out.pairs = matrix.pairs;
  out.labels.reserve(matrix.rows());
  for (std::size_t i = 0; i < matrix.rows(); ++i) out.labels.push_back(majority_vote(matrix.row(i)));
  return out;
}

AggregatedLabels single_column(const LabelMatrix& matrix, std::size_t column) {
  if (column >= matrix.cols()) throw InputError("label matrix has no such column");
  AggregatedLabels out;
  out.pairs = matrix.pairs;
  out.labels.reserve(matrix.rows());
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    const WeakLabel l = matrix.at(i, column);
    if (l == WeakLabel::kAbstain) {
      out.labels.emplace_back(std::nullopt);
    } else {
      out.labels.push_back(AggregatedLabel{l, 1.0});
    }
  }
  return out;
}

AggregatedLabels aggregate_generative(const LabelMatrix& matrix, const GenerativeParams& params) {
  check_shape(params, matrix.cols());
  if (!params.functions.empty() && params.functions != matrix.functions) {
    throw InputError("generative params were fit on different labeling functions");
  }
  AggregatedLabels out;
  out.pairs = matrix.pairs;
  out.labels.reserve(matrix.rows());
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    const double p = posterior(params, matrix.row(i));
    if (p > 0.5) {
      out.labels.push_back(AggregatedLabel{WeakLabel::kPositive, p});
    } else if (p < 0.5) {
      out.labels.push_back(AggregatedLabel{WeakLabel::kNegative, 1.0 - p});
    } else {
      out.labels.push_back(std::nullopt);
    }
  }
  return out;
}

void write_aggregated(const AggregatedLabels& labels, std::ostream& out,
                      const std::optional<Provenance>& provenance) {
  if (provenance) out << provenance_comment(*provenance) << '\n';
  out << "query_id\tpassage_id\tlabel\tconfidence\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << labels.pairs[i].query_id << '\t' << labels.pairs[i].passage_id << '\t';
    if (const auto& l = labels.labels[i]) {
      out << to_int(l->label) << '\t' << format_double(l->confidence) << '\n';
    } else {
      out << "0\t0\n";
    }
  }
}

AggregatedLabels read_aggregated(std::istream& in) {
  AggregatedLabels labels;
  std::string line;
  if (!next_data_line(in, line) || line != "query_id\tpassage_id\tlabel\tconfidence") {
    throw InputError("aggregated labels: bad header");
  }
  std::size_t row = 0;
  while (next_data_line(in, line)) {
    ++row;
    const auto f = split_fields(line, '\t');
    if (f.size() != 4) {
      throw InputError("aggregated labels row " + std::to_string(row) + ": expected 4 fields");
    }
    labels.pairs.push_back({f[0], f[1]});
    const WeakLabel l = weak_label_from_int(parse_int(f[2]));
    const double s = parse_double(f[3]);
    if (l == WeakLabel::kAbstain) {
      labels.labels.push_back(std::nullopt);
    } else {
      if (!(s >= 0.0 && s <= 1.0)) {
        throw InputError("aggregated labels row " + std::to_string(row) +
                         ": confidence outside [0, 1]");
      }
      labels.labels.push_back(AggregatedLabel{l, s});
    }
  }
  return labels;
}

AggregatedLabels load_aggregated(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open aggregated labels " + path.string());
  return read_aggregated(in);
}

void write_params_json(const GenerativeParams& params, std::ostream& out,
                       const std::optional<Provenance>& provenance) {
  nlohmann::ordered_json j;
  j["alpha"] = params.alpha;
  j["beta"] = params.beta;
  j["gamma"] = params.gamma;
  j["functions"] = params.functions;
  if (provenance) j["provenance"] = provenance_json(*provenance);
  out << j.dump(2) << '\n';
}

GenerativeParams read_params_json(std::istream& in) {
  GenerativeParams params;
  try {
    const auto j = nlohmann::json::parse(in);
    params.alpha = j.at("alpha").get<std::vector<double>>();
    params.beta = j.at("beta").get<std::vector<double>>();
    params.gamma = j.at("gamma").get<double>();
    if (j.contains("functions")) params.functions = j["functions"].get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("generative params JSON: ") + e.what());
  }
  if (params.alpha.size() != params.beta.size()) {
    throw InputError("generative params JSON: alpha and beta lengths differ");
  }
  return params;
}

void write_fit_trace(std::span<const FitTraceEntry> trace, std::ostream& out,
                     const std::optional<Provenance>& provenance) {
  if (provenance) out << provenance_comment(*provenance) << '\n';
  out << "iteration,objective,step_size\n";
  for (const auto& e : trace) {
    out << e.iteration << ',' << format_double(e.objective) << ',' << format_double(e.step)
        << '\n';
  }
}

}  // namespace wsrank
