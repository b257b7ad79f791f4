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

#include "wsrank/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wsrank/error.hpp"
#include "wsrank/eval.hpp"
#include "wsrank/features.hpp"
#include "wsrank/format.hpp"
#include "wsrank/log.hpp"
#include "wsrank/rng.hpp"
#include "wsrank/trainer.hpp"
#include "wsrank/triplets.hpp"

namespace wsrank {

namespace {

namespace fs = std::filesystem;

// Seed streams per stage.
constexpr std::uint64_t kTripletStream = 1;
constexpr std::uint64_t kTrainStream = 2;

Provenance stamp(const PipelineConfig& c, const std::string& stage) {
  return Provenance{stage, c.hash(), c.seed, kArtifactVersion};
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

fs::path output(const PipelineConfig& c, const char* name) {
  fs::create_directories(c.out_dir);
  return c.out_dir / name;
}

fs::path stage_input(const PipelineConfig& c, const char* name, const char* producer) {
  const fs::path p = c.out_dir / name;
  if (!fs::exists(p)) {
    throw InputError("missing stage input " + p.string() + " (run '" + producer + "' first)");
  }
  return p;
}

Split split_of(const std::string& name) { return parse_split(name); }

struct Stores {
  std::map<std::string, EmbeddingStore> owned;

  ScoreResources resources(const CorpusStats* stats) const {
    ScoreResources r;
    r.stats = stats;
    for (const auto& [name, store] : owned) r.stores.emplace(name, &store);
    return r;
  }
};

Stores load_stores(const PipelineConfig& c) {
  Stores s;
  for (const auto& [name, path] : c.embeddings) {
    s.owned.emplace(name, load_embeddings(c.resolve(path), name));
  }
  return s;
}

Dataset load_train(const PipelineConfig& c) { return load_dataset(c.resolve(c.train_path), Split::kTrain); }

Dataset load_eval(const PipelineConfig& c) {
  return load_dataset(c.eval_path(), split_of(c.eval_split));
}

nlohmann::ordered_json report_json(const MetricReport& r) {
  return {{"map", r.map},         {"mrr", r.mrr},         {"p_at_1", r.p_at_1},
          {"p_at_5", r.p_at_5},   {"queries", r.queries}, {"excluded_queries", r.excluded_queries}};
}

nlohmann::ordered_json quality_json(const LabelQuality& q) {
  return {{"p_at_1", q.p_at_1}, {"r_at_1", q.r_at_1}, {"auc", q.auc},
          {"labeled_queries", q.labeled_queries}};
}

std::string report_row(const std::string& name, const MetricReport& r) {
  char line[200];
  std::snprintf(line, sizeof line, "%-24s %8.2f %8.2f %8.2f %8.2f %8zu\n", name.c_str(),
                100.0 * r.map, 100.0 * r.mrr, 100.0 * r.p_at_1, 100.0 * r.p_at_5, r.queries);
  return line;
}

std::string quality_row(const std::string& name, const LabelQuality& q) {
  char line[200];
  std::snprintf(line, sizeof line, "%-24s %8.2f %8.2f %8.2f %8zu\n", name.c_str(),
                100.0 * q.p_at_1, 100.0 * q.r_at_1, 100.0 * q.auc, q.labeled_queries);
  return line;
}

struct Ranked {
  std::vector<std::pair<std::string, std::vector<RankedCandidate>>> queries;
};

Ranked rank_eval_split(const PipelineConfig& c) {
  const fs::path model_path = stage_input(c, artifacts::kModel, "train");
  const Checkpoint ckpt = load_checkpoint(model_path);
  const Dataset eval = load_eval(c);
  const Stores stores = load_stores(c);
  const CorpusStats stats = build_stats(eval, ckpt.schema.tokenizer);
  const ScoreResources res = stores.resources(&stats);
  const FeatureTable features = featurize_dataset(eval, ckpt.schema, res, c.threads);
  Ranked out;
  for (const auto& set : eval.candidate_sets) {
    out.queries.emplace_back(set.query_id,
                             rank(ckpt.params, set.query_id, set.passage_ids, features));
  }
  return out;
}

}  // namespace

void check_config_inputs(const PipelineConfig& c) {
  auto need = [](const fs::path& p, const std::string& what) {
    if (!fs::is_regular_file(p)) throw InputError(what + " not found: " + p.string());
  };
  need(c.resolve(c.train_path), "data.train");
  if (c.val_path) need(c.resolve(*c.val_path), "data.val");
  if (c.test_path) need(c.resolve(*c.test_path), "data.test");
  for (const auto& [name, path] : c.embeddings) need(c.resolve(path), "embeddings." + name);
}

StageOutputs cmd_label(const PipelineConfig& c) {
  check_config_inputs(c);
  const Dataset train = load_train(c);
  const Stores stores = load_stores(c);
  const CorpusStats stats = build_stats(train, c.tokenizer);
  const ScoreResources res = stores.resources(&stats);
  ApplyOptions opts;
  opts.labeling = c.labeling;
  opts.threads = c.threads;
  const LabelMatrix matrix = apply_labeling_functions(train, c.functions, res, opts);
  for (const auto& problem : check_label_histogram(matrix)) log::warn("label histogram: " + problem);

  std::ostringstream out;
  write_label_matrix(matrix, out, stamp(c, "label"));
  const fs::path path = output(c, artifacts::kLabels);
  write_file(path, out.str());
  return {path};
}

StageOutputs cmd_aggregate(const PipelineConfig& c) {
  check_config_inputs(c);
  const LabelMatrix matrix = load_label_matrix(stage_input(c, artifacts::kLabels, "label"));
  std::vector<std::string> expected;
  for (const auto& fn : c.functions) expected.push_back(fn.name);
  if (matrix.functions != expected) {
    throw InputError("labels.tsv columns do not match labeling.functions; rerun 'label'");
  }
  StageOutputs written;
  AggregatedLabels labels;
  if (c.method == AggregationMethod::kGenerative) {
    FitOptions fit = c.fit;
    fit.seed = c.seed;
    FitResult result = fit_generative_model(matrix, c.gamma, fit);
    if (!result.converged) {
      log::warn("generative fit stopped at the iteration limit (" +
                std::to_string(result.iterations) + ")");
    }
    labels = aggregate_generative(matrix, result.params);

    std::ostringstream params;
    write_params_json(result.params, params, stamp(c, "aggregate"));
    written.push_back(output(c, artifacts::kParams));
    write_file(written.back(), params.str());

    std::ostringstream trace;
    write_fit_trace(result.trace, trace, stamp(c, "aggregate"));
    written.push_back(output(c, artifacts::kFitTrace));
    write_file(written.back(), trace.str());
  } else {
    labels = aggregate_majority(matrix);
    // stale generative outputs would contradict the aggregated labels
    fs::remove(c.out_dir / artifacts::kParams);
    fs::remove(c.out_dir / artifacts::kFitTrace);
  }
  std::ostringstream out;
  write_aggregated(labels, out, stamp(c, "aggregate"));
  written.insert(written.begin(), output(c, artifacts::kAggregated));
  write_file(written.front(), out.str());
  return written;
}

StageOutputs cmd_triplets(const PipelineConfig& c) {
  check_config_inputs(c);
  const AggregatedLabels labels =
      load_aggregated(stage_input(c, artifacts::kAggregated, "aggregate"));
  const TripletSet set =
      generate_triplets(labels, c.per_query_samples, derive_seed(c.seed, kTripletStream));
  if (set.triplets.empty()) throw InputError("no query has both a positive and a negative label");
  std::ostringstream out;
  write_triplets(set.triplets, out, stamp(c, "triplets"));
  const fs::path path = output(c, artifacts::kTriplets);
  write_file(path, out.str());
  return {path};
}

StageOutputs cmd_train(const PipelineConfig& c) {
  check_config_inputs(c);
  const std::vector<Triplet> triplets =
      load_triplets(stage_input(c, artifacts::kTriplets, "triplets"));
  const Dataset train_set = load_train(c);
  const Stores stores = load_stores(c);
  const CorpusStats stats = build_stats(train_set, c.tokenizer);
  const ScoreResources res = stores.resources(&stats);

  std::vector<LabelingFunction> sources;
  for (const auto& name : c.feature_scores) sources.push_back(c.function(name));
  const FeatureSchema schema = fit_feature_schema(train_set, c.feature_embedding, sources, res, c.threads);
  const FeatureTable features = featurize_dataset(train_set, schema, res, c.threads);

  TrainOptions opts = c.train;
  opts.seed = derive_seed(c.seed, kTrainStream);
  opts.threads = c.threads;
  const TrainResult result = train(triplets, features, opts);

  Checkpoint ckpt{schema, result.params, stamp(c, "train")};
  std::ostringstream model;
  write_checkpoint(ckpt, model);
  const fs::path model_path = output(c, artifacts::kModel);
  write_file(model_path, model.str());

  std::ostringstream trace;
  write_loss_trace(result.loss_trace, trace, stamp(c, "train"));
  const fs::path trace_path = output(c, artifacts::kTrainTrace);
  write_file(trace_path, trace.str());
  return {model_path, trace_path};
}

StageOutputs cmd_rank(const PipelineConfig& c) {
  check_config_inputs(c);
  const Ranked ranked = rank_eval_split(c);
  std::ostringstream out;
  out << provenance_comment(stamp(c, "rank")) << '\n';
  out << "query_id\tpassage_id\trank\tscore\n";
  for (const auto& [qid, list] : ranked.queries) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      out << qid << '\t' << list[i].passage_id << '\t' << (i + 1) << '\t'
          << format_double(list[i].score) << '\n';
    }
  }
  const fs::path path = output(c, artifacts::kRankings);
  write_file(path, out.str());
  return {path};
}

StageOutputs cmd_eval(const PipelineConfig& c) {
  check_config_inputs(c);
  const Ranked ranked = rank_eval_split(c);
  const Dataset eval = load_eval(c);
  if (!eval.has_gold()) throw InputError("eval split " + c.eval_split + " carries no gold labels");

  std::vector<RankedList> lists;
  for (const auto& [qid, list] : ranked.queries) {
    const CandidateSet* set = eval.find_candidates(qid);
    if (set == nullptr || !set->gold) continue;
    RankedList l;
    l.query_id = qid;
    for (const auto& r : list) {
      l.passage_ids.push_back(r.passage_id);
      l.relevant.push_back(set->is_relevant(r.passage_id));
    }
    lists.push_back(std::move(l));
  }
  const MetricReport ranker = evaluate_rankings(lists);

  // Each labeling function used directly as a ranker on the eval split.
  const Stores stores = load_stores(c);
  const CorpusStats eval_stats = build_stats(eval, c.tokenizer);
  const ScoreResources eval_res = stores.resources(&eval_stats);
  std::vector<std::pair<std::string, MetricReport>> baselines;
  for (const auto& fn : c.functions) {
    baselines.emplace_back(fn.name, evaluate_ranker(eval, [&](const CandidateSet& set) {
                             return score_candidates(eval, set, fn, eval_res);
                           }));
  }

  // Pseudo-label quality on the training split, when it has gold and the
  // label artifacts exist.
  std::vector<std::pair<std::string, LabelQuality>> quality;
  const Dataset train = load_train(c);
  const fs::path labels_path = c.out_dir / artifacts::kLabels;
  const fs::path aggregated_path = c.out_dir / artifacts::kAggregated;
  if (train.has_gold() && fs::exists(labels_path)) {
    const LabelMatrix matrix = load_label_matrix(labels_path);
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
      quality.emplace_back(matrix.functions[j], pseudo_label_quality(matrix, j, train));
    }
    if (fs::exists(aggregated_path)) {
      quality.emplace_back(c.method == AggregationMethod::kGenerative ? "aggregated (generative)"
                                                                      : "aggregated (majority)",
                           pseudo_label_quality(load_aggregated(aggregated_path), train));
    }
  }

  nlohmann::ordered_json j;
  j["provenance"] = provenance_json(stamp(c, "eval"));
  j["eval_split"] = c.eval_split;
  j["ranker"] = report_json(ranker);
  j["baselines"] = nlohmann::ordered_json::object();
  for (const auto& [name, r] : baselines) j["baselines"][name] = report_json(r);
  j["pseudo_labels"] = nlohmann::ordered_json::object();
  for (const auto& [name, q] : quality) j["pseudo_labels"][name] = quality_json(q);
  j["per_query"] = nlohmann::ordered_json::array();
  for (const auto& q : ranker.per_query) {
    j["per_query"].push_back({{"query_id", q.query_id},
                              {"average_precision", q.average_precision},
                              {"reciprocal_rank", q.reciprocal_rank},
                              {"p_at_1", q.p_at_1},
                              {"p_at_5", q.p_at_5}});
  }
  const fs::path json_path = output(c, artifacts::kMetricsJson);
  write_file(json_path, j.dump(2) + "\n");

  std::string text = provenance_comment(stamp(c, "eval")) + "\n";
  text += "ranking on " + c.eval_split + " split (percent)\n";
  char header[200];
  std::snprintf(header, sizeof header, "%-24s %8s %8s %8s %8s %8s\n", "method", "MAP", "MRR", "P@1",
                "P@5", "queries");
  text += header;
  text += report_row("ranker", ranker);
  for (const auto& [name, r] : baselines) text += report_row(name, r);
  if (!quality.empty()) {
    text += "\npseudo labels on train split (percent)\n";
    std::snprintf(header, sizeof header, "%-24s %8s %8s %8s %8s\n", "labels", "P@1", "R@1", "AUC",
                  "queries");
    text += header;
    for (const auto& [name, q] : quality) text += quality_row(name, q);
  }
  const fs::path text_path = output(c, artifacts::kMetricsText);
  write_file(text_path, text);
  return {json_path, text_path};
}

StageOutputs cmd_pipeline(const PipelineConfig& c) {
  check_config_inputs(c);
  StageOutputs all;
  for (auto stage : {cmd_label, cmd_aggregate, cmd_triplets, cmd_train, cmd_rank, cmd_eval}) {
    const StageOutputs out = stage(c);
    all.insert(all.end(), out.begin(), out.end());
  }
  return all;
}

}  // namespace wsrank
