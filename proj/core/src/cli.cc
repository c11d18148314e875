#include "coref/cli.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "coref/checkpoint.h"
#include "coref/conll.h"
#include "coref/inference.h"
#include "coref/metrics.h"
#include "coref/pruner.h"
#include "coref/trainer.h"
#include "json.hpp"

namespace coref {
namespace {

// Loads an embedding table, or returns an empty one (every lookup is the
// zero vector) when no path is configured.
EmbeddingTable load_table(const std::string& path, int dim,
                          bool lowercase_fallback) {
  if (path.empty()) return EmbeddingTable(dim, lowercase_fallback);
  return EmbeddingTable::load_file(path, dim, lowercase_fallback);
}

std::vector<std::string> dedupe(const std::vector<std::string>& paths) {
  std::vector<std::string> unique;
  for (const std::string& p : paths) {
    if (std::find(unique.begin(), unique.end(), p) == unique.end()) {
      unique.push_back(p);
    }
  }
  return unique;
}

void apply_overrides(CorefModel& model,
                     const std::vector<std::string>& overrides) {
  if (overrides.empty()) return;
  RunConfig cfg = model.config();
  for (const std::string& assignment : overrides) {
    apply_override(&cfg, assignment);
  }
  model.set_config(cfg);
}

int64_t span_key(const Span& s) {
  return int64_t(s.start) << 32 | uint32_t(s.end);
}

void print_metric_block(std::ostream& out, const char* name,
                        const MetricResult& m) {
  out << name << " " << m.precision << " " << m.recall << " " << m.f1;
}

void print_metric_row(std::ostream& out, const std::string& label,
                      const MetricResult& m, const MetricResult& b,
                      const MetricResult& c) {
  out << label << " ";
  print_metric_block(out, "muc", m);
  out << " ";
  print_metric_block(out, "b3", b);
  out << " ";
  print_metric_block(out, "ceaf", c);
  out << " avg_f1 " << avg_f1(m, b, c) << "\n";
}

nlohmann::json clusters_to_json(const Clustering& clusters) {
  nlohmann::json out = nlohmann::json::array();
  for (const Cluster& cluster : clusters) {
    nlohmann::json spans = nlohmann::json::array();
    for (const Span& s : cluster) {
      spans.push_back(nlohmann::json::array({s.start, s.end}));
    }
    out.push_back(std::move(spans));
  }
  return out;
}

template <typename Body>
int guarded(std::ostream& err, Body body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    validate_config(config);
    if (config.train_path.empty()) {
      throw std::invalid_argument("train: config sets no training corpus");
    }
    const std::vector<Document> train_docs =
        parse_conll_file(config.train_path);
    const std::vector<Document> dev_docs =
        config.dev_path.empty() ? std::vector<Document>{}
                                : parse_conll_file(config.dev_path);
    EmbeddingTable glove = load_table(config.glove_path, config.glove_dim,
                                      config.lowercase_fallback);
    EmbeddingTable turian = load_table(config.turian_path, config.turian_dim,
                                       config.lowercase_fallback);
    CorefModel model(config, CharVocab::build(train_docs), std::move(glove),
                     std::move(turian), config.seed);
    TrainState state;
    state.rng = Rng(config.seed);
    const TrainResult result = train(model, train_docs, dev_docs, &state, out);
    out << "trained epochs " << result.epochs_run << " steps " << result.steps
        << " best_dev_f1 " << std::setprecision(17) << result.best_dev_f1
        << std::setprecision(6) << "\n";
    if (!config.checkpoint_path.empty()) {
      err << "checkpoint written to " << config.checkpoint_path << "\n";
    }
    return 0;
  });
}

int cmd_predict(const std::vector<std::string>& member_paths,
                const std::string& input_path, const std::string& output_path,
                const std::vector<std::string>& overrides,
                bool include_attention, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::vector<std::string> paths = dedupe(member_paths);
    if (paths.empty()) {
      throw std::invalid_argument("predict: no model checkpoint given");
    }
    std::vector<std::unique_ptr<CorefModel>> members;
    for (const std::string& path : paths) {
      members.push_back(std::move(load_checkpoint(path).model));
      apply_overrides(*members.back(), overrides);
    }
    std::vector<CorefModel*> models;
    for (auto& m : members) models.push_back(m.get());

    const std::vector<Document> docs = parse_conll_file(input_path);
    std::vector<Clustering> predictions;
    predictions.reserve(docs.size());
    for (const Document& doc : docs) {
      predictions.push_back(models.size() == 1
                                ? predict_document(*models[0], doc)
                                : ensemble_predict(models, doc));
      out << "doc " << doc.doc_key() << " clusters "
          << predictions.back().size() << "\n";
    }
    write_conll_file(output_path, docs, predictions);

    const std::string sidecar_path = output_path + ".jsonl";
    std::ofstream sidecar(sidecar_path);
    if (!sidecar) {
      throw std::runtime_error("cannot open " + sidecar_path + " for writing");
    }
    for (size_t d = 0; d < docs.size(); ++d) {
      nlohmann::json line;
      line["doc_key"] = docs[d].doc_key();
      line["clusters"] = clusters_to_json(predictions[d]);
      if (include_attention) {
        const AttentionReport report =
            attention_report(*models[0], docs[d]);
        nlohmann::json records = nlohmann::json::array();
        for (const AttentionRecord& rec : report.records) {
          nlohmann::json r;
          r["span"] = nlohmann::json::array({rec.span.start, rec.span.end});
          r["cluster"] = rec.cluster_id;
          r["tokens"] = rec.tokens;
          r["weights"] = rec.weights;
          records.push_back(std::move(r));
        }
        line["attention"] = std::move(records);
      }
      sidecar << line.dump() << "\n";
    }
    out << "wrote " << output_path << " and " << sidecar_path << "\n";
    return 0;
  });
}

int cmd_evaluate(const std::string& gold_path, const std::string& system_path,
                 std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::vector<Document> gold = parse_conll_file(gold_path);
    const std::vector<Document> system = parse_conll_file(system_path);

    std::map<std::string, const Document*> system_by_key;
    for (const Document& doc : system) {
      if (!system_by_key.emplace(doc.doc_key(), &doc).second) {
        throw std::invalid_argument("evaluate: duplicate doc_key " +
                                    doc.doc_key() + " in system file");
      }
    }
    // An entirely empty system file scores zero against every gold
    // document; a partial system is an alignment error instead.
    if (!system.empty()) {
      std::vector<std::string> missing, extra;
      std::set<std::string> gold_keys;
      for (const Document& doc : gold) {
        gold_keys.insert(doc.doc_key());
        if (!system_by_key.count(doc.doc_key())) {
          missing.push_back(doc.doc_key());
        }
      }
      for (const Document& doc : system) {
        if (!gold_keys.count(doc.doc_key())) extra.push_back(doc.doc_key());
      }
      if (!missing.empty() || !extra.empty()) {
        std::ostringstream what;
        what << "evaluate: doc_key mismatch;";
        if (!missing.empty()) {
          what << " missing from system:";
          for (const std::string& k : missing) what << " " << k;
          what << ";";
        }
        if (!extra.empty()) {
          what << " not in gold:";
          for (const std::string& k : extra) what << " " << k;
        }
        throw std::invalid_argument(what.str());
      }
    }

    out << std::setprecision(6);
    std::vector<MetricResult> muc_parts, b3_parts, ceaf_parts;
    for (const Document& doc : gold) {
      const auto it = system_by_key.find(doc.doc_key());
      const Clustering predicted =
          it == system_by_key.end() ? Clustering{} : it->second->gold_clusters;
      const MetricResult m = muc(doc.gold_clusters, predicted);
      const MetricResult b = b_cubed(doc.gold_clusters, predicted);
      const MetricResult c = ceaf_phi4(doc.gold_clusters, predicted);
      print_metric_row(out, "doc " + doc.doc_key(), m, b, c);
      muc_parts.push_back(m);
      b3_parts.push_back(b);
      ceaf_parts.push_back(c);
    }
    print_metric_row(out, "corpus", aggregate(muc_parts), aggregate(b3_parts),
                     aggregate(ceaf_parts));
    return 0;
  });
}

int cmd_analyze(const std::string& model_path, const std::string& input_path,
                const std::vector<double>& lambda_sweep,
                const std::vector<std::string>& overrides, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&] {
    LoadedCheckpoint loaded = load_checkpoint(model_path);
    CorefModel& model = *loaded.model;
    apply_overrides(model, overrides);
    const std::vector<Document> docs = parse_conll_file(input_path);

    std::vector<double> sweep =
        lambda_sweep.empty() ? std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5}
                             : lambda_sweep;
    std::sort(sweep.begin(), sweep.end());
    sweep.erase(std::unique(sweep.begin(), sweep.end()), sweep.end());
    for (double ratio : sweep) {
      if (ratio <= 0) {
        throw std::invalid_argument("analyze: span ratio must be positive");
      }
    }

    // Unary scores do not depend on the ratio, so score once per document
    // and prune repeatedly.
    std::vector<MentionScores> scored;
    scored.reserve(docs.size());
    for (const Document& doc : docs) {
      scored.push_back(model.score_all_spans(doc));
    }

    out << std::setprecision(6);
    for (double ratio : sweep) {
      int64_t gold_total = 0, recalled = 0;
      for (size_t d = 0; d < docs.size(); ++d) {
        const std::vector<int> kept =
            prune_spans(scored[d].spans, scored[d].scores, ratio,
                        docs[d].num_tokens());
        std::unordered_set<int64_t> accepted_keys;
        for (int k : kept) accepted_keys.insert(span_key(scored[d].spans[k]));
        for (const Cluster& cluster : docs[d].gold_clusters) {
          for (const Span& m : cluster) {
            ++gold_total;
            recalled += accepted_keys.count(span_key(m));
          }
        }
      }
      out << "lambda " << ratio << " mention_recall "
          << (gold_total == 0 ? 1.0
                              : static_cast<double>(recalled) / gold_total)
          << "\n";
    }

    // Constituency precision of the spans accepted at the model's own
    // ratio, aggregated over documents that carry parse information.
    const int max_width = model.config().max_span_width;
    std::vector<int64_t> matched(max_width + 1, 0), counts(max_width + 1, 0);
    bool any_parses = false;
    for (size_t d = 0; d < docs.size(); ++d) {
      const std::vector<int> kept =
          prune_spans(scored[d].spans, scored[d].scores,
                      model.config().span_ratio, docs[d].num_tokens());
      std::vector<Span> accepted;
      for (int k : kept) accepted.push_back(scored[d].spans[k]);
      const ConstituencyPrecision cp = constituency_precision(
          accepted, docs[d].gold_constituents, max_width);
      if (!cp.available) continue;
      any_parses = true;
      for (int w = 1; w <= max_width; ++w) {
        if (cp.accepted_counts[w - 1] == 0 || !cp.by_width[w - 1]) continue;
        counts[w] += cp.accepted_counts[w - 1];
        matched[w] += std::llround(*cp.by_width[w - 1] *
                                   static_cast<double>(
                                       cp.accepted_counts[w - 1]));
      }
    }
    if (!any_parses) {
      out << "constituency_precision unavailable\n";
    } else {
      for (int w = 1; w <= max_width; ++w) {
        if (counts[w] == 0) continue;
        out << "width " << w << " constituency_precision "
            << static_cast<double>(matched[w]) / static_cast<double>(counts[w])
            << " spans " << counts[w] << "\n";
      }
    }

    for (const Document& doc : docs) {
      const AttentionReport report = attention_report(model, doc);
      for (const AttentionRecord& rec : report.records) {
        out << "attention " << doc.doc_key() << " span " << rec.span.start
            << " " << rec.span.end << " cluster " << rec.cluster_id
            << " tokens ";
        for (size_t t = 0; t < rec.tokens.size(); ++t) {
          out << (t ? "|" : "") << rec.tokens[t];
        }
        out << " weights " << std::setprecision(17);
        for (size_t t = 0; t < rec.weights.size(); ++t) {
          out << (t ? "|" : "") << rec.weights[t];
        }
        out << std::setprecision(6) << "\n";
      }
    }
    return 0;
  });
}

}  // namespace coref
