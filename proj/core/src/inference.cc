#include "coref/inference.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <unordered_set>

#include "coref/pruner.h"

namespace coref {
namespace {

// Softmax over [0, row...]: the dummy participates at score 0.
std::vector<real_t> antecedent_distribution(const std::vector<real_t>& row) {
  real_t top = 0;
  for (real_t s : row) top = std::max(top, s);
  std::vector<real_t> probs;
  probs.reserve(row.size() + 1);
  real_t denom = std::exp(real_t(0) - top);
  probs.push_back(denom);
  for (real_t s : row) {
    probs.push_back(std::exp(s - top));
    denom += probs.back();
  }
  for (real_t& p : probs) p /= denom;
  return probs;
}

std::vector<AntecedentDecision> decode_values(
    const std::vector<Span>& accepted,
    const std::vector<std::vector<int>>& candidates,
    const std::vector<std::vector<real_t>>& pair_scores) {
  std::vector<AntecedentDecision> decisions(accepted.size());
  for (size_t i = 0; i < accepted.size(); ++i) {
    AntecedentDecision& d = decisions[i];
    d.span = accepted[i];
    d.best = -1;
    real_t best_score = 0;  // the dummy's fixed score
    // Nearest candidate first with a strict comparison: equal scores keep
    // the dummy, and equal non-dummy scores keep the nearer antecedent.
    const auto& row = pair_scores[i];
    for (size_t c = row.size(); c-- > 0;) {
      if (row[c] > best_score) {
        best_score = row[c];
        d.best = candidates[i][c];
      }
    }
    d.probs = antecedent_distribution(row);
  }
  return decisions;
}

std::vector<std::vector<real_t>> pair_values(const ModelOutput& out) {
  std::vector<std::vector<real_t>> values(out.pair_scores.size());
  for (size_t i = 0; i < out.pair_scores.size(); ++i) {
    values[i].reserve(out.pair_scores[i].size());
    for (const ad::Node* s : out.pair_scores[i]) {
      values[i].push_back(s->value.at(0));
    }
  }
  return values;
}

void check_compatible(const CorefModel& a, const CorefModel& b) {
  const auto mismatch = [](const char* what) {
    throw std::invalid_argument(std::string("ensemble: models differ in ") +
                                what);
  };
  if (a.config().max_span_width != b.config().max_span_width) {
    mismatch("span width limit");
  }
  if (a.config().span_ratio != b.config().span_ratio) mismatch("span ratio");
  if (a.config().max_antecedents != b.config().max_antecedents) {
    mismatch("antecedent limit");
  }
  if (a.char_vocab().codepoints() != b.char_vocab().codepoints()) {
    mismatch("character vocabulary");
  }
  if (a.registry().size() != b.registry().size()) mismatch("parameter count");
  for (size_t p = 0; p < a.registry().size(); ++p) {
    const ad::Parameter* pa = a.registry().items()[p].get();
    const ad::Parameter* pb = b.registry().items()[p].get();
    if (pa->name != pb->name || pa->value.shape != pb->value.shape) {
      mismatch("parameter shapes");
    }
  }
}

}  // namespace

std::vector<AntecedentDecision> decode_antecedents(const ModelOutput& out) {
  return decode_values(out.accepted, out.candidates, pair_values(out));
}

std::vector<AntecedentDecision> predict_antecedents(CorefModel& model,
                                                    const Document& doc) {
  ad::Tape tape;
  Rng rng(0);
  ModelOutput out = model.forward(tape, doc, /*train=*/false, rng);
  return decode_antecedents(out);
}

Clustering recover_clusters(
    const std::vector<Span>& accepted,
    const std::vector<AntecedentDecision>& decisions) {
  if (decisions.size() != accepted.size()) {
    throw std::invalid_argument(
        "recover_clusters: one decision per accepted span");
  }
  const int n = static_cast<int>(accepted.size());
  std::vector<std::vector<int>> adjacent(n);
  for (int i = 0; i < n; ++i) {
    const int j = decisions[i].best;
    if (j < 0) continue;
    if (j >= i) {
      throw std::invalid_argument(
          "recover_clusters: link must point to a preceding span");
    }
    adjacent[i].push_back(j);
    adjacent[j].push_back(i);
  }
  Clustering clusters;
  std::vector<bool> visited(n, false);
  for (int root = 0; root < n; ++root) {
    if (visited[root] || adjacent[root].empty()) continue;
    std::vector<int> members;
    std::deque<int> frontier{root};
    visited[root] = true;
    while (!frontier.empty()) {
      const int node = frontier.front();
      frontier.pop_front();
      members.push_back(node);
      for (int next : adjacent[node]) {
        if (!visited[next]) {
          visited[next] = true;
          frontier.push_back(next);
        }
      }
    }
    if (members.size() < 2) continue;  // singletons carry no links
    std::sort(members.begin(), members.end());
    Cluster cluster;
    cluster.reserve(members.size());
    for (int m : members) cluster.push_back(accepted[m]);
    clusters.push_back(std::move(cluster));
  }
  // BFS discovery order from increasing roots already yields clusters
  // ordered by first span; keep it explicit for safety.
  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& a, const Cluster& b) { return a[0] < b[0]; });
  return clusters;
}

Clustering predict_document(CorefModel& model, const Document& doc) {
  ad::Tape tape;
  Rng rng(0);
  ModelOutput out = model.forward(tape, doc, /*train=*/false, rng);
  return recover_clusters(out.accepted, decode_antecedents(out));
}

Clustering ensemble_predict(std::vector<CorefModel*>& models,
                            const Document& doc, EnsembleTrace* trace) {
  if (models.empty()) {
    throw std::invalid_argument("ensemble: need at least one model");
  }
  for (CorefModel* m : models) {
    if (m == nullptr) throw std::invalid_argument("ensemble: null model");
    check_compatible(*models[0], *m);
  }
  const RunConfig& cfg = models[0]->config();

  // Stage 1: prune once on the mean unary score.
  MentionScores first = models[0]->score_all_spans(doc);
  std::vector<real_t> mean_scores = first.scores;
  for (size_t k = 1; k < models.size(); ++k) {
    MentionScores more = models[k]->score_all_spans(doc);
    if (more.spans != first.spans) {
      throw std::invalid_argument("ensemble: span enumerations differ");
    }
    for (size_t s = 0; s < mean_scores.size(); ++s) {
      mean_scores[s] += more.scores[s];
    }
  }
  for (real_t& s : mean_scores) s /= static_cast<real_t>(models.size());
  std::vector<int> kept = prune_spans(first.spans, mean_scores,
                                      cfg.span_ratio, doc.num_tokens());
  std::vector<Span> accepted;
  accepted.reserve(kept.size());
  for (int k : kept) accepted.push_back(first.spans[k]);

  // Stage 2: score the shared list with every model; average the mention
  // and antecedent scores, then combine and decode.
  const int n = static_cast<int>(accepted.size());
  std::vector<std::vector<int>> candidates =
      candidate_antecedents(n, cfg.max_antecedents);
  std::vector<real_t> mention_sum(n, 0);
  std::vector<std::vector<real_t>> antecedent_sum(n);
  for (int i = 0; i < n; ++i) {
    antecedent_sum[i].assign(candidates[i].size(), 0);
  }
  for (CorefModel* model : models) {
    ad::Tape tape;
    ModelOutput out = model->forward_with_spans(tape, doc, accepted);
    if (out.accepted != accepted) {
      throw std::invalid_argument("ensemble: forced span list changed");
    }
    for (int i = 0; i < n; ++i) {
      mention_sum[i] += out.mention_scores[i]->value.at(0);
      for (size_t c = 0; c < out.antecedent_scores[i].size(); ++c) {
        antecedent_sum[i][c] += out.antecedent_scores[i][c]->value.at(0);
      }
    }
  }
  const real_t scale = real_t(1) / static_cast<real_t>(models.size());
  std::vector<std::vector<real_t>> combined(n);
  for (int i = 0; i < n; ++i) {
    combined[i].resize(candidates[i].size());
    for (size_t c = 0; c < candidates[i].size(); ++c) {
      const int j = candidates[i][c];
      combined[i][c] = scale * (mention_sum[i] + mention_sum[j] +
                                antecedent_sum[i][c]);
    }
  }
  if (trace != nullptr) {
    trace->spans = first.spans;
    trace->mention_scores = mean_scores;
    trace->accepted = kept;
    trace->candidates = candidates;
    trace->combined = combined;
  }
  return recover_clusters(accepted,
                          decode_values(accepted, candidates, combined));
}

AttentionReport attention_report(CorefModel& model, const Document& doc) {
  ad::Tape tape;
  Rng rng(0);
  ModelOutput out = model.forward(tape, doc, /*train=*/false, rng);
  std::vector<AntecedentDecision> decisions = decode_antecedents(out);
  AttentionReport report;
  report.clusters = recover_clusters(out.accepted, decisions);
  for (size_t cid = 0; cid < report.clusters.size(); ++cid) {
    for (const Span& span : report.clusters[cid]) {
      const auto it =
          std::lower_bound(out.accepted.begin(), out.accepted.end(), span);
      const size_t pos = static_cast<size_t>(it - out.accepted.begin());
      AttentionRecord rec;
      rec.span = span;
      rec.cluster_id = static_cast<int>(cid);
      for (int t = span.start; t <= span.end; ++t) {
        rec.tokens.push_back(doc.tokens[t].text);
      }
      const Tensor& w = out.attention[pos]->value;
      rec.weights.assign(w.data.begin(), w.data.end());
      report.records.push_back(std::move(rec));
    }
  }
  std::sort(report.records.begin(), report.records.end(),
            [](const AttentionRecord& a, const AttentionRecord& b) {
              return a.span < b.span;
            });
  return report;
}

CorpusEval evaluate_corpus(CorefModel& model,
                           const std::vector<Document>& docs) {
  std::vector<MetricResult> muc_parts, b3_parts, ceaf_parts;
  double gold_mentions = 0, recalled = 0;
  for (const Document& doc : docs) {
    ad::Tape tape;
    Rng rng(0);
    ModelOutput out = model.forward(tape, doc, /*train=*/false, rng);
    Clustering predicted =
        recover_clusters(out.accepted, decode_antecedents(out));
    muc_parts.push_back(muc(doc.gold_clusters, predicted));
    b3_parts.push_back(b_cubed(doc.gold_clusters, predicted));
    ceaf_parts.push_back(ceaf_phi4(doc.gold_clusters, predicted));
    std::unordered_set<int64_t> accepted_keys;
    for (const Span& s : out.accepted) {
      accepted_keys.insert(int64_t(s.start) << 32 | uint32_t(s.end));
    }
    for (const Cluster& cluster : doc.gold_clusters) {
      for (const Span& m : cluster) {
        gold_mentions += 1;
        recalled += accepted_keys.count(int64_t(m.start) << 32 |
                                        uint32_t(m.end));
      }
    }
  }
  CorpusEval eval;
  eval.muc = aggregate(muc_parts);
  eval.b3 = aggregate(b3_parts);
  eval.ceaf = aggregate(ceaf_parts);
  eval.avg_f1 = avg_f1(eval.muc, eval.b3, eval.ceaf);
  eval.mention_recall = gold_mentions == 0 ? 1.0 : recalled / gold_mentions;
  return eval;
}

}  // namespace coref
