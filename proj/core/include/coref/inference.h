#ifndef COREF_INFERENCE_H_
#define COREF_INFERENCE_H_

#include <string>
#include <vector>

#include "coref/metrics.h"
#include "coref/model.h"

namespace coref {

// One span's antecedent choice. `best` indexes the accepted-span list;
// -1 means the dummy (no antecedent). `probs` is the softmax over
// [dummy, candidates...], so probs[0] is the dummy and probs[c + 1] the
// c-th candidate.
struct AntecedentDecision {
  Span span;
  int best = -1;
  std::vector<real_t> probs;
};

// Greedy decode from a scored document: argmax of s(i, ·) with the dummy
// fixed at 0; ties involving the dummy go to the dummy, ties between
// candidates go to the nearest (latest) one.
std::vector<AntecedentDecision> decode_antecedents(const ModelOutput& out);

// Forward + decode in evaluation mode.
std::vector<AntecedentDecision> predict_antecedents(CorefModel& model,
                                                    const Document& doc);

// Connected components over the predicted links; singletons are dropped.
// Clusters list spans in document order; clusters are ordered by their
// first span.
Clustering recover_clusters(const std::vector<Span>& accepted,
                            const std::vector<AntecedentDecision>& decisions);

// Single-model prediction: forward, decode, recover.
Clustering predict_document(CorefModel& model, const Document& doc);

// Intermediate quantities of an ensemble run, exposed so the combination
// can be checked against hand-averaged scores stage by stage.
struct EnsembleTrace {
  std::vector<Span> spans;               // every enumerated span
  std::vector<real_t> mention_scores;    // averaged s_m, aligned with spans
  std::vector<int> accepted;             // indices into spans after pruning
  std::vector<std::vector<int>> candidates;
  std::vector<std::vector<real_t>> combined;  // final s(i, j) per candidate
};

// Two-stage combination: prune once on the arithmetic mean of per-model
// mention scores, then score the shared span list with every model and
// average mention and antecedent scores. Models must agree on
// hyperparameter shapes; mismatches are rejected. `trace`, when given,
// receives the per-stage scores.
Clustering ensemble_predict(std::vector<CorefModel*>& models,
                            const Document& doc,
                            EnsembleTrace* trace = nullptr);

// Per-mention head-attention record for analysis output.
struct AttentionRecord {
  Span span;
  int cluster_id = 0;  // index into the predicted clustering
  std::vector<std::string> tokens;
  std::vector<real_t> weights;
};

struct AttentionReport {
  Clustering clusters;
  std::vector<AttentionRecord> records;  // one per predicted mention
};

AttentionReport attention_report(CorefModel& model, const Document& doc);

// Corpus-level evaluation of single-model predictions.
struct CorpusEval {
  MetricResult muc;
  MetricResult b3;
  MetricResult ceaf;
  double avg_f1 = 0;
  double mention_recall = 0;  // recall of gold mentions by accepted spans
};

CorpusEval evaluate_corpus(CorefModel& model,
                           const std::vector<Document>& docs);

}  // namespace coref

#endif  // COREF_INFERENCE_H_
