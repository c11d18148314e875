#ifndef COREF_MODEL_H_
#define COREF_MODEL_H_

#include <cstdint>
#include <vector>

#include "coref/config.h"
#include "coref/document.h"
#include "coref/embeddings.h"
#include "coref/encoder.h"
#include "coref/pruner.h"
#include "coref/scorer.h"
#include "coref/tape.h"
#include "coref/vocab.h"

namespace coref {

// One scored document. All nodes live on the tape passed to forward();
// per-pair containers are indexed [accepted position][candidate position].
struct ModelOutput {
  std::vector<Span> spans;                 // every enumerated span, in order
  std::vector<real_t> all_mention_scores;  // aligned with `spans`
  std::vector<Span> accepted;              // surviving spans, in span order
  std::vector<ad::Node*> g;                // per accepted span
  std::vector<ad::Node*> attention;        // head weights per accepted span
  std::vector<ad::Node*> mention_scores;   // s_m per accepted span
  std::vector<std::vector<int>> candidates;  // antecedent indices (accepted)
  std::vector<std::vector<ad::Node*>> antecedent_scores;  // s_a(i,j)
  std::vector<std::vector<ad::Node*>> pair_scores;        // s(i,j)
};

// Unary mention scores for every enumerated span of a document.
struct MentionScores {
  std::vector<Span> spans;
  std::vector<real_t> scores;
};

// Full pipeline: encode, enumerate, prune (or accept a forced span list),
// and score every span/antecedent pair.
class CorefModel {
 public:
  CorefModel(RunConfig config, CharVocab chars, EmbeddingTable glove,
             EmbeddingTable turian, uint64_t init_seed);

  ModelOutput forward(ad::Tape& tape, const Document& doc, bool train,
                      Rng& rng);

  // Scores a caller-supplied accepted-span list (deduplicated and sorted
  // here); used when combining models that must share one span list.
  ModelOutput forward_with_spans(ad::Tape& tape, const Document& doc,
                                 const std::vector<Span>& accepted);

  // Evaluation-mode unary scores for every enumerated span.
  MentionScores score_all_spans(const Document& doc);

  ad::ParameterRegistry& registry() { return registry_; }
  const ad::ParameterRegistry& registry() const { return registry_; }
  const RunConfig& config() const { return config_; }

  // Replaces schedule and path settings (epochs, rates, paths, pruning
  // knobs...) after a checkpoint load. Fields that determine parameter
  // shapes must be unchanged; mismatches are rejected.
  void set_config(const RunConfig& new_config);
  const CharVocab& char_vocab() const { return chars_; }
  const EmbeddingTable& glove() const { return glove_; }
  const EmbeddingTable& turian() const { return turian_; }

 private:
  CorefModel(RunConfig config, CharVocab chars, EmbeddingTable glove,
             EmbeddingTable turian, Rng init_rng);
  static RunConfig validated(RunConfig config, const EmbeddingTable& glove,
                             const EmbeddingTable& turian);
  ModelOutput run(ad::Tape& tape, const Document& doc, bool train, Rng& rng,
                  const std::vector<Span>* forced);

  RunConfig config_;
  CharVocab chars_;
  EmbeddingTable glove_;
  EmbeddingTable turian_;
  ad::ParameterRegistry registry_;
  Encoder encoder_;
  Scorer scorer_;
};

}  // namespace coref

#endif  // COREF_MODEL_H_
