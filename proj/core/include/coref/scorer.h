#ifndef COREF_SCORER_H_
#define COREF_SCORER_H_

#include <string>

#include "coref/config.h"
#include "coref/encoder.h"
#include "coref/tape.h"

namespace coref {

// Unary mention scores, pairwise antecedent scores with metadata features,
// and the combined coreference score with a fixed zero dummy antecedent.
class Scorer {
 public:
  Scorer(const RunConfig& config, ad::ParameterRegistry& registry, Rng& rng);

  // Token or span-offset distance, bucketed as
  // [1, 2, 3, 4, 5-7, 8-15, 16-31, 32-63, 64+] -> 0..8.
  static int bucket_distance(int distance);

  // Index of a genre in the canonical table; unseen genres share row 0.
  static int genre_index(const std::string& genre);
  static constexpr int kNumGenres = 7;

  // s_m(i) = w_m . FFNN_m(g_i)
  ad::Node* mention_score(ad::Tape& tape, ad::Node* g, bool train,
                          Rng& rng) const;

  // phi(i,j) = [speaker match, genre, distance bucket] embeddings.
  ad::Node* pair_features(ad::Tape& tape, bool same_speaker, int genre_id,
                          int distance_bucket, bool train, Rng& rng) const;

  // s_a(i,j) = w_a . FFNN_a([g_i, g_j, g_i*g_j, phi(i,j)])
  ad::Node* antecedent_score(ad::Tape& tape, ad::Node* g_i, ad::Node* g_j,
                             ad::Node* features, bool train, Rng& rng) const;

  // s(i,j) = s_m(i) + s_m(j) + s_a(i,j); positions are indices in the
  // ordered accepted-span list and the antecedent must come first.
  ad::Node* coreference_score(ad::Tape& tape, int i_position, int j_position,
                              ad::Node* s_m_i, ad::Node* s_m_j,
                              ad::Node* s_a) const;

 private:
  RunConfig config_;
  Ffnn ffnn_m_;
  Ffnn ffnn_a_;
  ad::Parameter* w_m_;
  ad::Parameter* w_a_;
  ad::Parameter* speaker_emb_;   // rows: {different, same}
  ad::Parameter* genre_emb_;     // rows: canonical genres
  ad::Parameter* distance_emb_;  // rows: distance buckets 0..8
};

}  // namespace coref

#endif  // COREF_SCORER_H_
