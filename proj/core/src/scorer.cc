#include "coref/scorer.h"

#include <array>
#include <stdexcept>

namespace coref {
namespace {

constexpr std::array<const char*, Scorer::kNumGenres> kGenres = {
    "bc", "bn", "mz", "nw", "pt", "tc", "wb"};

Tensor glorot_vector(int n, Rng& rng) {
  return Tensor({n}, init_glorot(1, n, rng).data);
}

}  // namespace

Scorer::Scorer(const RunConfig& config, ad::ParameterRegistry& registry,
               Rng& rng)
    : config_(config) {
  ffnn_m_ = Ffnn::create("mention_ffnn", config.span_dim(), config.ffnn_dim,
                         config.ffnn_layers, registry, rng);
  ffnn_a_ = Ffnn::create("antecedent_ffnn", config.pair_dim(), config.ffnn_dim,
                         config.ffnn_layers, registry, rng);
  w_m_ = registry.add("mention_projection", glorot_vector(config.ffnn_dim,
                                                          rng));
  w_a_ = registry.add("antecedent_projection",
                      glorot_vector(config.ffnn_dim, rng));
  speaker_emb_ = registry.add("speaker_embeddings",
                              init_glorot(2, config.feature_dim, rng));
  genre_emb_ = registry.add("genre_embeddings",
                            init_glorot(kNumGenres, config.feature_dim, rng));
  distance_emb_ = registry.add("distance_embeddings",
                               init_glorot(9, config.feature_dim, rng));
}

int Scorer::bucket_distance(int distance) {
  if (distance < 1) {
    throw std::invalid_argument("bucket_distance: distance must be >= 1");
  }
  if (distance <= 4) return distance - 1;
  if (distance <= 7) return 4;
  if (distance <= 15) return 5;
  if (distance <= 31) return 6;
  if (distance <= 63) return 7;
  return 8;
}

int Scorer::genre_index(const std::string& genre) {
  for (int i = 0; i < kNumGenres; ++i) {
    if (genre == kGenres[i]) return i;
  }
  return 0;
}

ad::Node* Scorer::mention_score(ad::Tape& tape, ad::Node* g, bool train,
                                Rng& rng) const {
  return tape.dot(tape.param(w_m_),
                  ffnn_m_.apply(tape, g, config_.hidden_dropout, train, rng));
}

ad::Node* Scorer::pair_features(ad::Tape& tape, bool same_speaker,
                                int genre_id, int distance_bucket, bool train,
                                Rng& rng) const {
  if (genre_id < 0 || genre_id >= kNumGenres) {
    throw std::invalid_argument("pair_features: genre id out of range");
  }
  if (distance_bucket < 0 || distance_bucket > 8) {
    throw std::invalid_argument("pair_features: distance bucket out of range");
  }
  ad::Node* features = tape.concat(
      {tape.flatten(tape.gather_rows(tape.param(speaker_emb_),
                                     {same_speaker ? 1 : 0})),
       tape.flatten(tape.gather_rows(tape.param(genre_emb_), {genre_id})),
       tape.flatten(
           tape.gather_rows(tape.param(distance_emb_), {distance_bucket}))});
  if (train && config_.hidden_dropout > 0) {
    features = tape.dropout(
        features,
        dropout_mask(features->value.shape, config_.hidden_dropout, rng));
  }
  return features;
}

ad::Node* Scorer::antecedent_score(ad::Tape& tape, ad::Node* g_i,
                                   ad::Node* g_j, ad::Node* features,
                                   bool train, Rng& rng) const {
  ad::Node* pair_input =
      tape.concat({g_i, g_j, tape.mul(g_i, g_j), features});
  return tape.dot(
      tape.param(w_a_),
      ffnn_a_.apply(tape, pair_input, config_.hidden_dropout, train, rng));
}

ad::Node* Scorer::coreference_score(ad::Tape& tape, int i_position,
                                    int j_position, ad::Node* s_m_i,
                                    ad::Node* s_m_j, ad::Node* s_a) const {
  if (j_position >= i_position) {
    throw std::invalid_argument(
        "coreference_score: antecedent must precede the span");
  }
  return tape.add(tape.add(s_m_i, s_m_j), s_a);
}

}  // namespace coref
