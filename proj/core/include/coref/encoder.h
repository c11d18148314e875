#ifndef COREF_ENCODER_H_
#define COREF_ENCODER_H_

#include <string>
#include <utility>
#include <vector>

#include "coref/config.h"
#include "coref/document.h"
#include "coref/embeddings.h"
#include "coref/tape.h"
#include "coref/vocab.h"

namespace coref {

// Feed-forward stack: `layers` hidden layers of `hidden_dim` rectifited
// units. Callers dot the final hidden vector with their own projection.
struct Ffnn {
  std::vector<ad::Parameter*> weights;
  std::vector<ad::Parameter*> biases;

  static Ffnn create(const std::string& name, int input_dim, int hidden_dim,
                     int layers, ad::ParameterRegistry& registry, Rng& rng);
  ad::Node* apply(ad::Tape& tape, ad::Node* x, double dropout_rate,
                  bool train, Rng& rng) const;
};

// Per-document encoding: every node lives on the caller's tape.
struct EncodedDocument {
  std::vector<ad::Node*> word_vecs;    // x_t (lexically dropped when training)
  std::vector<ad::Node*> ctx_vecs;     // x*_t = [forward h_t, backward h_t]
  std::vector<ad::Node*> head_scores;  // alpha_t, one scalar per token
};

// Word representation (fixed embeddings + character CNN), per-sentence
// bidirectional recurrence, and attention-weighted span representations.
class Encoder {
 public:
  Encoder(const RunConfig& config, int char_vocab_size,
          ad::ParameterRegistry& registry, Rng& rng);

  // Max-pooled multi-window character convolution; 150 dims by default.
  ad::Node* char_cnn(ad::Tape& tape, const std::vector<int>& char_ids) const;

  // Runs both directions over one sentence and concatenates their states.
  std::vector<ad::Node*> encode_sentence(ad::Tape& tape,
                                         const std::vector<ad::Node*>& xs,
                                         bool train, Rng& rng) const;

  EncodedDocument encode(ad::Tape& tape, const Document& doc,
                         const CharVocab& chars, const EmbeddingTable& glove,
                         const EmbeddingTable& turian, bool train,
                         Rng& rng) const;

  // (x_hat, normalized weights) for one span: weights are the softmax of
  // the head scores over the span, applied to the raw word vectors.
  std::pair<ad::Node*, ad::Node*> head_attention(ad::Tape& tape,
                                                 const EncodedDocument& enc,
                                                 const Span& span) const;

  struct SpanInfo {
    ad::Node* g;          // [x*_start, x*_end, x_hat, width feature]
    ad::Node* attention;  // weights over the span's tokens
  };
  SpanInfo span_representation(ad::Tape& tape, const EncodedDocument& enc,
                               const Span& span, bool train, Rng& rng) const;

 private:
  struct LstmDirection {
    ad::Parameter* w_f;
    ad::Parameter* b_f;
    ad::Parameter* w_o;
    ad::Parameter* b_o;
    ad::Parameter* w_c;
    ad::Parameter* b_c;
  };

  LstmDirection make_direction(const std::string& name,
                               ad::ParameterRegistry& registry, Rng& rng);
  std::vector<ad::Node*> run_lstm(ad::Tape& tape,
                                  const std::vector<ad::Node*>& xs,
                                  const LstmDirection& dir, bool reverse,
                                  bool train, Rng& rng) const;

  RunConfig config_;
  ad::Parameter* char_emb_;
  std::vector<ad::Parameter*> conv_weights_;
  std::vector<ad::Parameter*> conv_biases_;
  LstmDirection forward_;
  LstmDirection backward_;
  Ffnn ffnn_alpha_;
  ad::Parameter* w_alpha_;
  ad::Parameter* width_emb_;
};

}  // namespace coref

#endif  // COREF_ENCODER_H_
