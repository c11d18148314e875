#include "coref/encoder.h"

#include <algorithm>
#include <stdexcept>

namespace coref {

Ffnn Ffnn::create(const std::string& name, int input_dim, int hidden_dim,
                  int layers, ad::ParameterRegistry& registry, Rng& rng) {
  if (layers < 1) throw std::invalid_argument("ffnn: layers must be >= 1");
  Ffnn net;
  int in = input_dim;
  for (int i = 0; i < layers; ++i) {
    const std::string suffix = "_" + std::to_string(i);
    net.weights.push_back(registry.add(
        name + "_w" + suffix, init_glorot(hidden_dim, in, rng)));
    net.biases.push_back(
        registry.add(name + "_b" + suffix, Tensor::zeros({hidden_dim})));
    in = hidden_dim;
  }
  return net;
}

ad::Node* Ffnn::apply(ad::Tape& tape, ad::Node* x, double dropout_rate,
                      bool train, Rng& rng) const {
  ad::Node* h = x;
  for (size_t i = 0; i < weights.size(); ++i) {
    ad::Node* pre = tape.add(tape.matvec(tape.param(weights[i]), h),
                             tape.param(biases[i]));
    h = tape.relu(pre);
    if (train && dropout_rate > 0) {
      h = tape.dropout(h, dropout_mask(h->value.shape, dropout_rate, rng));
    }
  }
  return h;
}

Encoder::Encoder(const RunConfig& config, int char_vocab_size,
                 ad::ParameterRegistry& registry, Rng& rng)
    : config_(config) {
  char_emb_ = registry.add(
      "char_embeddings", init_glorot(char_vocab_size, config.char_dim, rng));
  for (int width : config.conv_widths) {
    const std::string suffix = "_w" + std::to_string(width);
    conv_weights_.push_back(registry.add(
        "char_conv" + suffix,
        init_glorot(config.conv_filters, width * config.char_dim, rng)));
    conv_biases_.push_back(registry.add("char_conv_bias" + suffix,
                                        Tensor::zeros({config.conv_filters})));
  }
  forward_ = make_direction("lstm_fwd", registry, rng);
  backward_ = make_direction("lstm_bwd", registry, rng);
  ffnn_alpha_ = Ffnn::create("head_ffnn", 2 * config.lstm_dim,
                             config.ffnn_dim, config.ffnn_layers, registry,
                             rng);
  w_alpha_ = registry.add(
      "head_projection",
      Tensor({config.ffnn_dim}, init_glorot(1, config.ffnn_dim, rng).data));
  width_emb_ = registry.add(
      "width_embeddings",
      init_glorot(config.max_span_width, config.feature_dim, rng));
}

Encoder::LstmDirection Encoder::make_direction(const std::string& name,
                                               ad::ParameterRegistry& registry,
                                               Rng& rng) {
  const int rows = config_.lstm_dim;
  const int cols = config_.word_dim() + config_.lstm_dim;
  LstmDirection dir;
  dir.w_f = registry.add(name + "_w_f", init_orthonormal(rows, cols, rng));
  dir.b_f = registry.add(name + "_b_f", Tensor::zeros({rows}));
  dir.w_o = registry.add(name + "_w_o", init_orthonormal(rows, cols, rng));
  dir.b_o = registry.add(name + "_b_o", Tensor::zeros({rows}));
  dir.w_c = registry.add(name + "_w_c", init_orthonormal(rows, cols, rng));
  dir.b_c = registry.add(name + "_b_c", Tensor::zeros({rows}));
  return dir;
}

ad::Node* Encoder::char_cnn(ad::Tape& tape,
                            const std::vector<int>& char_ids) const {
  if (char_ids.empty()) {
    throw std::invalid_argument("char_cnn: token has no characters");
  }
  ad::Node* table = tape.param(char_emb_);
  std::vector<ad::Node*> pooled;
  for (size_t w = 0; w < config_.conv_widths.size(); ++w) {
    const int width = config_.conv_widths[w];
    // Pad short tokens with the zero row (-1) so every token yields at
    // least one window position.
    std::vector<int> padded = char_ids;
    while (static_cast<int>(padded.size()) < width) padded.push_back(-1);
    const int positions = static_cast<int>(padded.size()) - width + 1;
    ad::Node* weight = tape.param(conv_weights_[w]);
    ad::Node* bias = tape.param(conv_biases_[w]);
    std::vector<ad::Node*> activations;
    activations.reserve(positions);
    for (int p = 0; p < positions; ++p) {
      std::vector<int> window(padded.begin() + p, padded.begin() + p + width);
      ad::Node* chars = tape.flatten(tape.gather_rows(table, window));
      activations.push_back(
          tape.relu(tape.add(tape.matvec(weight, chars), bias)));
    }
    pooled.push_back(tape.max_over_rows(tape.stack_rows(activations)));
  }
  return pooled.size() == 1 ? pooled[0] : tape.concat(pooled);
}

std::vector<ad::Node*> Encoder::run_lstm(ad::Tape& tape,
                                         const std::vector<ad::Node*>& xs,
                                         const LstmDirection& dir,
                                         bool reverse, bool train,
                                         Rng& rng) const {
  const int n = static_cast<int>(xs.size());
  std::vector<ad::Node*> out(n, nullptr);
  ad::Node* w_f = tape.param(dir.w_f);
  ad::Node* b_f = tape.param(dir.b_f);
  ad::Node* w_o = tape.param(dir.w_o);
  ad::Node* b_o = tape.param(dir.b_o);
  ad::Node* w_c = tape.param(dir.w_c);
  ad::Node* b_c = tape.param(dir.b_c);
  ad::Node* h = tape.input(Tensor::zeros({config_.lstm_dim}));
  ad::Node* c = tape.input(Tensor::zeros({config_.lstm_dim}));
  // One recurrent-state mask per direction per sentence, shared across
  // timesteps.
  Tensor mask;
  if (train && config_.hidden_dropout > 0) {
    mask = dropout_mask({config_.lstm_dim}, config_.hidden_dropout, rng);
  }
  for (int step = 0; step < n; ++step) {
    const int t = reverse ? n - 1 - step : step;
    ad::Node* h_prev = h;
    if (train && config_.hidden_dropout > 0) {
      h_prev = tape.dropout(h_prev, mask);
    }
    ad::Node* hx = tape.concat({xs[t], h_prev});
    ad::Node* f = tape.sigmoid(tape.add(tape.matvec(w_f, hx), b_f));
    ad::Node* o = tape.sigmoid(tape.add(tape.matvec(w_o, hx), b_o));
    ad::Node* c_tilde = tape.tanh(tape.add(tape.matvec(w_c, hx), b_c));
    // Coupled update: the forget gate also drives the input side.
    c = tape.add(tape.mul(f, c_tilde),
                 tape.mul(tape.affine(f, -1.0, 1.0), c));
    h = tape.mul(o, tape.tanh(c));
    out[t] = h;
  }
  return out;
}

std::vector<ad::Node*> Encoder::encode_sentence(
    ad::Tape& tape, const std::vector<ad::Node*>& xs, bool train,
    Rng& rng) const {
  std::vector<ad::Node*> fwd = run_lstm(tape, xs, forward_, false, train, rng);
  std::vector<ad::Node*> bwd = run_lstm(tape, xs, backward_, true, train, rng);
  std::vector<ad::Node*> ctx(xs.size());
  for (size_t t = 0; t < xs.size(); ++t) {
    ctx[t] = tape.concat({fwd[t], bwd[t]});
  }
  return ctx;
}

EncodedDocument Encoder::encode(ad::Tape& tape, const Document& doc,
                                const CharVocab& chars,
                                const EmbeddingTable& glove,
                                const EmbeddingTable& turian, bool train,
                                Rng& rng) const {
  EncodedDocument enc;
  enc.word_vecs.resize(doc.tokens.size(), nullptr);
  enc.ctx_vecs.resize(doc.tokens.size(), nullptr);
  enc.head_scores.resize(doc.tokens.size(), nullptr);
  for (const auto& [first, last] : doc.sentences) {
    // One lexical mask per sentence, shared across its timesteps; the
    // dropped word vector feeds both the recurrence and head attention.
    Tensor mask;
    if (train && config_.lexical_dropout > 0) {
      mask = dropout_mask({config_.word_dim()}, config_.lexical_dropout, rng);
    }
    std::vector<ad::Node*> xs;
    xs.reserve(last - first + 1);
    for (int t = first; t <= last; ++t) {
      const std::string& word = doc.tokens[t].text;
      ad::Node* x =
          tape.concat({tape.input(Tensor::vector(glove.lookup(word))),
                       tape.input(Tensor::vector(turian.lookup(word))),
                       char_cnn(tape, chars.encode(word))});
      if (train && config_.lexical_dropout > 0) {
        x = tape.dropout(x, mask);
      }
      enc.word_vecs[t] = x;
      xs.push_back(x);
    }
    std::vector<ad::Node*> ctx = encode_sentence(tape, xs, train, rng);
    for (int t = first; t <= last; ++t) {
      enc.ctx_vecs[t] = ctx[t - first];
      enc.head_scores[t] = tape.dot(
          tape.param(w_alpha_),
          ffnn_alpha_.apply(tape, ctx[t - first], config_.hidden_dropout,
                            train, rng));
    }
  }
  return enc;
}

std::pair<ad::Node*, ad::Node*> Encoder::head_attention(
    ad::Tape& tape, const EncodedDocument& enc, const Span& span) const {
  if (span.start < 0 || span.end >= static_cast<int>(enc.word_vecs.size()) ||
      span.start > span.end) {
    throw std::invalid_argument("head_attention: span out of range");
  }
  std::vector<ad::Node*> scores;
  std::vector<ad::Node*> words;
  for (int t = span.start; t <= span.end; ++t) {
    scores.push_back(enc.head_scores[t]);
    words.push_back(enc.word_vecs[t]);
  }
  ad::Node* weights = tape.softmax(tape.concat(scores));
  ad::Node* x_hat = tape.matvec_t(tape.stack_rows(words), weights);
  return {x_hat, weights};
}

Encoder::SpanInfo Encoder::span_representation(ad::Tape& tape,
                                               const EncodedDocument& enc,
                                               const Span& span, bool train,
                                               Rng& rng) const {
  if (span.width() > config_.max_span_width) {
    throw std::invalid_argument("span_representation: span wider than limit");
  }
  auto [x_hat, weights] = head_attention(tape, enc, span);
  ad::Node* width_feature = tape.flatten(
      tape.gather_rows(tape.param(width_emb_), {span.width() - 1}));
  if (train && config_.hidden_dropout > 0) {
    width_feature = tape.dropout(
        width_feature,
        dropout_mask(width_feature->value.shape, config_.hidden_dropout, rng));
  }
  SpanInfo info;
  info.g = tape.concat({enc.ctx_vecs[span.start], enc.ctx_vecs[span.end],
                        x_hat, width_feature});
  info.attention = weights;
  return info;
}

}  // namespace coref
