#include "coref/model.h"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace coref {

CorefModel::CorefModel(RunConfig config, CharVocab chars,
                       EmbeddingTable glove, EmbeddingTable turian,
                       uint64_t init_seed)
    : CorefModel(std::move(config), std::move(chars), std::move(glove),
                 std::move(turian), Rng(init_seed)) {}

CorefModel::CorefModel(RunConfig config, CharVocab chars,
                       EmbeddingTable glove, EmbeddingTable turian,
                       Rng init_rng)
    : config_(validated(std::move(config), glove, turian)),
      chars_(std::move(chars)),
      glove_(std::move(glove)),
      turian_(std::move(turian)),
      encoder_(config_, static_cast<int>(chars_.size()), registry_, init_rng),
      scorer_(config_, registry_, init_rng) {}

void CorefModel::set_config(const RunConfig& new_config) {
  validate_config(new_config);
  const bool same_architecture =
      new_config.glove_dim == config_.glove_dim &&
      new_config.turian_dim == config_.turian_dim &&
      new_config.char_dim == config_.char_dim &&
      new_config.conv_widths == config_.conv_widths &&
      new_config.conv_filters == config_.conv_filters &&
      new_config.lstm_dim == config_.lstm_dim &&
      new_config.ffnn_dim == config_.ffnn_dim &&
      new_config.ffnn_layers == config_.ffnn_layers &&
      new_config.feature_dim == config_.feature_dim &&
      new_config.max_span_width == config_.max_span_width;
  if (!same_architecture) {
    throw std::invalid_argument(
        "set_config: architecture fields cannot change after construction");
  }
  config_ = new_config;
}

RunConfig CorefModel::validated(RunConfig config, const EmbeddingTable& glove,
                                const EmbeddingTable& turian) {
  if (glove.dim() != config.glove_dim) {
    throw std::invalid_argument("model: glove dimension mismatch");
  }
  if (turian.dim() != config.turian_dim) {
    throw std::invalid_argument("model: turian dimension mismatch");
  }
  validate_config(config);
  return config;
}

ModelOutput CorefModel::forward(ad::Tape& tape, const Document& doc,
                                bool train, Rng& rng) {
  return run(tape, doc, train, rng, nullptr);
}

ModelOutput CorefModel::forward_with_spans(ad::Tape& tape,
                                           const Document& doc,
                                           const std::vector<Span>& accepted) {
  Rng unused(0);
  return run(tape, doc, /*train=*/false, unused, &accepted);
}

MentionScores CorefModel::score_all_spans(const Document& doc) {
  ad::Tape tape;
  Rng unused(0);
  EncodedDocument enc =
      encoder_.encode(tape, doc, chars_, glove_, turian_, /*train=*/false,
                      unused);
  MentionScores result;
  result.spans = enumerate_spans(doc, config_.max_span_width);
  result.scores.reserve(result.spans.size());
  for (const Span& span : result.spans) {
    Encoder::SpanInfo info =
        encoder_.span_representation(tape, enc, span, /*train=*/false, unused);
    result.scores.push_back(
        scorer_.mention_score(tape, info.g, /*train=*/false, unused)
            ->value.at(0));
  }
  return result;
}

ModelOutput CorefModel::run(ad::Tape& tape, const Document& doc, bool train,
                            Rng& rng, const std::vector<Span>* forced) {
  ModelOutput out;
  EncodedDocument enc =
      encoder_.encode(tape, doc, chars_, glove_, turian_, train, rng);
  out.spans = enumerate_spans(doc, config_.max_span_width);

  if (forced == nullptr && !config_.oracle_mentions) {
    std::vector<ad::Node*> all_g(out.spans.size());
    std::vector<ad::Node*> all_att(out.spans.size());
    std::vector<ad::Node*> all_sm(out.spans.size());
    out.all_mention_scores.resize(out.spans.size());
    for (size_t k = 0; k < out.spans.size(); ++k) {
      Encoder::SpanInfo info =
          encoder_.span_representation(tape, enc, out.spans[k], train, rng);
      all_g[k] = info.g;
      all_att[k] = info.attention;
      all_sm[k] = scorer_.mention_score(tape, info.g, train, rng);
      out.all_mention_scores[k] = all_sm[k]->value.at(0);
    }
    std::vector<int> kept = prune_spans(out.spans, out.all_mention_scores,
                                        config_.span_ratio, doc.num_tokens());
    for (int k : kept) {
      out.accepted.push_back(out.spans[k]);
      out.g.push_back(all_g[k]);
      out.attention.push_back(all_att[k]);
      out.mention_scores.push_back(all_sm[k]);
    }
  } else {
    std::vector<Span> accepted;
    if (forced != nullptr) {
      accepted = *forced;
    } else {
      for (const Cluster& cluster : doc.gold_clusters) {
        accepted.insert(accepted.end(), cluster.begin(), cluster.end());
      }
    }
    std::sort(accepted.begin(), accepted.end());
    accepted.erase(std::unique(accepted.begin(), accepted.end()),
                   accepted.end());
    for (const Span& span : accepted) {
      if (span.start < 0 || span.end >= doc.num_tokens() ||
          span.start > span.end) {
        throw std::invalid_argument("model: forced span out of range");
      }
    }
    // Spans wider than the span-width limit have no width feature row and
    // are dropped (they can come in through gold mentions).
    std::erase_if(accepted, [this](const Span& s) {
      return s.width() > config_.max_span_width;
    });
    for (const Span& span : accepted) {
      Encoder::SpanInfo info =
          encoder_.span_representation(tape, enc, span, train, rng);
      out.accepted.push_back(span);
      out.g.push_back(info.g);
      out.attention.push_back(info.attention);
      out.mention_scores.push_back(
          scorer_.mention_score(tape, info.g, train, rng));
    }
  }

  const int n = static_cast<int>(out.accepted.size());
  const int genre = Scorer::genre_index(doc.genre);
  out.candidates = candidate_antecedents(n, config_.max_antecedents);
  out.antecedent_scores.resize(n);
  out.pair_scores.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j : out.candidates[i]) {
      const bool same_speaker =
          doc.tokens[out.accepted[i].start].speaker ==
          doc.tokens[out.accepted[j].start].speaker;
      ad::Node* features = scorer_.pair_features(
          tape, same_speaker, genre, Scorer::bucket_distance(i - j), train,
          rng);
      ad::Node* s_a = scorer_.antecedent_score(tape, out.g[i], out.g[j],
                                               features, train, rng);
      out.antecedent_scores[i].push_back(s_a);
      out.pair_scores[i].push_back(scorer_.coreference_score(
          tape, i, j, out.mention_scores[i], out.mention_scores[j], s_a));
    }
  }
  return out;
}

}  // namespace coref
