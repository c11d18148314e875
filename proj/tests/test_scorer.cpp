#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "coref/model.h"
#include "coref/scorer.h"
#include "corpus_helpers.h"
#include "doctest.h"
#include "gradient_check.h"
#include "model_helpers.h"

namespace coref {
namespace {

Tensor random_vector(int n, Rng& rng) {
  Tensor t(std::vector<int>{n});
  for (auto& v : t.data) v = rng.gaussian();
  return t;
}

struct ScorerFixture {
  RunConfig cfg;
  ad::ParameterRegistry reg;
  std::unique_ptr<Scorer> scorer;
  Rng rng{42};

  explicit ScorerFixture(RunConfig config = small_config()) : cfg(config) {
    Rng init(99);
    scorer = std::make_unique<Scorer>(cfg, reg, init);
  }
};

CorefModel make_model(const std::vector<Document>& docs,
                      RunConfig cfg = small_config(), uint64_t seed = 7) {
  return CorefModel(cfg, CharVocab::build(docs),
                    make_table(cfg.glove_dim, 1), make_table(cfg.turian_dim, 2),
                    seed);
}

TEST_CASE("distance buckets match the published boundaries") {
  CHECK(Scorer::bucket_distance(1) == 0);
  CHECK(Scorer::bucket_distance(6) == 4);
  CHECK(Scorer::bucket_distance(64) == 8);
}

TEST_CASE("distance bucketing is total and monotone up to one million") {
  int prev = 0;
  for (int d = 1; d <= 1000000; ++d) {
    const int b = Scorer::bucket_distance(d);
    REQUIRE(b >= 0);
    REQUIRE(b <= 8);
    REQUIRE(b >= prev);
    prev = b;
  }
  CHECK(prev == 8);
  CHECK_THROWS_AS(Scorer::bucket_distance(0), std::invalid_argument);
  CHECK_THROWS_AS(Scorer::bucket_distance(-3), std::invalid_argument);
}

TEST_CASE("distance buckets hit every boundary") {
  CHECK(Scorer::bucket_distance(2) == 1);
  CHECK(Scorer::bucket_distance(3) == 2);
  CHECK(Scorer::bucket_distance(4) == 3);
  CHECK(Scorer::bucket_distance(5) == 4);
  CHECK(Scorer::bucket_distance(7) == 4);
  CHECK(Scorer::bucket_distance(8) == 5);
  CHECK(Scorer::bucket_distance(15) == 5);
  CHECK(Scorer::bucket_distance(16) == 6);
  CHECK(Scorer::bucket_distance(31) == 6);
  CHECK(Scorer::bucket_distance(32) == 7);
  CHECK(Scorer::bucket_distance(63) == 7);
  CHECK(Scorer::bucket_distance(100000) == 8);
}

TEST_CASE("genre table maps the canonical genres and defaults to row zero") {
  CHECK(Scorer::genre_index("bc") == 0);
  CHECK(Scorer::genre_index("bn") == 1);
  CHECK(Scorer::genre_index("mz") == 2);
  CHECK(Scorer::genre_index("nw") == 3);
  CHECK(Scorer::genre_index("pt") == 4);
  CHECK(Scorer::genre_index("tc") == 5);
  CHECK(Scorer::genre_index("wb") == 6);
  CHECK(Scorer::genre_index("unknown") == 0);
  CHECK(Scorer::genre_index("") == 0);
}

TEST_CASE("mention score is zero under zero weights and deterministic") {
  ScorerFixture fx;
  Rng data_rng(3);
  Tensor g = random_vector(fx.cfg.span_dim(), data_rng);

  ad::Tape tape;
  ad::Node* a =
      fx.scorer->mention_score(tape, tape.input(g), /*train=*/false, fx.rng);
  ad::Node* b =
      fx.scorer->mention_score(tape, tape.input(g), /*train=*/false, fx.rng);
  CHECK(a->value.at(0) == b->value.at(0));

  for (const auto& p : fx.reg.items()) p->value.fill(0);
  ad::Tape zero_tape;
  ad::Node* z = fx.scorer->mention_score(zero_tape, zero_tape.input(g),
                                         /*train=*/false, fx.rng);
  CHECK(z->value.at(0) == 0.0);
}

TEST_CASE("mention score gradient matches finite differences") {
  ScorerFixture fx;
  Rng data_rng(4);
  Tensor g = random_vector(fx.cfg.span_dim(), data_rng);
  auto eval = [&](bool with_grad) {
    ad::Tape tape;
    Rng r(1);
    ad::Node* s =
        fx.scorer->mention_score(tape, tape.input(g), /*train=*/false, r);
    if (with_grad) tape.backward(s);
    return s->value.at(0);
  };
  CHECK(max_gradient_error(fx.reg, eval) < 1e-4);
}

TEST_CASE("pair features concatenate three embeddings and validate inputs") {
  ScorerFixture fx;
  ad::Tape tape;
  ad::Node* f = fx.scorer->pair_features(tape, true, 3, 5, /*train=*/false,
                                         fx.rng);
  REQUIRE(f->value.size() == 3 * fx.cfg.feature_dim);
  const Tensor& speaker = fx.reg.require("speaker_embeddings")->value;
  const Tensor& genre = fx.reg.require("genre_embeddings")->value;
  const Tensor& dist = fx.reg.require("distance_embeddings")->value;
  for (int d = 0; d < fx.cfg.feature_dim; ++d) {
    CHECK(f->value.at(d) == speaker.at(1, d));
    CHECK(f->value.at(fx.cfg.feature_dim + d) == genre.at(3, d));
    CHECK(f->value.at(2 * fx.cfg.feature_dim + d) == dist.at(5, d));
  }
  CHECK_THROWS_AS(fx.scorer->pair_features(tape, false, 7, 0, false, fx.rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(fx.scorer->pair_features(tape, false, 0, 9, false, fx.rng),
                  std::invalid_argument);
}

TEST_CASE("antecedent input layout: zero g_i silences the product block") {
  RunConfig cfg = small_config();
  cfg.ffnn_layers = 1;
  ScorerFixture fx(cfg);
  const int sd = cfg.span_dim();

  // Zero the first-layer columns reading g_j and the features; what remains
  // of the input is [g_i, (g_i * g_j)], so with g_i = 0 the score must not
  // react to g_j at all, while nonzero g_i reintroduces it via the product.
  Tensor& w0 = fx.reg.require("antecedent_ffnn_w_0")->value;
  for (int r = 0; r < w0.rows(); ++r) {
    for (int c = sd; c < 2 * sd; ++c) w0.at(r, c) = 0;
    for (int c = 3 * sd; c < w0.cols(); ++c) w0.at(r, c) = 0;
  }

  Rng data_rng(5);
  Tensor zero_g = Tensor::zeros({sd});
  Tensor g1 = random_vector(sd, data_rng);
  Tensor g2 = random_vector(sd, data_rng);
  Tensor gi = random_vector(sd, data_rng);

  auto score = [&](const Tensor& a, const Tensor& b) {
    ad::Tape tape;
    Rng r(1);
    ad::Node* feats = fx.scorer->pair_features(tape, false, 0, 0, false, r);
    return fx.scorer
        ->antecedent_score(tape, tape.input(a), tape.input(b), feats, false, r)
        ->value.at(0);
  };
  CHECK(score(zero_g, g1) == doctest::Approx(score(zero_g, g2)).epsilon(1e-12));
  CHECK(score(gi, g1) != doctest::Approx(score(gi, g2)).epsilon(1e-9));
  // The layout is ordered, so the score is not symmetric in general.
  CHECK(score(g1, g2) != doctest::Approx(score(g2, g1)).epsilon(1e-9));
}

TEST_CASE("antecedent score gradient includes the feature embeddings") {
  ScorerFixture fx;
  Rng data_rng(6);
  Tensor g_i = random_vector(fx.cfg.span_dim(), data_rng);
  Tensor g_j = random_vector(fx.cfg.span_dim(), data_rng);
  auto eval = [&](bool with_grad) {
    ad::Tape tape;
    Rng r(1);
    ad::Node* feats =
        fx.scorer->pair_features(tape, true, 2, 4, /*train=*/false, r);
    ad::Node* s = fx.scorer->antecedent_score(tape, tape.input(g_i),
                                              tape.input(g_j), feats,
                                              /*train=*/false, r);
    if (with_grad) tape.backward(s);
    return s->value.at(0);
  };
  CHECK(max_gradient_error(fx.reg, eval) < 1e-4);
  // The touched feature rows must carry gradient signal.
  bool speaker_touched = false;
  const Tensor& sg = fx.reg.require("speaker_embeddings")->grad;
  for (int d = 0; d < fx.cfg.feature_dim; ++d) {
    if (sg.at(1, d) != 0.0) speaker_touched = true;
  }
  CHECK(speaker_touched);
}

TEST_CASE("combined score adds the three factors and checks ordering") {
  ScorerFixture fx;
  ad::Tape tape;
  ad::Node* smi = tape.input(Tensor::scalar(1.5));
  ad::Node* smj = tape.input(Tensor::scalar(-0.5));
  ad::Node* sa = tape.input(Tensor::scalar(2.0));
  ad::Node* s = fx.scorer->coreference_score(tape, 3, 1, smi, smj, sa);
  CHECK(s->value.at(0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(fx.scorer->coreference_score(tape, 1, 1, smi, smj, sa),
                  std::invalid_argument);
  CHECK_THROWS_AS(fx.scorer->coreference_score(tape, 1, 2, smi, smj, sa),
                  std::invalid_argument);
}

TEST_CASE("pairwise scores decompose into mention and antecedent parts") {
  Rng doc_rng(2024);
  Document doc = make_random_document(doc_rng, 0);
  CorefModel model = make_model({doc});
  ad::Tape tape;
  Rng rng(1);
  ModelOutput out = model.forward(tape, doc, /*train=*/false, rng);
  REQUIRE(!out.accepted.empty());
  int checked = 0;
  for (size_t i = 0; i < out.accepted.size(); ++i) {
    for (size_t c = 0; c < out.candidates[i].size(); ++c) {
      const int j = out.candidates[i][c];
      const double lhs = out.pair_scores[i][c]->value.at(0) -
                         out.antecedent_scores[i][c]->value.at(0);
      const double rhs = out.mention_scores[i]->value.at(0) +
                         out.mention_scores[j]->value.at(0);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("all-zero parameters give zero scores for every pair") {
  Rng doc_rng(7);
  Document doc = make_random_document(doc_rng, 1);
  CorefModel model = make_model({doc});
  for (const auto& p : model.registry().items()) p->value.fill(0);
  ad::Tape tape;
  Rng rng(1);
  ModelOutput out = model.forward(tape, doc, /*train=*/false, rng);
  for (const auto& row : out.pair_scores) {
    for (const ad::Node* s : row) CHECK(s->value.at(0) == 0.0);
  }
  for (real_t v : out.all_mention_scores) CHECK(v == 0.0);
}

TEST_CASE("scores depend on speaker equality, not on speaker names") {
  Document doc = make_doc({{"the", "cat"}, {"he", "saw"}, {"a", "dog"}},
                          {"alice", "bob", "alice"});
  Document renamed = doc;
  for (Token& tok : renamed.tokens) {
    tok.speaker = tok.speaker == "alice" ? "carol" : "dave";
  }
  CorefModel model = make_model({doc});
  ad::Tape tape_a;
  ad::Tape tape_b;
  Rng rng(1);
  ModelOutput a = model.forward(tape_a, doc, /*train=*/false, rng);
  ModelOutput b = model.forward(tape_b, renamed, /*train=*/false, rng);
  REQUIRE(a.accepted.size() == b.accepted.size());
  for (size_t i = 0; i < a.pair_scores.size(); ++i) {
    REQUIRE(a.pair_scores[i].size() == b.pair_scores[i].size());
    for (size_t c = 0; c < a.pair_scores[i].size(); ++c) {
      CHECK(a.pair_scores[i][c]->value.at(0) ==
            b.pair_scores[i][c]->value.at(0));
    }
  }
}

TEST_CASE("forward output is internally consistent") {
  Rng doc_rng(11);
  Document doc = make_random_document(doc_rng, 2);
  CorefModel model = make_model({doc});
  ad::Tape tape;
  Rng rng(1);
  ModelOutput out = model.forward(tape, doc, /*train=*/false, rng);

  CHECK(out.spans.size() == out.all_mention_scores.size());
  CHECK(std::is_sorted(out.accepted.begin(), out.accepted.end()));
  REQUIRE(out.accepted.size() == out.g.size());
  REQUIRE(out.accepted.size() == out.mention_scores.size());
  REQUIRE(out.accepted.size() == out.candidates.size());
  for (size_t i = 0; i < out.candidates.size(); ++i) {
    REQUIRE(out.candidates[i].size() == out.pair_scores[i].size());
    REQUIRE(out.candidates[i].size() == out.antecedent_scores[i].size());
    for (int j : out.candidates[i]) {
      CHECK(j >= 0);
      CHECK(j < static_cast<int>(i));  // the dummy is never in the list
    }
    CHECK(out.candidates[i].size() <=
          static_cast<size_t>(model.config().max_antecedents));
  }
  // Attention weights over each accepted span form a distribution.
  for (size_t i = 0; i < out.accepted.size(); ++i) {
    real_t total = 0;
    REQUIRE(out.attention[i]->value.size() == out.accepted[i].width());
    for (int d = 0; d < out.attention[i]->value.size(); ++d) {
      CHECK(out.attention[i]->value.at(d) >= 0.0);
      total += out.attention[i]->value.at(d);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("a forced span list is scored as given, sorted and deduplicated") {
  Document doc = make_doc({{"the", "cat", "sat", "on", "mat"}});
  CorefModel model = make_model({doc});
  ad::Tape tape;
  std::vector<Span> forced = {{3, 4}, {0, 1}, {0, 1}, {1, 2}};
  ModelOutput out = model.forward_with_spans(tape, doc, forced);
  REQUIRE(out.accepted.size() == 3);
  CHECK(out.accepted[0] == Span{0, 1});
  CHECK(out.accepted[1] == Span{1, 2});
  CHECK(out.accepted[2] == Span{3, 4});
  CHECK(out.all_mention_scores.empty());

  CHECK_THROWS_AS(model.forward_with_spans(tape, doc, {{0, 7}}),
                  std::invalid_argument);
}

TEST_CASE("oracle mode scores exactly the gold mentions") {
  Document doc = make_doc({{"the", "cat", "sat"}, {"he", "saw", "her"}});
  doc.gold_clusters = {{{0, 1}, {3, 3}}, {{2, 2}, {5, 5}}};
  RunConfig cfg = small_config();
  cfg.oracle_mentions = true;
  CorefModel model = make_model({doc}, cfg);
  ad::Tape tape;
  Rng rng(1);
  ModelOutput out = model.forward(tape, doc, /*train=*/false, rng);
  REQUIRE(out.accepted.size() == 4);
  CHECK(out.accepted[0] == Span{0, 1});
  CHECK(out.accepted[1] == Span{2, 2});
  CHECK(out.accepted[2] == Span{3, 3});
  CHECK(out.accepted[3] == Span{5, 5});
}

}  // namespace
}  // namespace coref
