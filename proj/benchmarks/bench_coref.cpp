#include <benchmark/benchmark.h>

#include <vector>

#include "coref/metrics.h"
#include "coref/pruner.h"
#include "coref/trainer.h"
#include "corpus_helpers.h"
#include "model_helpers.h"

namespace coref {
namespace {

// Full training step on one document: forward, loss, backward.
void BM_ForwardBackward(benchmark::State& state) {
  Rng rng(1);
  Document doc = make_random_document(rng, 0);
  RunConfig cfg = small_config();
  cfg.lstm_dim = 32;
  cfg.ffnn_dim = 32;
  CorefModel model(cfg, CharVocab::build({doc}),
                   make_table(cfg.glove_dim, 1), make_table(cfg.turian_dim, 2),
                   7);
  for (auto _ : state) {
    Rng step_rng(9);
    ad::Tape tape;
    model.registry().zero_grads();
    ModelOutput out = model.forward(tape, doc, /*train=*/true, step_rng);
    ad::Node* loss = marginal_nll(tape, out, doc.gold_clusters);
    tape.backward(loss);
    benchmark::DoNotOptimize(loss->value.at(0));
  }
}
BENCHMARK(BM_ForwardBackward);

// Greedy crossing-aware span selection over a dense candidate list.
void BM_PruneSpans(benchmark::State& state) {
  const int tokens = static_cast<int>(state.range(0));
  Document doc;
  doc.sentences = {{0, tokens - 1}};
  for (int t = 0; t < tokens; ++t) doc.tokens.push_back({"w", 0, "s", 0});
  const std::vector<Span> spans = enumerate_spans(doc, 10);
  Rng rng(2);
  std::vector<real_t> scores(spans.size());
  for (real_t& s : scores) s = static_cast<real_t>(rng.uniform(-2, 2));
  for (auto _ : state) {
    benchmark::DoNotOptimize(prune_spans(spans, scores, 0.4, tokens));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PruneSpans)->Arg(128)->Arg(512)->Arg(1024);

// Three clustering metrics on moderately sized random clusterings.
void BM_Metrics(benchmark::State& state) {
  Rng rng(3);
  std::vector<int> gold_pool(600), sys_pool(600);
  for (int i = 0; i < 600; ++i) gold_pool[i] = sys_pool[i] = i;
  rng.shuffle(gold_pool.begin(), gold_pool.end());
  rng.shuffle(sys_pool.begin(), sys_pool.end());
  Clustering gold, sys;
  for (int c = 0; c < 30; ++c) {
    Cluster g, s;
    for (int m = 0; m < 6; ++m) {
      const int gi = gold_pool[static_cast<size_t>(6 * c + m)];
      const int si = sys_pool[static_cast<size_t>(6 * c + m)];
      g.push_back({gi, gi});
      s.push_back({si, si});
    }
    gold.push_back(g);
    sys.push_back(s);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(muc(gold, sys).f1);
    benchmark::DoNotOptimize(b_cubed(gold, sys).f1);
    benchmark::DoNotOptimize(ceaf_phi4(gold, sys).f1);
  }
}
BENCHMARK(BM_Metrics);

}  // namespace
}  // namespace coref

BENCHMARK_MAIN();
