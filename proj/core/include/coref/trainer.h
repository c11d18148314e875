#ifndef COREF_TRAINER_H_
#define COREF_TRAINER_H_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "coref/model.h"

namespace coref {

// For each accepted span: the accepted-list indices of its candidates that
// share a gold cluster with it. An empty list means the dummy antecedent
// is the only correct choice (first mention, pruned antecedents, or a span
// that is not a gold mention).
std::vector<std::vector<int>> gold_antecedent_sets(
    const std::vector<Span>& accepted,
    const std::vector<std::vector<int>>& candidates,
    const Clustering& gold_clusters);

// Negative marginal log-likelihood of all correct antecedents, built on the
// output's tape. The dummy scores exactly 0 and its log-sum-exp terms are
// numerically stabilized, so the loss is finite and >= 0.
ad::Node* marginal_nll(ad::Tape& tape, const ModelOutput& out,
                       const Clustering& gold_clusters);

// First/second-moment buffers aligned with the registry's parameter order.
struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  int64_t step = 0;  // completed updates

  void initialize(const ad::ParameterRegistry& reg);
  bool initialized() const { return !m.empty(); }
};

// Learning rate after `completed_steps` updates: the base rate decayed by
// the configured factor once per decay interval (staircase schedule).
double effective_lr(const RunConfig& config, int64_t completed_steps);

// One optimizer update from the gradients accumulated in `reg`. Returns
// false without touching parameters or state when any gradient is
// non-finite (the caller logs the skip). Optional global-norm clipping.
bool adam_step(ad::ParameterRegistry& reg, AdamState* state,
               const RunConfig& config);

// Everything that must survive a training interruption for the run to
// resume deterministically.
struct TrainState {
  AdamState adam;
  int epoch = 0;  // completed epochs
  int best_epoch = 0;
  double best_dev_f1 = -1;
  Rng rng{0};
};

struct TrainResult {
  int epochs_run = 0;
  int64_t steps = 0;
  double best_dev_f1 = -1;
  double final_loss = 0;  // mean training loss of the last epoch
  bool reached_target = false;
};

// Full schedule: per epoch, shuffle and truncate the training documents and
// take one update per document; evaluate on the dev set every `eval_every`
// epochs, keep the best average-F1 checkpoint at config.checkpoint_path
// (when nonempty), and stop early after `patience` evaluations without
// improvement or once `target_f1` is reached. Resumes from `state`.
TrainResult train(CorefModel& model, const std::vector<Document>& train_docs,
                  const std::vector<Document>& dev_docs, TrainState* state,
                  std::ostream& log);

}  // namespace coref

#endif  // COREF_TRAINER_H_
