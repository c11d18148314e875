#include "coref/trainer.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>

#include "coref/checkpoint.h"
#include "coref/inference.h"

namespace coref {

std::vector<std::vector<int>> gold_antecedent_sets(
    const std::vector<Span>& accepted,
    const std::vector<std::vector<int>>& candidates,
    const Clustering& gold_clusters) {
  std::map<Span, int> cluster_of;
  for (size_t c = 0; c < gold_clusters.size(); ++c) {
    for (const Span& m : gold_clusters[c]) {
      cluster_of[m] = static_cast<int>(c);
    }
  }
  std::vector<int> accepted_cluster(accepted.size(), -1);
  for (size_t i = 0; i < accepted.size(); ++i) {
    const auto it = cluster_of.find(accepted[i]);
    if (it != cluster_of.end()) accepted_cluster[i] = it->second;
  }
  std::vector<std::vector<int>> sets(accepted.size());
  for (size_t i = 0; i < accepted.size(); ++i) {
    if (accepted_cluster[i] < 0) continue;
    for (int j : candidates[i]) {
      if (accepted_cluster[j] == accepted_cluster[i]) sets[i].push_back(j);
    }
  }
  return sets;
}

ad::Node* marginal_nll(ad::Tape& tape, const ModelOutput& out,
                       const Clustering& gold_clusters) {
  const auto sets =
      gold_antecedent_sets(out.accepted, out.candidates, gold_clusters);
  ad::Node* dummy = tape.input(Tensor::scalar(0));
  std::vector<ad::Node*> contributions;
  contributions.reserve(out.accepted.size());
  for (size_t i = 0; i < out.accepted.size(); ++i) {
    std::vector<ad::Node*> all = {dummy};
    all.insert(all.end(), out.pair_scores[i].begin(),
               out.pair_scores[i].end());
    ad::Node* denom = tape.logsumexp(tape.concat(all));
    ad::Node* numer;
    if (sets[i].empty()) {
      numer = dummy;
    } else {
      std::vector<ad::Node*> gold_scores;
      gold_scores.reserve(sets[i].size());
      const auto& row = out.candidates[i];
      for (int j : sets[i]) {
        const auto it = std::lower_bound(row.begin(), row.end(), j);
        gold_scores.push_back(out.pair_scores[i][it - row.begin()]);
      }
      numer = gold_scores.size() == 1 ? gold_scores[0]
                                      : tape.logsumexp(tape.concat(gold_scores));
    }
    contributions.push_back(tape.add(denom, tape.affine(numer, -1, 0)));
  }
  if (contributions.empty()) return tape.input(Tensor::scalar(0));
  if (contributions.size() == 1) return contributions[0];
  return tape.sum(tape.concat(contributions));
}

void AdamState::initialize(const ad::ParameterRegistry& reg) {
  m.clear();
  v.clear();
  m.reserve(reg.size());
  v.reserve(reg.size());
  for (const auto& p : reg.items()) {
    m.push_back(Tensor::zeros(p->value.shape));
    v.push_back(Tensor::zeros(p->value.shape));
  }
  step = 0;
}

double effective_lr(const RunConfig& config, int64_t completed_steps) {
  return config.learning_rate *
         std::pow(config.decay_rate,
                  static_cast<double>(completed_steps / config.decay_steps));
}

bool adam_step(ad::ParameterRegistry& reg, AdamState* state,
               const RunConfig& config) {
  if (!state->initialized()) state->initialize(reg);
  for (const auto& p : reg.items()) {
    if (!p->grad.all_finite()) return false;
  }
  if (config.grad_clip > 0) {
    double norm_sq = 0;
    for (const auto& p : reg.items()) {
      for (real_t g : p->grad.data) norm_sq += double(g) * double(g);
    }
    const double norm = std::sqrt(norm_sq);
    if (norm > config.grad_clip) {
      const real_t scale = static_cast<real_t>(config.grad_clip / norm);
      for (const auto& p : reg.items()) {
        for (real_t& g : p->grad.data) g *= scale;
      }
    }
  }
  const double lr = effective_lr(config, state->step);
  const int64_t t = state->step + 1;
  const double bias1 = 1.0 - std::pow(config.adam_beta1, double(t));
  const double bias2 = 1.0 - std::pow(config.adam_beta2, double(t));
  for (size_t pi = 0; pi < reg.size(); ++pi) {
    ad::Parameter* p = reg.items()[pi].get();
    Tensor& m = state->m[pi];
    Tensor& v = state->v[pi];
    for (size_t k = 0; k < p->value.data.size(); ++k) {
      const double g = p->grad.data[k];
      m.data[k] = static_cast<real_t>(config.adam_beta1 * m.data[k] +
                                      (1.0 - config.adam_beta1) * g);
      v.data[k] = static_cast<real_t>(config.adam_beta2 * v.data[k] +
                                      (1.0 - config.adam_beta2) * g * g);
      const double m_hat = m.data[k] / bias1;
      const double v_hat = v.data[k] / bias2;
      p->value.data[k] -= static_cast<real_t>(
          lr * m_hat / (std::sqrt(v_hat) + config.adam_eps));
    }
  }
  state->step = t;
  return true;
}

TrainResult train(CorefModel& model, const std::vector<Document>& train_docs,
                  const std::vector<Document>& dev_docs, TrainState* state,
                  std::ostream& log) {
  if (train_docs.empty()) {
    throw std::invalid_argument("train: training set is empty");
  }
  const RunConfig& cfg = model.config();
  if (!state->adam.initialized()) state->adam.initialize(model.registry());

  TrainResult result;
  result.best_dev_f1 = state->best_dev_f1;
  std::vector<size_t> order(train_docs.size());

  const auto fmt = [&log]() -> std::ostream& {
    return log << std::setprecision(17);
  };

  for (int epoch = state->epoch; epoch < cfg.max_epochs; ++epoch) {
    // Restart from the identity so the permutation depends only on the rng
    // state; resuming from a checkpoint then replays the same epoch order.
    std::iota(order.begin(), order.end(), size_t{0});
    state->rng.shuffle(order.begin(), order.end());
    double epoch_loss = 0;
    int updates = 0;
    for (size_t idx : order) {
      Document doc =
          truncate_document(train_docs[idx], cfg.max_sentences, state->rng);
      ad::Tape tape;
      model.registry().zero_grads();
      ModelOutput out = model.forward(tape, doc, /*train=*/true, state->rng);
      ad::Node* loss = marginal_nll(tape, out, doc.gold_clusters);
      tape.backward(loss);
      if (!adam_step(model.registry(), &state->adam, cfg)) {
        fmt() << "step " << state->adam.step + 1
              << ": update skipped, non-finite gradient\n";
        continue;
      }
      epoch_loss += loss->value.at(0);
      ++updates;
      ++result.steps;
    }
    state->epoch = epoch + 1;
    result.final_loss = updates > 0 ? epoch_loss / updates : 0;
    fmt() << "epoch " << state->epoch << " step " << state->adam.step
          << " loss " << result.final_loss << " lr "
          << effective_lr(cfg, state->adam.step);

    const bool evaluate =
        state->epoch % cfg.eval_every == 0 && !dev_docs.empty();
    if (evaluate) {
      const CorpusEval eval = evaluate_corpus(model, dev_docs);
      fmt() << " dev_muc " << eval.muc.f1 << " dev_b3 " << eval.b3.f1
            << " dev_ceaf " << eval.ceaf.f1 << " dev_avg_f1 " << eval.avg_f1
            << " mention_recall " << eval.mention_recall;
      if (eval.avg_f1 > state->best_dev_f1) {
        state->best_dev_f1 = eval.avg_f1;
        state->best_epoch = state->epoch;
        if (!cfg.checkpoint_path.empty()) {
          save_checkpoint(cfg.checkpoint_path, model, state);
        }
        log << " best";
      }
      result.best_dev_f1 = state->best_dev_f1;
      if (cfg.target_f1 >= 0 && eval.avg_f1 >= cfg.target_f1) {
        result.reached_target = true;
        log << " target-reached\n";
        break;
      }
      const int evals_since_best =
          (state->epoch - state->best_epoch) / cfg.eval_every;
      if (evals_since_best >= cfg.patience) {
        log << " early-stop\n";
        break;
      }
    }
    log << "\n";
  }

  if (dev_docs.empty() && !cfg.checkpoint_path.empty()) {
    save_checkpoint(cfg.checkpoint_path, model, state);
  }
  result.epochs_run = state->epoch;
  result.best_dev_f1 = state->best_dev_f1;
  return result;
}

}  // namespace coref
