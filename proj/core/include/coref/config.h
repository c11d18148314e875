#ifndef COREF_CONFIG_H_
#define COREF_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

namespace coref {

// Full run configuration: data paths plus every hyperparameter, with
// defaults matching the reference setting. Serialized as JSON both in
// config files and inside checkpoints.
struct RunConfig {
  // Data paths.
  std::string train_path;
  std::string dev_path;
  std::string test_path;
  std::string glove_path;
  std::string turian_path;
  std::string checkpoint_path = "model.ckpt";
  std::vector<std::string> ensemble_members;

  // Word representation.
  int glove_dim = 300;
  int turian_dim = 50;
  bool lowercase_fallback = true;
  int char_dim = 8;
  std::vector<int> conv_widths = {3, 4, 5};
  int conv_filters = 50;

  // Context encoding and scoring.
  int lstm_dim = 200;
  int ffnn_dim = 150;
  int ffnn_layers = 2;
  int feature_dim = 20;

  // Span pruning.
  int max_span_width = 10;     // L
  double span_ratio = 0.4;     // lambda
  int max_antecedents = 250;   // K

  // Regularization.
  double lexical_dropout = 0.5;
  double hidden_dropout = 0.2;

  // Optimization.
  double learning_rate = 0.001;
  double decay_rate = 0.999;   // multiplied in every decay_steps steps
  int decay_steps = 100;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double grad_clip = 0.0;      // 0 disables clipping
  int max_epochs = 150;
  int max_sentences = 50;      // per-document truncation
  int eval_every = 1;          // epochs between dev evaluations
  int patience = 10;           // evaluations without improvement
  double target_f1 = -1.0;     // stop early at this dev F1 when >= 0
  uint64_t seed = 0;

  // Analysis toggles.
  bool oracle_mentions = false;  // accept exactly the gold mentions

  int word_dim() const {
    return glove_dim + turian_dim +
           conv_filters * static_cast<int>(conv_widths.size());
  }
  int span_dim() const { return 4 * lstm_dim + word_dim() + feature_dim; }
  int pair_dim() const { return 3 * span_dim() + 3 * feature_dim; }
};

// Rejects out-of-range settings with a message naming the bad field.
void validate_config(const RunConfig& config);

// JSON (de)serialization. Parsing rejects unknown keys (typo guard) and
// out-of-range values.
std::string config_to_json(const RunConfig& config);
RunConfig config_from_json(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

// Applies `key=value` overrides (same keys as the JSON file) on top of a
// loaded config; used for command-line flag overrides, which win.
void apply_override(RunConfig* config, const std::string& assignment);

// Prefixes relative data paths with $COREF_DATA_ROOT when set.
std::string resolve_data_path(const std::string& path);

}  // namespace coref

#endif  // COREF_CONFIG_H_
