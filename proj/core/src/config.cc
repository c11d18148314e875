#include "coref/config.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace coref {

namespace {

using nlohmann::json;

json to_json_object(const RunConfig& c) {
  return json{
      {"train_path", c.train_path},
      {"dev_path", c.dev_path},
      {"test_path", c.test_path},
      {"glove_path", c.glove_path},
      {"turian_path", c.turian_path},
      {"checkpoint_path", c.checkpoint_path},
      {"ensemble_members", c.ensemble_members},
      {"glove_dim", c.glove_dim},
      {"turian_dim", c.turian_dim},
      {"lowercase_fallback", c.lowercase_fallback},
      {"char_dim", c.char_dim},
      {"conv_widths", c.conv_widths},
      {"conv_filters", c.conv_filters},
      {"lstm_dim", c.lstm_dim},
      {"ffnn_dim", c.ffnn_dim},
      {"ffnn_layers", c.ffnn_layers},
      {"feature_dim", c.feature_dim},
      {"max_span_width", c.max_span_width},
      {"span_ratio", c.span_ratio},
      {"max_antecedents", c.max_antecedents},
      {"lexical_dropout", c.lexical_dropout},
      {"hidden_dropout", c.hidden_dropout},
      {"learning_rate", c.learning_rate},
      {"decay_rate", c.decay_rate},
      {"decay_steps", c.decay_steps},
      {"adam_beta1", c.adam_beta1},
      {"adam_beta2", c.adam_beta2},
      {"adam_eps", c.adam_eps},
      {"grad_clip", c.grad_clip},
      {"max_epochs", c.max_epochs},
      {"max_sentences", c.max_sentences},
      {"eval_every", c.eval_every},
      {"patience", c.patience},
      {"target_f1", c.target_f1},
      {"seed", c.seed},
      {"oracle_mentions", c.oracle_mentions},
  };
}

void assign_field(RunConfig* c, const std::string& key, const json& v) {
  if (key == "train_path") {
    c->train_path = v.get<std::string>();
  } else if (key == "dev_path") {
    c->dev_path = v.get<std::string>();
  } else if (key == "test_path") {
    c->test_path = v.get<std::string>();
  } else if (key == "glove_path") {
    c->glove_path = v.get<std::string>();
  } else if (key == "turian_path") {
    c->turian_path = v.get<std::string>();
  } else if (key == "checkpoint_path") {
    c->checkpoint_path = v.get<std::string>();
  } else if (key == "ensemble_members") {
    c->ensemble_members = v.get<std::vector<std::string>>();
  } else if (key == "glove_dim") {
    c->glove_dim = v.get<int>();
  } else if (key == "turian_dim") {
    c->turian_dim = v.get<int>();
  } else if (key == "lowercase_fallback") {
    c->lowercase_fallback = v.get<bool>();
  } else if (key == "char_dim") {
    c->char_dim = v.get<int>();
  } else if (key == "conv_widths") {
    c->conv_widths = v.get<std::vector<int>>();
  } else if (key == "conv_filters") {
    c->conv_filters = v.get<int>();
  } else if (key == "lstm_dim") {
    c->lstm_dim = v.get<int>();
  } else if (key == "ffnn_dim") {
    c->ffnn_dim = v.get<int>();
  } else if (key == "ffnn_layers") {
    c->ffnn_layers = v.get<int>();
  } else if (key == "feature_dim") {
    c->feature_dim = v.get<int>();
  } else if (key == "max_span_width") {
    c->max_span_width = v.get<int>();
  } else if (key == "span_ratio") {
    c->span_ratio = v.get<double>();
  } else if (key == "max_antecedents") {
    c->max_antecedents = v.get<int>();
  } else if (key == "lexical_dropout") {
    c->lexical_dropout = v.get<double>();
  } else if (key == "hidden_dropout") {
    c->hidden_dropout = v.get<double>();
  } else if (key == "learning_rate") {
    c->learning_rate = v.get<double>();
  } else if (key == "decay_rate") {
    c->decay_rate = v.get<double>();
  } else if (key == "decay_steps") {
    c->decay_steps = v.get<int>();
  } else if (key == "adam_beta1") {
    c->adam_beta1 = v.get<double>();
  } else if (key == "adam_beta2") {
    c->adam_beta2 = v.get<double>();
  } else if (key == "adam_eps") {
    c->adam_eps = v.get<double>();
  } else if (key == "grad_clip") {
    c->grad_clip = v.get<double>();
  } else if (key == "max_epochs") {
    c->max_epochs = v.get<int>();
  } else if (key == "max_sentences") {
    c->max_sentences = v.get<int>();
  } else if (key == "eval_every") {
    c->eval_every = v.get<int>();
  } else if (key == "patience") {
    c->patience = v.get<int>();
  } else if (key == "target_f1") {
    c->target_f1 = v.get<double>();
  } else if (key == "seed") {
    c->seed = v.get<uint64_t>();
  } else if (key == "oracle_mentions") {
    c->oracle_mentions = v.get<bool>();
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

}  // namespace

void validate_config(const RunConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("config: ") + what);
  };
  require(c.max_span_width >= 1, "max_span_width must be >= 1");
  require(c.span_ratio > 0, "span_ratio must be positive");
  require(c.max_antecedents >= 1, "max_antecedents must be >= 1");
  require(c.lexical_dropout >= 0 && c.lexical_dropout < 1,
          "lexical_dropout must be in [0,1)");
  require(c.hidden_dropout >= 0 && c.hidden_dropout < 1,
          "hidden_dropout must be in [0,1)");
  require(c.max_epochs >= 1, "max_epochs must be >= 1");
  require(c.max_sentences >= 1, "max_sentences must be >= 1");
  require(c.lstm_dim >= 1 && c.ffnn_dim >= 1 && c.ffnn_layers >= 1 &&
              c.feature_dim >= 1 && c.char_dim >= 1 && c.conv_filters >= 1,
          "model dimensions must be >= 1");
  require(!c.conv_widths.empty(), "conv_widths must be nonempty");
  for (int w : c.conv_widths) require(w >= 1, "conv widths must be >= 1");
  require(c.glove_dim >= 0 && c.turian_dim >= 0,
          "embedding dimensions must be >= 0");
  require(c.glove_dim + c.turian_dim >= 1, "need at least one fixed embedding");
  require(c.learning_rate > 0, "learning_rate must be positive");
  require(c.decay_rate > 0 && c.decay_rate <= 1, "decay_rate must be in (0,1]");
  require(c.decay_steps >= 1, "decay_steps must be >= 1");
  require(c.eval_every >= 1, "eval_every must be >= 1");
  require(c.patience >= 1, "patience must be >= 1");
  require(c.grad_clip >= 0, "grad_clip must be >= 0");
}


std::string config_to_json(const RunConfig& config) {
  return to_json_object(config).dump(2);
}

RunConfig config_from_json(const std::string& json_text) {
  json parsed;
  try {
    parsed = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  if (!parsed.is_object()) {
    throw std::invalid_argument("config: top level must be a JSON object");
  }
  RunConfig config;
  for (const auto& [key, value] : parsed.items()) {
    assign_field(&config, key, value);
  }
  validate_config(config);
  return config;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

void apply_override(RunConfig* config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("override must look like key=value, got '" +
                                assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;  // unquoted strings (paths etc.)
  }
  assign_field(config, key, value);
  validate_config(*config);
}

std::string resolve_data_path(const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  const char* root = std::getenv("COREF_DATA_ROOT");
  if (!root || !*root) return path;
  std::string prefix(root);
  if (prefix.back() != '/') prefix += '/';
  return prefix + path;
}

}  // namespace coref
