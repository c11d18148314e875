#ifndef COREF_CLI_H_
#define COREF_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "coref/config.h"

namespace coref {

// Command bodies behind the command-line tool, separated from flag parsing
// so they can be driven directly in tests. Each returns a process exit
// code: 0 on success, 1 on any error. Results go to `out`, diagnostics and
// error reports to `err`.

// Trains a model from config paths (train/dev corpora, embedding tables),
// writing the best-dev checkpoint to config.checkpoint_path and the
// training log to `out`.
int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err);

// Predicts coreference for every document in `input_path` using the given
// checkpoints (duplicates collapse to one member; one member uses the
// single-model path, several the two-stage ensemble). Writes CoNLL to
// `output_path` and a line-oriented JSON sidecar to `output_path` +
// ".jsonl" carrying doc_key, clusters as index pairs, and (optionally)
// per-mention attention records. `overrides` are key=value assignments
// applied on top of each checkpoint's stored configuration; without any,
// prediction runs with the training-time hyperparameters.
int cmd_predict(const std::vector<std::string>& member_paths,
                const std::string& input_path, const std::string& output_path,
                const std::vector<std::string>& overrides,
                bool include_attention, std::ostream& out, std::ostream& err);

// Scores a system CoNLL file against a gold one: per-document and
// micro-aggregated P/R/F1 blocks for the three metrics plus their average.
// Documents are aligned by doc_key; an empty system file scores zero
// everywhere, while a partial or misaligned one is an error listing the
// offending keys.
int cmd_evaluate(const std::string& gold_path, const std::string& system_path,
                 std::ostream& out, std::ostream& err);

// Model analysis on a corpus: pruning recall over a span-ratio sweep,
// constituency precision by span width (when the input carries parses),
// and the head-attention report for every predicted mention.
int cmd_analyze(const std::string& model_path, const std::string& input_path,
                const std::vector<double>& lambda_sweep,
                const std::vector<std::string>& overrides, std::ostream& out,
                std::ostream& err);

}  // namespace coref

#endif  // COREF_CLI_H_
