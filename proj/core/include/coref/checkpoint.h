#ifndef COREF_CHECKPOINT_H_
#define COREF_CHECKPOINT_H_

#include <memory>
#include <optional>
#include <string>

#include "coref/model.h"
#include "coref/trainer.h"

namespace coref {

// Binary container, little-endian throughout:
//   magic "CRCK" | u32 version | config JSON | character vocabulary |
//   both embedding tables | named parameter tensors |
//   optional training state (optimizer moments, counters, RNG stream).
// Everything needed to re-embed inputs rides along, so a checkpoint loads
// without the original embedding files. A version mismatch is an error.
inline constexpr uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const CorefModel& model,
                     const TrainState* state = nullptr);

struct LoadedCheckpoint {
  std::unique_ptr<CorefModel> model;
  std::optional<TrainState> state;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace coref

#endif  // COREF_CHECKPOINT_H_
