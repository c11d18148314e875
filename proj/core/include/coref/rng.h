#ifndef COREF_RNG_H_
#define COREF_RNG_H_

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>

#include "coref/tensor.h"

namespace coref {

// Single seedable generator threaded explicitly through initialization,
// dropout and truncation. No global RNG state anywhere.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(seed) {}

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double gaussian() {
    return std::normal_distribution<double>(0.0, 1.0)(engine_);
  }
  // Uniform integer in [0, n).
  int64_t next_int(int64_t n) {
    return std::uniform_int_distribution<int64_t>(0, n - 1)(engine_);
  }

  template <typename It>
  void shuffle(It first, It last) {
    std::shuffle(first, last, engine_);
  }

  // State round-trips as text so checkpoints can resume mid-run.
  std::string serialize() const;
  void deserialize(const std::string& state);

 private:
  std::mt19937_64 engine_;
};

// Inverted-dropout mask: entries are 0 with probability `rate`, else
// 1/(1-rate), so the masked input keeps its expectation. Callers reuse one
// mask across all timesteps of a sequence. rate must be in [0, 1).
Tensor dropout_mask(const std::vector<int>& shape, double rate, Rng& rng);

// Random matrix with orthonormal rows (rows <= cols) or orthonormal
// columns (rows > cols), via Gram-Schmidt on a Gaussian sample.
Tensor init_orthonormal(int rows, int cols, Rng& rng);

// Glorot/fan-balanced uniform init for dense layers and embedding tables.
Tensor init_glorot(int rows, int cols, Rng& rng);

}  // namespace coref

#endif  // COREF_RNG_H_
