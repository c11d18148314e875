#include "coref/rng.h"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace coref {

std::string Rng::serialize() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void Rng::deserialize(const std::string& state) {
  std::istringstream is(state);
  is >> engine_;
  if (is.fail()) throw std::invalid_argument("Rng: bad serialized state");
}

Tensor dropout_mask(const std::vector<int>& shape, double rate, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw std::invalid_argument("dropout_mask: rate must be in [0, 1)");
  }
  Tensor mask(shape);
  const real_t keep = static_cast<real_t>(1.0 / (1.0 - rate));
  for (auto& v : mask.data) {
    v = rng.uniform() < rate ? real_t(0) : keep;
  }
  return mask;
}

namespace {

// Modified Gram-Schmidt with one re-orthogonalization pass. `vecs` holds
// `count` rows of length `dim`, count <= dim.
void orthonormalize_rows(std::vector<std::vector<double>>& vecs, int dim) {
  const int count = static_cast<int>(vecs.size());
  for (int pass = 0; pass < 2; ++pass) {
    for (int i = 0; i < count; ++i) {
      for (int j = 0; j < i; ++j) {
        double dot = 0;
        for (int k = 0; k < dim; ++k) dot += vecs[i][k] * vecs[j][k];
        for (int k = 0; k < dim; ++k) vecs[i][k] -= dot * vecs[j][k];
      }
      double norm = 0;
      for (int k = 0; k < dim; ++k) norm += vecs[i][k] * vecs[i][k];
      norm = std::sqrt(norm);
      if (norm < 1e-12) {
        // Degenerate draw; replace with a basis vector and redo this row.
        std::fill(vecs[i].begin(), vecs[i].end(), 0.0);
        vecs[i][i % dim] = 1.0;
        --i;
        continue;
      }
      for (int k = 0; k < dim; ++k) vecs[i][k] /= norm;
    }
  }
}

}  // namespace

Tensor init_orthonormal(int rows, int cols, Rng& rng) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("init_orthonormal: rows, cols must be >= 1");
  }
  const int count = std::min(rows, cols);
  const int dim = std::max(rows, cols);
  std::vector<std::vector<double>> vecs(count, std::vector<double>(dim));
  for (auto& v : vecs) {
    for (auto& x : v) x = rng.gaussian();
  }
  orthonormalize_rows(vecs, dim);

  Tensor out({rows, cols});
  if (rows <= cols) {
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) out.at(i, j) = static_cast<real_t>(vecs[i][j]);
    }
  } else {
    for (int j = 0; j < cols; ++j) {
      for (int i = 0; i < rows; ++i) out.at(i, j) = static_cast<real_t>(vecs[j][i]);
    }
  }
  return out;
}

Tensor init_glorot(int rows, int cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / (rows + cols));
  Tensor out({rows, cols});
  for (auto& v : out.data) v = static_cast<real_t>(rng.uniform(-bound, bound));
  return out;
}

}  // namespace coref
