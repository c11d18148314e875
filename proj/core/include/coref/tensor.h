#ifndef COREF_TENSOR_H_
#define COREF_TENSOR_H_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace coref {

#ifdef COREF_SINGLE_PRECISION
using real_t = float;
#else
using real_t = double;
#endif

// Dense row-major tensor. Rank is 1 (vector) or 2 (matrix) everywhere in
// this codebase; scalars are rank-1 tensors of size 1.
struct Tensor {
  std::vector<int> shape;
  std::vector<real_t> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    data.assign(static_cast<size_t>(size_from_shape(shape)), real_t(0));
  }
  Tensor(std::vector<int> s, std::vector<real_t> d)
      : shape(std::move(s)), data(std::move(d)) {
    if (static_cast<int64_t>(data.size()) != size_from_shape(shape)) {
      throw std::invalid_argument("Tensor: data size does not match shape");
    }
  }

  static int64_t size_from_shape(const std::vector<int>& s) {
    int64_t n = 1;
    for (int d : s) {
      if (d < 0) throw std::invalid_argument("Tensor: negative dimension");
      n *= d;
    }
    return n;
  }

  static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }
  static Tensor full(std::vector<int> s, real_t v) {
    Tensor t(std::move(s));
    t.data.assign(t.data.size(), v);
    return t;
  }
  static Tensor scalar(real_t v) { return Tensor({1}, {v}); }
  static Tensor vector(std::vector<real_t> d) {
    int n = static_cast<int>(d.size());
    return Tensor({n}, std::move(d));
  }

  int64_t size() const { return static_cast<int64_t>(data.size()); }
  int rank() const { return static_cast<int>(shape.size()); }
  bool is_scalar() const { return size() == 1; }
  int rows() const { return shape.at(0); }
  int cols() const { return shape.at(1); }

  real_t& at(int i) { return data[static_cast<size_t>(i)]; }
  real_t at(int i) const { return data[static_cast<size_t>(i)]; }
  real_t& at(int r, int c) {
    return data[static_cast<size_t>(r) * cols() + c];
  }
  real_t at(int r, int c) const {
    return data[static_cast<size_t>(r) * cols() + c];
  }

  void fill(real_t v) { data.assign(data.size(), v); }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  bool all_finite() const {
    for (real_t v : data) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }
};

std::string shape_to_string(const std::vector<int>& shape);

}  // namespace coref

#endif  // COREF_TENSOR_H_
