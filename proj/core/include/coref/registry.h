#ifndef COREF_REGISTRY_H_
#define COREF_REGISTRY_H_

#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "coref/tensor.h"

namespace coref {
namespace ad {

// A named trainable tensor. `grad` persists across tapes and is zeroed by
// the optimizer between steps.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter(std::string n, Tensor v)
      : name(std::move(n)), value(std::move(v)), grad(value.shape) {}
};

// Owns every trainable tensor of a model. Iteration order is insertion
// order, so checkpointing and gradient checks are deterministic.
class ParameterRegistry {
 public:
  Parameter* add(const std::string& name, Tensor value) {
    if (index_.count(name)) {
      throw std::invalid_argument("ParameterRegistry: duplicate name " + name);
    }
    items_.push_back(std::make_unique<Parameter>(name, std::move(value)));
    index_[name] = items_.back().get();
    return items_.back().get();
  }

  Parameter* find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : it->second;
  }

  Parameter* require(const std::string& name) const {
    Parameter* p = find(name);
    if (!p) throw std::out_of_range("ParameterRegistry: no parameter " + name);
    return p;
  }

  const std::vector<std::unique_ptr<Parameter>>& items() const {
    return items_;
  }
  size_t size() const { return items_.size(); }

  void zero_grads() {
    for (auto& p : items_) p->grad.fill(0);
  }

  int64_t total_values() const {
    int64_t n = 0;
    for (const auto& p : items_) n += p->value.size();
    return n;
  }

 private:
  std::vector<std::unique_ptr<Parameter>> items_;
  std::unordered_map<std::string, Parameter*> index_;
};

}  // namespace ad
}  // namespace coref

#endif  // COREF_REGISTRY_H_
