#ifndef COREF_TAPE_H_
#define COREF_TAPE_H_

#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "coref/registry.h"
#include "coref/tensor.h"

namespace coref {
namespace ad {

enum class Op {
  kInput,
  kParam,
  kAdd,
  kMul,
  kAffine,
  kMatVec,
  kMatVecT,
  kConcat,
  kFlatten,
  kGatherRows,
  kStackRows,
  kSigmoid,
  kTanh,
  kRelu,
  kSoftmax,
  kLogSumExp,
  kDot,
  kDropout,
  kMaxOverRows,
  kSum,
};

const char* op_name(Op op);

struct ShapeError : std::invalid_argument {
  explicit ShapeError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct Node {
  Op op;
  Tensor value;
  Tensor grad;  // allocated lazily during backward
  std::vector<Node*> inputs;
  std::vector<int> indices;    // gather rows / maxpool argmax
  Tensor aux;                  // dropout mask
  real_t scale = 1, shift = 0; // affine coefficients
  Parameter* param = nullptr;
  bool needs_grad = false;
  int id = -1;
};

// Define-by-run computation graph. One tape per document; nodes are
// appended in evaluation order, so reverse order is a valid topological
// order for backpropagation.
class Tape {
 public:
  Node* input(Tensor v);
  Node* param(Parameter* p);

  Node* add(Node* a, Node* b);
  Node* mul(Node* a, Node* b);
  Node* affine(Node* x, real_t scale, real_t shift);
  Node* matvec(Node* m, Node* v);    // (r,c)x(c) -> (r)
  Node* matvec_t(Node* m, Node* v);  // (r,c)^T x(r) -> (c)
  Node* concat(const std::vector<Node*>& parts);
  Node* flatten(Node* m);
  // Row -1 yields a zero row and receives no gradient (padding).
  Node* gather_rows(Node* m, std::vector<int> rows);
  Node* stack_rows(const std::vector<Node*>& rows);
  Node* sigmoid(Node* x);
  Node* tanh(Node* x);
  Node* relu(Node* x);
  Node* softmax(Node* v);
  Node* logsumexp(Node* v);
  Node* dot(Node* a, Node* b);
  Node* dropout(Node* x, Tensor mask);
  Node* max_over_rows(Node* m);
  Node* sum(Node* v);

  // Accumulates d(loss)/d(p) into p->grad for every parameter reachable
  // from `loss`. Rejects non-scalar losses. Node gradients stay readable
  // on the tape afterwards (used by analyses and tests).
  void backward(Node* loss);

  size_t size() const { return nodes_.size(); }
  void clear();

 private:
  Node* emplace(Op op, Tensor value, std::vector<Node*> inputs);
  static Tensor& grad_of(Node* n);

  std::deque<Node> nodes_;
  std::unordered_map<Parameter*, Node*> param_nodes_;
};

}  // namespace ad
}  // namespace coref

#endif  // COREF_TAPE_H_
