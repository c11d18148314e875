#include "coref/tape.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace coref {

std::string shape_to_string(const std::vector<int>& shape) {
  std::string s = "(";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

namespace ad {

const char* op_name(Op op) {
  switch (op) {
    case Op::kInput: return "input";
    case Op::kParam: return "param";
    case Op::kAdd: return "add";
    case Op::kMul: return "mul";
    case Op::kAffine: return "affine";
    case Op::kMatVec: return "matvec";
    case Op::kMatVecT: return "matvec_t";
    case Op::kConcat: return "concat";
    case Op::kFlatten: return "flatten";
    case Op::kGatherRows: return "gather_rows";
    case Op::kStackRows: return "stack_rows";
    case Op::kSigmoid: return "sigmoid";
    case Op::kTanh: return "tanh";
    case Op::kRelu: return "relu";
    case Op::kSoftmax: return "softmax";
    case Op::kLogSumExp: return "logsumexp";
    case Op::kDot: return "dot";
    case Op::kDropout: return "dropout";
    case Op::kMaxOverRows: return "max_over_rows";
    case Op::kSum: return "sum";
  }
  return "?";
}

namespace {

[[noreturn]] void shape_fail(Op op, const std::vector<const Tensor*>& ts) {
  std::ostringstream os;
  os << "shape mismatch in " << op_name(op) << ":";
  for (const Tensor* t : ts) os << " " << shape_to_string(t->shape);
  throw ShapeError(os.str());
}

void require_vector(Op op, const Tensor& t) {
  if (t.rank() != 1) shape_fail(op, {&t});
}

void require_matrix(Op op, const Tensor& t) {
  if (t.rank() != 2) shape_fail(op, {&t});
}

}  // namespace

Node* Tape::emplace(Op op, Tensor value, std::vector<Node*> inputs) {
  nodes_.emplace_back();
  Node& n = nodes_.back();
  n.op = op;
  n.value = std::move(value);
  n.inputs = std::move(inputs);
  n.id = static_cast<int>(nodes_.size()) - 1;
  for (Node* in : n.inputs) {
    if (in->needs_grad) n.needs_grad = true;
  }
  if (!n.value.all_finite()) {
    throw std::runtime_error(std::string("non-finite value out of ") +
                             op_name(op));
  }
  return &n;
}

void Tape::clear() {
  nodes_.clear();
  param_nodes_.clear();
}

Node* Tape::input(Tensor v) { return emplace(Op::kInput, std::move(v), {}); }

Node* Tape::param(Parameter* p) {
  auto it = param_nodes_.find(p);
  if (it != param_nodes_.end()) return it->second;
  Node* n = emplace(Op::kParam, p->value, {});
  n->param = p;
  n->needs_grad = true;
  param_nodes_[p] = n;
  return n;
}

Node* Tape::add(Node* a, Node* b) {
  if (!a->value.same_shape(b->value)) shape_fail(Op::kAdd, {&a->value, &b->value});
  Tensor out = a->value;
  for (int64_t i = 0; i < out.size(); ++i) out.data[i] += b->value.data[i];
  return emplace(Op::kAdd, std::move(out), {a, b});
}

Node* Tape::mul(Node* a, Node* b) {
  if (!a->value.same_shape(b->value)) shape_fail(Op::kMul, {&a->value, &b->value});
  Tensor out = a->value;
  for (int64_t i = 0; i < out.size(); ++i) out.data[i] *= b->value.data[i];
  return emplace(Op::kMul, std::move(out), {a, b});
}

Node* Tape::affine(Node* x, real_t scale, real_t shift) {
  Tensor out = x->value;
  for (auto& v : out.data) v = scale * v + shift;
  Node* n = emplace(Op::kAffine, std::move(out), {x});
  n->scale = scale;
  n->shift = shift;
  return n;
}

Node* Tape::matvec(Node* m, Node* v) {
  require_matrix(Op::kMatVec, m->value);
  require_vector(Op::kMatVec, v->value);
  if (m->value.cols() != v->value.rows()) {
    shape_fail(Op::kMatVec, {&m->value, &v->value});
  }
  const int r = m->value.rows(), c = m->value.cols();
  Tensor out({r});
  const real_t* md = m->value.data.data();
  const real_t* vd = v->value.data.data();
  for (int i = 0; i < r; ++i) {
    real_t acc = 0;
    const real_t* row = md + static_cast<size_t>(i) * c;
    for (int j = 0; j < c; ++j) acc += row[j] * vd[j];
    out.at(i) = acc;
  }
  return emplace(Op::kMatVec, std::move(out), {m, v});
}

Node* Tape::matvec_t(Node* m, Node* v) {
  require_matrix(Op::kMatVecT, m->value);
  require_vector(Op::kMatVecT, v->value);
  if (m->value.rows() != v->value.rows()) {
    shape_fail(Op::kMatVecT, {&m->value, &v->value});
  }
  const int r = m->value.rows(), c = m->value.cols();
  Tensor out({c});
  for (int i = 0; i < r; ++i) {
    const real_t vi = v->value.at(i);
    if (vi == real_t(0)) continue;
    for (int j = 0; j < c; ++j) out.at(j) += vi * m->value.at(i, j);
  }
  return emplace(Op::kMatVecT, std::move(out), {m, v});
}

Node* Tape::concat(const std::vector<Node*>& parts) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  int total = 0;
  for (Node* p : parts) {
    require_vector(Op::kConcat, p->value);
    total += static_cast<int>(p->value.size());
  }
  Tensor out({total});
  int offset = 0;
  for (Node* p : parts) {
    std::copy(p->value.data.begin(), p->value.data.end(),
              out.data.begin() + offset);
    offset += static_cast<int>(p->value.size());
  }
  return emplace(Op::kConcat, std::move(out), parts);
}

Node* Tape::flatten(Node* m) {
  require_matrix(Op::kFlatten, m->value);
  Tensor out({static_cast<int>(m->value.size())}, m->value.data);
  return emplace(Op::kFlatten, std::move(out), {m});
}

Node* Tape::gather_rows(Node* m, std::vector<int> rows) {
  require_matrix(Op::kGatherRows, m->value);
  const int c = m->value.cols();
  Tensor out({static_cast<int>(rows.size()), c});
  for (size_t k = 0; k < rows.size(); ++k) {
    int r = rows[k];
    if (r >= m->value.rows()) shape_fail(Op::kGatherRows, {&m->value});
    if (r < 0) continue;  // zero padding row
    for (int j = 0; j < c; ++j) out.at(static_cast<int>(k), j) = m->value.at(r, j);
  }
  Node* n = emplace(Op::kGatherRows, std::move(out), {m});
  n->indices = std::move(rows);
  return n;
}

Node* Tape::stack_rows(const std::vector<Node*>& rows) {
  if (rows.empty()) throw ShapeError("stack_rows: no inputs");
  const int c = static_cast<int>(rows[0]->value.size());
  for (Node* r : rows) {
    require_vector(Op::kStackRows, r->value);
    if (static_cast<int>(r->value.size()) != c) {
      shape_fail(Op::kStackRows, {&rows[0]->value, &r->value});
    }
  }
  Tensor out({static_cast<int>(rows.size()), c});
  for (size_t k = 0; k < rows.size(); ++k) {
    std::copy(rows[k]->value.data.begin(), rows[k]->value.data.end(),
              out.data.begin() + static_cast<int64_t>(k) * c);
  }
  return emplace(Op::kStackRows, std::move(out), rows);
}

Node* Tape::sigmoid(Node* x) {
  Tensor out = x->value;
  for (auto& v : out.data) {
    // Split on sign to avoid exp overflow.
    v = v >= 0 ? real_t(1) / (real_t(1) + std::exp(-v))
               : std::exp(v) / (real_t(1) + std::exp(v));
  }
  return emplace(Op::kSigmoid, std::move(out), {x});
}

Node* Tape::tanh(Node* x) {
  Tensor out = x->value;
  for (auto& v : out.data) v = std::tanh(v);
  return emplace(Op::kTanh, std::move(out), {x});
}

Node* Tape::relu(Node* x) {
  Tensor out = x->value;
  for (auto& v : out.data) v = v > 0 ? v : real_t(0);
  return emplace(Op::kRelu, std::move(out), {x});
}

Node* Tape::softmax(Node* v) {
  require_vector(Op::kSoftmax, v->value);
  if (v->value.size() == 0) shape_fail(Op::kSoftmax, {&v->value});
  Tensor out = v->value;
  real_t mx = *std::max_element(out.data.begin(), out.data.end());
  real_t z = 0;
  for (auto& x : out.data) {
    x = std::exp(x - mx);
    z += x;
  }
  for (auto& x : out.data) x /= z;
  return emplace(Op::kSoftmax, std::move(out), {v});
}

Node* Tape::logsumexp(Node* v) {
  require_vector(Op::kLogSumExp, v->value);
  if (v->value.size() == 0) shape_fail(Op::kLogSumExp, {&v->value});
  real_t mx = *std::max_element(v->value.data.begin(), v->value.data.end());
  real_t z = 0;
  for (real_t x : v->value.data) z += std::exp(x - mx);
  return emplace(Op::kLogSumExp, Tensor::scalar(mx + std::log(z)), {v});
}

Node* Tape::dot(Node* a, Node* b) {
  require_vector(Op::kDot, a->value);
  if (!a->value.same_shape(b->value)) shape_fail(Op::kDot, {&a->value, &b->value});
  real_t acc = 0;
  for (int64_t i = 0; i < a->value.size(); ++i) {
    acc += a->value.data[i] * b->value.data[i];
  }
  return emplace(Op::kDot, Tensor::scalar(acc), {a, b});
}

Node* Tape::dropout(Node* x, Tensor mask) {
  if (!x->value.same_shape(mask)) shape_fail(Op::kDropout, {&x->value, &mask});
  Tensor out = x->value;
  for (int64_t i = 0; i < out.size(); ++i) out.data[i] *= mask.data[i];
  Node* n = emplace(Op::kDropout, std::move(out), {x});
  n->aux = std::move(mask);
  return n;
}

Node* Tape::max_over_rows(Node* m) {
  require_matrix(Op::kMaxOverRows, m->value);
  const int r = m->value.rows(), c = m->value.cols();
  if (r == 0) shape_fail(Op::kMaxOverRows, {&m->value});
  Tensor out({c});
  std::vector<int> argmax(c, 0);
  for (int j = 0; j < c; ++j) out.at(j) = m->value.at(0, j);
  for (int i = 1; i < r; ++i) {
    for (int j = 0; j < c; ++j) {
      if (m->value.at(i, j) > out.at(j)) {
        out.at(j) = m->value.at(i, j);
        argmax[j] = i;
      }
    }
  }
  Node* n = emplace(Op::kMaxOverRows, std::move(out), {m});
  n->indices = std::move(argmax);
  return n;
}

Node* Tape::sum(Node* v) {
  require_vector(Op::kSum, v->value);
  real_t acc = 0;
  for (real_t x : v->value.data) acc += x;
  return emplace(Op::kSum, Tensor::scalar(acc), {v});
}

Tensor& Tape::grad_of(Node* n) {
  if (n->grad.data.empty()) n->grad = Tensor(n->value.shape);
  return n->grad;
}

void Tape::backward(Node* loss) {
  if (!loss->value.is_scalar()) {
    throw std::invalid_argument("backward: loss must be scalar, got shape " +
                                shape_to_string(loss->value.shape));
  }
  grad_of(loss).data[0] = 1;

  for (int i = loss->id; i >= 0; --i) {
    Node& n = nodes_[static_cast<size_t>(i)];
    if (n.grad.data.empty() || !n.needs_grad) continue;
    const Tensor& g = n.grad;
    switch (n.op) {
      case Op::kInput:
        break;
      case Op::kParam:
        for (int64_t k = 0; k < g.size(); ++k) n.param->grad.data[k] += g.data[k];
        break;
      case Op::kAdd: {
        for (Node* in : n.inputs) {
          if (!in->needs_grad) continue;
          Tensor& gi = grad_of(in);
          for (int64_t k = 0; k < g.size(); ++k) gi.data[k] += g.data[k];
        }
        break;
      }
      case Op::kMul: {
        Node *a = n.inputs[0], *b = n.inputs[1];
        if (a->needs_grad) {
          Tensor& ga = grad_of(a);
          for (int64_t k = 0; k < g.size(); ++k) ga.data[k] += g.data[k] * b->value.data[k];
        }
        if (b->needs_grad) {
          Tensor& gb = grad_of(b);
          for (int64_t k = 0; k < g.size(); ++k) gb.data[k] += g.data[k] * a->value.data[k];
        }
        break;
      }
      case Op::kAffine: {
        Node* x = n.inputs[0];
        if (x->needs_grad) {
          Tensor& gx = grad_of(x);
          for (int64_t k = 0; k < g.size(); ++k) gx.data[k] += n.scale * g.data[k];
        }
        break;
      }
      case Op::kMatVec: {
        Node *m = n.inputs[0], *v = n.inputs[1];
        const int r = m->value.rows(), c = m->value.cols();
        if (m->needs_grad) {
          Tensor& gm = grad_of(m);
          for (int a = 0; a < r; ++a) {
            const real_t ga = g.at(a);
            if (ga == real_t(0)) continue;
            real_t* row = gm.data.data() + static_cast<size_t>(a) * c;
            const real_t* vd = v->value.data.data();
            for (int j = 0; j < c; ++j) row[j] += ga * vd[j];
          }
        }
        if (v->needs_grad) {
          Tensor& gv = grad_of(v);
          for (int a = 0; a < r; ++a) {
            const real_t ga = g.at(a);
            if (ga == real_t(0)) continue;
            const real_t* row = m->value.data.data() + static_cast<size_t>(a) * c;
            for (int j = 0; j < c; ++j) gv.data[j] += ga * row[j];
          }
        }
        break;
      }
      case Op::kMatVecT: {
        Node *m = n.inputs[0], *v = n.inputs[1];
        const int r = m->value.rows(), c = m->value.cols();
        if (m->needs_grad) {
          Tensor& gm = grad_of(m);
          for (int a = 0; a < r; ++a) {
            const real_t va = v->value.at(a);
            if (va == real_t(0)) continue;
            real_t* row = gm.data.data() + static_cast<size_t>(a) * c;
            for (int j = 0; j < c; ++j) row[j] += va * g.at(j);
          }
        }
        if (v->needs_grad) {
          Tensor& gv = grad_of(v);
          for (int a = 0; a < r; ++a) {
            const real_t* row = m->value.data.data() + static_cast<size_t>(a) * c;
            real_t acc = 0;
            for (int j = 0; j < c; ++j) acc += row[j] * g.at(j);
            gv.data[a] += acc;
          }
        }
        break;
      }
      case Op::kConcat: {
        int offset = 0;
        for (Node* in : n.inputs) {
          const int sz = static_cast<int>(in->value.size());
          if (in->needs_grad) {
            Tensor& gi = grad_of(in);
            for (int k = 0; k < sz; ++k) gi.data[k] += g.data[offset + k];
          }
          offset += sz;
        }
        break;
      }
      case Op::kFlatten: {
        Node* m = n.inputs[0];
        if (m->needs_grad) {
          Tensor& gm = grad_of(m);
          for (int64_t k = 0; k < g.size(); ++k) gm.data[k] += g.data[k];
        }
        break;
      }
      case Op::kGatherRows: {
        Node* m = n.inputs[0];
        if (m->needs_grad) {
          Tensor& gm = grad_of(m);
          const int c = m->value.cols();
          for (size_t k = 0; k < n.indices.size(); ++k) {
            const int r = n.indices[k];
            if (r < 0) continue;
            for (int j = 0; j < c; ++j) {
              gm.at(r, j) += g.at(static_cast<int>(k), j);
            }
          }
        }
        break;
      }
      case Op::kStackRows: {
        const int c = n.value.cols();
        for (size_t k = 0; k < n.inputs.size(); ++k) {
          Node* in = n.inputs[k];
          if (!in->needs_grad) continue;
          Tensor& gi = grad_of(in);
          for (int j = 0; j < c; ++j) gi.data[j] += g.at(static_cast<int>(k), j);
        }
        break;
      }
      case Op::kSigmoid: {
        Node* x = n.inputs[0];
        if (x->needs_grad) {
          Tensor& gx = grad_of(x);
          for (int64_t k = 0; k < g.size(); ++k) {
            const real_t y = n.value.data[k];
            gx.data[k] += g.data[k] * y * (real_t(1) - y);
          }
        }
        break;
      }
      case Op::kTanh: {
        Node* x = n.inputs[0];
        if (x->needs_grad) {
          Tensor& gx = grad_of(x);
          for (int64_t k = 0; k < g.size(); ++k) {
            const real_t y = n.value.data[k];
            gx.data[k] += g.data[k] * (real_t(1) - y * y);
          }
        }
        break;
      }
      case Op::kRelu: {
        Node* x = n.inputs[0];
        if (x->needs_grad) {
          Tensor& gx = grad_of(x);
          for (int64_t k = 0; k < g.size(); ++k) {
            if (x->value.data[k] > 0) gx.data[k] += g.data[k];
          }
        }
        break;
      }
      case Op::kSoftmax: {
        Node* x = n.inputs[0];
        if (x->needs_grad) {
          Tensor& gx = grad_of(x);
          real_t gy = 0;
          for (int64_t k = 0; k < g.size(); ++k) gy += g.data[k] * n.value.data[k];
          for (int64_t k = 0; k < g.size(); ++k) {
            gx.data[k] += n.value.data[k] * (g.data[k] - gy);
          }
        }
        break;
      }
      case Op::kLogSumExp: {
        Node* x = n.inputs[0];
        if (x->needs_grad) {
          Tensor& gx = grad_of(x);
          const real_t g0 = g.data[0];
          const real_t lse = n.value.data[0];
          for (int64_t k = 0; k < x->value.size(); ++k) {
            gx.data[k] += g0 * std::exp(x->value.data[k] - lse);
          }
        }
        break;
      }
      case Op::kDot: {
        Node *a = n.inputs[0], *b = n.inputs[1];
        const real_t g0 = g.data[0];
        if (a->needs_grad) {
          Tensor& ga = grad_of(a);
          for (int64_t k = 0; k < a->value.size(); ++k) ga.data[k] += g0 * b->value.data[k];
        }
        if (b->needs_grad) {
          Tensor& gb = grad_of(b);
          for (int64_t k = 0; k < b->value.size(); ++k) gb.data[k] += g0 * a->value.data[k];
        }
        break;
      }
      case Op::kDropout: {
        Node* x = n.inputs[0];
        if (x->needs_grad) {
          Tensor& gx = grad_of(x);
          for (int64_t k = 0; k < g.size(); ++k) gx.data[k] += g.data[k] * n.aux.data[k];
        }
        break;
      }
      case Op::kMaxOverRows: {
        Node* m = n.inputs[0];
        if (m->needs_grad) {
          Tensor& gm = grad_of(m);
          const int c = static_cast<int>(n.value.size());
          for (int j = 0; j < c; ++j) gm.at(n.indices[j], j) += g.at(j);
        }
        break;
      }
      case Op::kSum: {
        Node* x = n.inputs[0];
        if (x->needs_grad) {
          Tensor& gx = grad_of(x);
          const real_t g0 = g.data[0];
          for (int64_t k = 0; k < gx.size(); ++k) gx.data[k] += g0;
        }
        break;
      }
    }
  }
}

}  // namespace ad
}  // namespace coref
