#include "depthcap/numerics/tape.hpp"

#include "depthcap/errors.hpp"

namespace depthcap::num {

const Matrix& Var::value() const {
  if (tape == nullptr) throw ArgumentError("Var: not attached to a tape");
  return tape->value(*this);
}

void Tape::check(Var v) const {
  if (v.tape != this || v.id >= nodes_.size()) throw ArgumentError("Var does not belong to this tape");
}

Var Tape::constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

Var Tape::parameter(Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return {this, it->second};
  Node n;
  n.value = p.value;
  n.param = &p;
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  param_nodes_.emplace(&p, nodes_.size() - 1);
  return {this, nodes_.size() - 1};
}

Var Tape::record(std::vector<Var> inputs, ForwardFn forward, BackwardFn backward) {
  Node n;
  std::vector<const Matrix*> in;
  in.reserve(inputs.size());
  for (Var v : inputs) {
    check(v);
    n.inputs.push_back(v.id);
    n.requires_grad = n.requires_grad || nodes_[v.id].requires_grad;
    in.push_back(&nodes_[v.id].value);
  }
  n.value = forward(in);
  n.forward = std::move(forward);
  n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

const Matrix& Tape::value(Var v) const {
  check(v);
  return nodes_[v.id].value;
}

Matrix Tape::grad(Var v) const {
  check(v);
  const Node& n = nodes_[v.id];
  if (!n.has_grad) return Matrix(n.value.rows(), n.value.cols());
  return n.grad;
}

bool Tape::requires_grad(Var v) const {
  check(v);
  return nodes_[v.id].requires_grad;
}

void Tape::backward(Var loss) {
  check(loss);
  if (nodes_[loss.id].value.rows() != 1 || nodes_[loss.id].value.cols() != 1) {
    throw ShapeError("backward: loss must be 1x1, got " + nodes_[loss.id].value.shape_string());
  }
  for (Node& n : nodes_) {
    n.has_grad = false;
    n.grad = Matrix();
  }
  Node& root = nodes_[loss.id];
  root.grad = Matrix(1, 1, 1.0);
  root.has_grad = true;

  std::vector<const Matrix*> in;
  std::vector<Matrix*> gin;
  for (std::size_t id = loss.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.has_grad || !n.requires_grad) continue;
    if (n.param != nullptr) {
      Matrix& pg = n.param->grad;
      if (pg.rows() != n.grad.rows() || pg.cols() != n.grad.cols()) {
        pg = Matrix(n.grad.rows(), n.grad.cols());
      }
      for (std::size_t i = 0; i < pg.size(); ++i) pg.data()[i] += n.grad.data()[i];
      continue;
    }
    if (!n.backward) continue;
    in.clear();
    gin.clear();
    for (std::size_t input : n.inputs) {
      Node& src = nodes_[input];
      in.push_back(&src.value);
      if (src.requires_grad) {
        if (!src.has_grad) {
          src.grad = Matrix(src.value.rows(), src.value.cols());
          src.has_grad = true;
        }
        gin.push_back(&src.grad);
      } else {
        gin.push_back(nullptr);
      }
    }
    n.backward(in, n.value, n.grad, gin);
  }
}

void Tape::replay() {
  std::vector<const Matrix*> in;
  for (Node& n : nodes_) {
    if (n.param != nullptr) {
      n.value = n.param->value;
      continue;
    }
    if (!n.forward) continue;
    in.clear();
    for (std::size_t input : n.inputs) in.push_back(&nodes_[input].value);
    n.value = n.forward(in);
  }
}

}  // namespace depthcap::num
