#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "depthcap/numerics/matrix.hpp"
#include "depthcap/numerics/params.hpp"

namespace depthcap::num {

class Tape;

// Handle to a node on a Tape. Cheap to copy; only valid while its tape lives.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Matrix& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

using ForwardFn = std::function<Matrix(std::span<const Matrix* const> inputs)>;
// Accumulate (+=) into every non-null entry of input_grads.
using BackwardFn = std::function<void(std::span<const Matrix* const> inputs, const Matrix& output,
                                      const Matrix& grad_output,
                                      std::span<Matrix* const> input_grads)>;

// Linear record of primitive operations. Single-writer: one training step or
// one gradient check owns a tape.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  // Leaf bound to a parameter. Repeated calls for the same parameter return
  // the same node.
  Var parameter(Parameter& p);
  Var record(std::vector<Var> inputs, ForwardFn forward, BackwardFn backward);

  const Matrix& value(Var v) const;
  // Gradient of the last backward() target with respect to v (zero if v
  // did not influence it).
  Matrix grad(Var v) const;
  bool requires_grad(Var v) const;

  // Reverse sweep from a 1x1 node. Parameter gradients are accumulated into
  // Parameter::grad; callers zero them between steps.
  void backward(Var loss);

  // Re-run every recorded forward in order, re-reading parameter values.
  void replay();

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool has_grad = false;
    bool requires_grad = false;
    Parameter* param = nullptr;
    std::vector<std::size_t> inputs;
    ForwardFn forward;
    BackwardFn backward;
  };

  void check(Var v) const;

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> param_nodes_;
};

}  // namespace depthcap::num
