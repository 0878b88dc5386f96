#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lpdgcn/tensor.hpp"

namespace lpdgcn::ad {

template <typename T>
class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid as long as the
/// tape is alive.
template <typename T>
class Var {
 public:
  Var() = default;
  Var(Tape<T>* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape<T>& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

  const Matrix<T>& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  bool requires_grad() const;

 private:
  Tape<T>* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Gradients produced by one backward pass, keyed by tape node.
template <typename T>
class Gradients {
 public:
  Gradients() = default;
  explicit Gradients(std::vector<Matrix<T>> grads) : grads_(std::move(grads)) {}

  /// Gradient for a leaf. Leaves the loss does not depend on get zeros.
  const Matrix<T>& of(const Var<T>& v) const { return grads_.at(v.id()); }

 private:
  std::vector<Matrix<T>> grads_;
};

/// Reverse-mode record. Nodes are appended in evaluation order, so the vector
/// index is already a topological order; backward walks it once in reverse.
template <typename T>
class Tape {
 public:
  /// Receives the output gradient and one slot per input. A slot is null when
  /// that input does not require a gradient.
  using BackwardFn = std::function<void(const Matrix<T>& grad_out, std::span<Matrix<T>*> grad_in)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var<T> leaf(Matrix<T> value, bool requires_grad = true);
  Var<T> constant(Matrix<T> value) { return leaf(std::move(value), false); }

  /// Appends an op result. `backward` is dropped when no input needs a gradient.
  Var<T> record(Matrix<T> value, std::vector<std::size_t> inputs, BackwardFn backward);

  const Matrix<T>& value(std::size_t id) const { return nodes_.at(id).value; }
  bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  /// Gradient of the scalar `loss` with respect to every node. Leaves that
  /// require a gradient but are unreachable from `loss` receive zeros.
  Gradients<T> backward(const Var<T>& loss) const;

 private:
  struct Node {
    Matrix<T> value;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    bool requires_grad = false;
    bool leaf = false;
  };
  std::vector<Node> nodes_;
};

template <typename T>
const Matrix<T>& Var<T>::value() const {
  return tape_->value(id_);
}

template <typename T>
bool Var<T>::requires_grad() const {
  return tape_->requires_grad(id_);
}

template <typename T>
Gradients<T> backward(const Var<T>& loss) {
  return loss.tape().backward(loss);
}

}  // namespace lpdgcn::ad
