#include "lpdgcn/tape.hpp"

#include <stdexcept>

namespace lpdgcn::ad {

template <typename T>
Var<T> Tape<T>::leaf(Matrix<T> value, bool requires_grad) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  n.leaf = true;
  nodes_.push_back(std::move(n));
  return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
Var<T> Tape<T>::record(Matrix<T> value, std::vector<std::size_t> inputs, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  for (auto id : inputs) {
    if (id >= nodes_.size()) throw std::out_of_range("Tape::record: input id not on tape");
    n.requires_grad = n.requires_grad || nodes_[id].requires_grad;
  }
  n.inputs = std::move(inputs);
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
Gradients<T> Tape<T>::backward(const Var<T>& loss) const {
  if (&loss.tape() != this) throw std::invalid_argument("backward: loss belongs to another tape");
  const std::size_t root = loss.id();
  if (!nodes_.at(root).value.is_scalar())
    throw std::invalid_argument("backward: loss must be scalar, got " +
                                nodes_[root].value.shape_string());

  std::vector<Matrix<T>> grads(nodes_.size());
  if (nodes_[root].requires_grad) grads[root] = Matrix<T>(1, 1, T(1));

  std::vector<Matrix<T>*> slots;
  for (std::size_t i = root + 1; i-- > 0;) {
    const Node& node = nodes_[i];
    if (grads[i].empty() || !node.backward) continue;
    slots.assign(node.inputs.size(), nullptr);
    for (std::size_t j = 0; j < node.inputs.size(); ++j) {
      const std::size_t in = node.inputs[j];
      if (!nodes_[in].requires_grad) continue;
      if (grads[in].empty()) grads[in] = Matrix<T>(nodes_[in].value.rows(), nodes_[in].value.cols());
      slots[j] = &grads[in];
    }
    node.backward(grads[i], slots);
    // Interior gradients are no longer needed once propagated.
    if (!node.leaf) grads[i] = Matrix<T>();
  }

  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].leaf && nodes_[i].requires_grad && grads[i].empty())
      grads[i] = Matrix<T>(nodes_[i].value.rows(), nodes_[i].value.cols());
  }
  return Gradients<T>(std::move(grads));
}

template class Tape<float>;
template class Tape<double>;
template class Tape<long double>;

}  // namespace lpdgcn::ad
