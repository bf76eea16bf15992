#include "gcs/error.hpp"
#include "gcs/numerics.hpp"

#include <cmath>
#include <string>

namespace gcs::ad {

Shape Tensor::shape() const { return tape_->shape_of(*this); }

std::span<const double> Tensor::values() const { return tape_->value_of(*this); }

std::span<const double> Tensor::grads() const {
  return static_cast<const Tape*>(tape_)->grad_of(*this);
}

double Tensor::value(std::size_t r, std::size_t c) const {
  const Shape s = shape();
  if (r >= s.rows || c >= s.cols) throw ShapeError("tensor index out of range");
  return values()[r * s.cols + c];
}

double Tensor::grad(std::size_t r, std::size_t c) const {
  const Shape s = shape();
  if (r >= s.rows || c >= s.cols) throw ShapeError("tensor index out of range");
  return grads()[r * s.cols + c];
}

Var::Var(const Tensor& t) : Tensor(t) {
  if (t.size() != 1) {
    throw ShapeError("Var requires a 1x1 tensor, got " + std::to_string(t.rows()) +
                     "x" + std::to_string(t.cols()));
  }
}

Tensor Tape::leaf(Shape shape, std::vector<double> values) {
  return record("leaf", shape, std::move(values), nullptr);
}

Tensor Tape::column(std::vector<double> values) {
  const Shape s{values.size(), 1};
  return leaf(s, std::move(values));
}

Var Tape::scalar(double value) { return Var(leaf({1, 1}, {value})); }

Tensor Tape::record(std::string_view op, Shape shape, std::vector<double> values,
                    BackwardFn backward) {
  if (values.size() != shape.size()) {
    throw ShapeError(std::string(op) + ": value count " + std::to_string(values.size()) +
                     " does not match shape " + std::to_string(shape.rows) + "x" +
                     std::to_string(shape.cols));
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw NumericDomainError(std::string(op) + ": non-finite value");
    }
  }
  if (backward_done_) throw UsageError("tape already differentiated; clear() before reuse");
  Node n;
  n.shape = shape;
  n.grad.assign(values.size(), 0.0);
  n.value = std::move(values);
  n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Tensor(this, nodes_.size() - 1);
}

void Tape::backward(const Tensor& root) {
  if (root.tape_ != this) throw UsageError("backward: root belongs to another tape");
  if (node(root).shape.size() != 1) throw UsageError("backward: root must be a scalar");
  if (backward_done_) throw UsageError("backward: already called on this tape");
  backward_done_ = true;
  node(root).grad[0] = 1.0;
  for (std::size_t i = root.id_ + 1; i-- > 0;) {
    if (nodes_[i].backward) nodes_[i].backward(Tensor(this, i));
  }
}

void Tape::clear() {
  nodes_.clear();
  backward_done_ = false;
}

const Tape::Node& Tape::node(const Tensor& t) const {
  if (t.tape_ != this || t.id_ >= nodes_.size()) throw UsageError("stale tensor handle");
  return nodes_[t.id_];
}

Tape::Node& Tape::node(const Tensor& t) {
  if (t.tape_ != this || t.id_ >= nodes_.size()) throw UsageError("stale tensor handle");
  return nodes_[t.id_];
}

const std::vector<double>& Tape::value_of(const Tensor& t) const { return node(t).value; }
std::vector<double>& Tape::grad_of(const Tensor& t) { return node(t).grad; }
const std::vector<double>& Tape::grad_of(const Tensor& t) const { return node(t).grad; }
Shape Tape::shape_of(const Tensor& t) const { return node(t).shape; }

}  // namespace gcs::ad
