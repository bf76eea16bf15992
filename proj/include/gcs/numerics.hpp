#pragma once

// Reverse-mode automatic differentiation over small dense real tensors.
//
// A Tape records nodes in creation order, which is a topological order of the
// graph, so backward() is a single reverse sweep. Each node owns a row-major
// value buffer and an adjoint buffer of the same shape. Complex quantities are
// carried as (re, im) column pairs; there is no complex-valued autodiff.
//
// Heavy domain operations (differentiable BPS, channel rotation, BCE) are
// recorded as single fused nodes with hand-written adjoints via Tape::record.

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace gcs::ad {

struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const { return rows * cols; }
  bool operator==(const Shape&) const = default;
};

class Tape;

// Handle to a node on a tape. Cheap to copy; valid while the tape is alive and
// has not been cleared.
class Tensor {
 public:
  Tensor() = default;

  Shape shape() const;
  std::size_t rows() const { return shape().rows; }
  std::size_t cols() const { return shape().cols; }
  std::size_t size() const { return shape().size(); }

  std::span<const double> values() const;
  std::span<const double> grads() const;
  double value(std::size_t r, std::size_t c) const;
  double grad(std::size_t r, std::size_t c) const;

  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Tensor(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// A 1x1 tensor.
class Var : public Tensor {
 public:
  Var() = default;
  explicit Var(const Tensor& t);

  using Tensor::grad;
  using Tensor::value;
  double value() const { return Tensor::value(0, 0); }
  double grad() const { return Tensor::grad(0, 0); }
};

class Tape {
 public:
  // Receives the handle of the node being differentiated.
  using BackwardFn = std::function<void(const Tensor& self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Input node. Values must be finite.
  Tensor leaf(Shape shape, std::vector<double> values);
  Tensor column(std::vector<double> values);
  Var scalar(double value);

  // Records an operation result. `backward` reads this node's adjoint and
  // accumulates into its operands' adjoints. Non-finite values are rejected
  // with a NumericDomainError naming `op`.
  Tensor record(std::string_view op, Shape shape, std::vector<double> values,
                BackwardFn backward);

  // Seeds d(root)/d(root) = 1 and sweeps the tape in reverse. Only one
  // backward pass is allowed per tape; call clear() to reuse it.
  void backward(const Tensor& root);
  bool backward_done() const { return backward_done_; }

  void clear();
  std::size_t size() const { return nodes_.size(); }

  const std::vector<double>& value_of(const Tensor& t) const;
  std::vector<double>& grad_of(const Tensor& t);
  const std::vector<double>& grad_of(const Tensor& t) const;
  Shape shape_of(const Tensor& t) const;

 private:
  struct Node {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;
    BackwardFn backward;
  };

  const Node& node(const Tensor& t) const;
  Node& node(const Tensor& t);

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

// Elementwise arithmetic; operands must have identical shapes (no broadcasting).
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor neg(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor ln(const Tensor& a);
Tensor relu(const Tensor& a);  // subgradient 0 at 0
Tensor tanh(const Tensor& a);
Tensor square(const Tensor& a);

inline Var add(const Var& a, const Var& b) { return Var(add(static_cast<const Tensor&>(a), b)); }
inline Var sub(const Var& a, const Var& b) { return Var(sub(static_cast<const Tensor&>(a), b)); }
inline Var mul(const Var& a, const Var& b) { return Var(mul(static_cast<const Tensor&>(a), b)); }
inline Var div(const Var& a, const Var& b) { return Var(div(static_cast<const Tensor&>(a), b)); }
inline Var neg(const Var& a) { return Var(neg(static_cast<const Tensor&>(a))); }
inline Var exp(const Var& a) { return Var(exp(static_cast<const Tensor&>(a))); }
inline Var ln(const Var& a) { return Var(ln(static_cast<const Tensor&>(a))); }
inline Var relu(const Var& a) { return Var(relu(static_cast<const Tensor&>(a))); }
inline Var tanh(const Var& a) { return Var(tanh(static_cast<const Tensor&>(a))); }
inline Var square(const Var& a) { return Var(square(static_cast<const Tensor&>(a))); }

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator/(const Tensor& a, const Tensor& b) { return div(a, b); }
inline Tensor operator-(const Tensor& a) { return neg(a); }
inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator*(const Var& a, const Var& b) { return mul(a, b); }
inline Var operator/(const Var& a, const Var& b) { return div(a, b); }
inline Var operator-(const Var& a) { return neg(a); }

// Multiplies every element by a constant.
Tensor scale(const Tensor& a, double factor);

// (m x k) * (k x n) -> (m x n).
Tensor matmul(const Tensor& a, const Tensor& b);
// (n x k) * (k x 1) -> (n x 1).
Tensor matvec(const Tensor& w, const Tensor& x);
// Batched dense layer: rows of x (batch x in) mapped to x W^T + b with
// W (out x in) and b (out x 1). Result is (batch x out).
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);

Var sum(const Tensor& a);
Var mean(const Tensor& a);

Tensor reshape(const Tensor& a, Shape shape);
// Contiguous row-major slice of `count` elements starting at `offset`,
// returned as a column.
Tensor slice(const Tensor& a, std::size_t offset, std::size_t count);
Tensor column(const Tensor& a, std::size_t col);
Tensor hconcat(const Tensor& a, const Tensor& b);
Tensor gather_rows(const Tensor& a, std::span<const std::size_t> rows);
// a + c with c a constant of the same shape.
Tensor add_constant(const Tensor& a, std::span<const double> c);
// Elementwise clamp; the adjoint is zero where the value was clipped.
Tensor clamp(const Tensor& a, double lo, double hi);

// w_b = exp(-d_b / T) / sum_c exp(-d_c / T), stabilised by subtracting min(d).
std::vector<double> softmin_weights(std::span<const double> d, double temperature);
// Differentiable version over all elements of `d`; result has d's shape.
Tensor softmin(const Tensor& d, double temperature);

// Builds a scalar on `tape` from the input column `x`.
using ScalarFn = std::function<Var(Tape& tape, const Tensor& x)>;

struct GradcheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  std::vector<double> analytic;
  std::vector<double> numeric;
};

// Compares the reverse-mode gradient of f at x with central differences.
// Error per coordinate is |analytic - numeric| / max(1, |analytic|).
// Points on a relu kink are not differentiable and are not meaningful inputs.
GradcheckReport gradcheck_report(const ScalarFn& f, std::span<const double> x,
                                 double step = 1e-5);
double gradcheck(const ScalarFn& f, std::span<const double> x, double step = 1e-5);

}  // namespace gcs::ad
