#include "gcs/error.hpp"
#include "gcs/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gcs::ad {
namespace {

void require_same_tape(const Tensor& a, const Tensor& b, std::string_view op) {
  if (!a.valid() || !b.valid() || &a.tape() != &b.tape()) {
    throw UsageError(std::string(op) + ": operands live on different tapes");
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, std::string_view op) {
  require_same_tape(a, b, op);
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
}

// dfdx(x, y) is the local partial of y = f(x).
template <class F, class D>
Tensor unary(std::string_view op, const Tensor& a, F f, D dfdx) {
  Tape& tape = a.tape();
  const auto& av = tape.value_of(a);
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = f(av[i]);
  return tape.record(op, a.shape(), std::move(out), [a, dfdx](const Tensor& self) {
    Tape& t = self.tape();
    const auto& x = t.value_of(a);
    const auto& y = t.value_of(self);
    const auto& g = t.grad_of(self);
    auto& ga = t.grad_of(a);
    for (std::size_t i = 0; i < x.size(); ++i) ga[i] += g[i] * dfdx(x[i], y[i]);
  });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tape& tape = a.tape();
  const auto& av = tape.value_of(a);
  const auto& bv = tape.value_of(b);
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  return tape.record("add", a.shape(), std::move(out), [a, b](const Tensor& self) {
    Tape& t = self.tape();
    const auto& g = t.grad_of(self);
    auto& ga = t.grad_of(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    auto& gb = t.grad_of(b);
    for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  Tape& tape = a.tape();
  const auto& av = tape.value_of(a);
  const auto& bv = tape.value_of(b);
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  return tape.record("sub", a.shape(), std::move(out), [a, b](const Tensor& self) {
    Tape& t = self.tape();
    const auto& g = t.grad_of(self);
    auto& ga = t.grad_of(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    auto& gb = t.grad_of(b);
    for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  Tape& tape = a.tape();
  const auto& av = tape.value_of(a);
  const auto& bv = tape.value_of(b);
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return tape.record("mul", a.shape(), std::move(out), [a, b](const Tensor& self) {
    Tape& t = self.tape();
    const auto& g = t.grad_of(self);
    const auto& x = t.value_of(a);
    const auto& y = t.value_of(b);
    auto& ga = t.grad_of(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i];
    auto& gb = t.grad_of(b);
    for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * x[i];
  });
}

Tensor div(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "div");
  Tape& tape = a.tape();
  const auto& av = tape.value_of(a);
  const auto& bv = tape.value_of(b);
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (bv[i] == 0.0) throw NumericDomainError("div: zero denominator");
    out[i] = av[i] / bv[i];
  }
  return tape.record("div", a.shape(), std::move(out), [a, b](const Tensor& self) {
    Tape& t = self.tape();
    const auto& g = t.grad_of(self);
    const auto& y = t.value_of(b);
    const auto& q = t.value_of(self);
    auto& ga = t.grad_of(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] / y[i];
    auto& gb = t.grad_of(b);
    for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i] * q[i] / y[i];
  });
}

Tensor neg(const Tensor& a) {
  return unary("neg", a, [](double x) { return -x; }, [](double, double) { return -1.0; });
}

Tensor exp(const Tensor& a) {
  return unary("exp", a, [](double x) { return std::exp(x); },
               [](double, double y) { return y; });
}

Tensor ln(const Tensor& a) {
  for (double v : a.values()) {
    if (v <= 0.0) throw NumericDomainError("ln: non-positive argument");
  }
  return unary("ln", a, [](double x) { return std::log(x); },
               [](double x, double) { return 1.0 / x; });
}

Tensor relu(const Tensor& a) {
  return unary("relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
               [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor tanh(const Tensor& a) {
  return unary("tanh", a, [](double x) { return std::tanh(x); },
               [](double, double y) { return 1.0 - y * y; });
}

Tensor square(const Tensor& a) {
  return unary("square", a, [](double x) { return x * x; },
               [](double x, double) { return 2.0 * x; });
}

Tensor scale(const Tensor& a, double factor) {
  return unary("scale", a, [factor](double x) { return factor * x; },
               [factor](double, double) { return factor; });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_same_tape(a, b, "matmul");
  const Shape sa = a.shape();
  const Shape sb = b.shape();
  if (sa.cols != sb.rows) {
    throw ShapeError("matmul: inner dimensions " + std::to_string(sa.cols) + " and " +
                     std::to_string(sb.rows) + " disagree");
  }
  Tape& tape = a.tape();
  const auto& av = tape.value_of(a);
  const auto& bv = tape.value_of(b);
  const std::size_t m = sa.rows, k = sa.cols, n = sb.cols;
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double x = av[i * k + p];
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += x * bv[p * n + j];
    }
  }
  return tape.record("matmul", {m, n}, std::move(out), [a, b, m, k, n](const Tensor& self) {
    Tape& t = self.tape();
    const auto& g = t.grad_of(self);
    const auto& x = t.value_of(a);
    const auto& y = t.value_of(b);
    auto& ga = t.grad_of(a);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t p = 0; p < k; ++p)
        for (std::size_t j = 0; j < n; ++j) ga[i * k + p] += g[i * n + j] * y[p * n + j];
    auto& gb = t.grad_of(b);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t p = 0; p < k; ++p)
        for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += g[i * n + j] * x[i * k + p];
  });
}

Tensor matvec(const Tensor& w, const Tensor& x) {
  if (x.cols() != 1) throw ShapeError("matvec: right operand must be a column");
  return matmul(w, x);
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  require_same_tape(x, w, "linear");
  require_same_tape(x, b, "linear");
  const std::size_t batch = x.rows(), in = x.cols(), out = w.rows();
  if (w.cols() != in) throw ShapeError("linear: weight columns do not match input width");
  if (b.size() != out) throw ShapeError("linear: bias length does not match output width");
  Tape& tape = x.tape();
  const auto& xv = tape.value_of(x);
  const auto& wv = tape.value_of(w);
  const auto& bv = tape.value_of(b);
  std::vector<double> y(batch * out);
  for (std::size_t r = 0; r < batch; ++r) {
    for (std::size_t o = 0; o < out; ++o) {
      double acc = bv[o];
      for (std::size_t i = 0; i < in; ++i) acc += wv[o * in + i] * xv[r * in + i];
      y[r * out + o] = acc;
    }
  }
  return tape.record("linear", {batch, out}, std::move(y),
                     [x, w, b, batch, in, out](const Tensor& self) {
    Tape& t = self.tape();
    const auto& g = t.grad_of(self);
    const auto& xv = t.value_of(x);
    const auto& wv = t.value_of(w);
    auto& gx = t.grad_of(x);
    for (std::size_t r = 0; r < batch; ++r)
      for (std::size_t o = 0; o < out; ++o)
        for (std::size_t i = 0; i < in; ++i) gx[r * in + i] += g[r * out + o] * wv[o * in + i];
    auto& gw = t.grad_of(w);
    for (std::size_t r = 0; r < batch; ++r)
      for (std::size_t o = 0; o < out; ++o)
        for (std::size_t i = 0; i < in; ++i) gw[o * in + i] += g[r * out + o] * xv[r * in + i];
    auto& gb = t.grad_of(b);
    for (std::size_t r = 0; r < batch; ++r)
      for (std::size_t o = 0; o < out; ++o) gb[o] += g[r * out + o];
  });
}

Var sum(const Tensor& a) {
  Tape& tape = a.tape();
  double acc = 0.0;
  for (double v : tape.value_of(a)) acc += v;
  return Var(tape.record("sum", {1, 1}, {acc}, [a](const Tensor& self) {
    Tape& t = self.tape();
    const double g = t.grad_of(self)[0];
    for (double& ga : t.grad_of(a)) ga += g;
  }));
}

Var mean(const Tensor& a) {
  if (a.size() == 0) throw ShapeError("mean: empty tensor");
  Tape& tape = a.tape();
  double acc = 0.0;
  for (double v : tape.value_of(a)) acc += v;
  const double n = static_cast<double>(a.size());
  return Var(tape.record("mean", {1, 1}, {acc / n}, [a, n](const Tensor& self) {
    Tape& t = self.tape();
    const double g = t.grad_of(self)[0] / n;
    for (double& ga : t.grad_of(a)) ga += g;
  }));
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape.size() != a.size()) throw ShapeError("reshape: element count changes");
  Tape& tape = a.tape();
  std::vector<double> out = tape.value_of(a);
  return tape.record("reshape", shape, std::move(out), [a](const Tensor& self) {
    Tape& t = self.tape();
    const auto& g = t.grad_of(self);
    auto& ga = t.grad_of(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

Tensor slice(const Tensor& a, std::size_t offset, std::size_t count) {
  if (offset + count > a.size()) throw ShapeError("slice: range exceeds tensor");
  Tape& tape = a.tape();
  const auto& av = tape.value_of(a);
  std::vector<double> out(av.begin() + static_cast<std::ptrdiff_t>(offset),
                          av.begin() + static_cast<std::ptrdiff_t>(offset + count));
  return tape.record("slice", {count, 1}, std::move(out), [a, offset](const Tensor& self) {
    Tape& t = self.tape();
    const auto& g = t.grad_of(self);
    auto& ga = t.grad_of(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[offset + i] += g[i];
  });
}

Tensor column(const Tensor& a, std::size_t col) {
  const Shape s = a.shape();
  if (col >= s.cols) throw ShapeError("column: index out of range");
  Tape& tape = a.tape();
  const auto& av = tape.value_of(a);
  std::vector<double> out(s.rows);
  for (std::size_t r = 0; r < s.rows; ++r) out[r] = av[r * s.cols + col];
  return tape.record("column", {s.rows, 1}, std::move(out), [a, s, col](const Tensor& self) {
    Tape& t = self.tape();
    const auto& g = t.grad_of(self);
    auto& ga = t.grad_of(a);
    for (std::size_t r = 0; r < s.rows; ++r) ga[r * s.cols + col] += g[r];
  });
}

Tensor hconcat(const Tensor& a, const Tensor& b) {
  require_same_tape(a, b, "hconcat");
  const Shape sa = a.shape(), sb = b.shape();
  if (sa.rows != sb.rows) throw ShapeError("hconcat: row counts differ");
  Tape& tape = a.tape();
  const auto& av = tape.value_of(a);
  const auto& bv = tape.value_of(b);
  const std::size_t cols = sa.cols + sb.cols;
  std::vector<double> out(sa.rows * cols);
  for (std::size_t r = 0; r < sa.rows; ++r) {
    std::copy_n(av.begin() + r * sa.cols, sa.cols, out.begin() + r * cols);
    std::copy_n(bv.begin() + r * sb.cols, sb.cols, out.begin() + r * cols + sa.cols);
  }
  return tape.record("hconcat", {sa.rows, cols}, std::move(out),
                     [a, b, sa, sb, cols](const Tensor& self) {
    Tape& t = self.tape();
    const auto& g = t.grad_of(self);
    auto& ga = t.grad_of(a);
    for (std::size_t r = 0; r < sa.rows; ++r)
      for (std::size_t c = 0; c < sa.cols; ++c) ga[r * sa.cols + c] += g[r * cols + c];
    auto& gb = t.grad_of(b);
    for (std::size_t r = 0; r < sb.rows; ++r)
      for (std::size_t c = 0; c < sb.cols; ++c) gb[r * sb.cols + c] += g[r * cols + sa.cols + c];
  });
}

Tensor gather_rows(const Tensor& a, std::span<const std::size_t> rows) {
  const Shape s = a.shape();
  Tape& tape = a.tape();
  const auto& av = tape.value_of(a);
  std::vector<double> out(rows.size() * s.cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= s.rows) throw ShapeError("gather_rows: row index out of range");
    std::copy_n(av.begin() + rows[r] * s.cols, s.cols, out.begin() + r * s.cols);
  }
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  return tape.record("gather_rows", {rows.size(), s.cols}, std::move(out),
                     [a, s, idx = std::move(idx)](const Tensor& self) {
    Tape& t = self.tape();
    const auto& g = t.grad_of(self);
    auto& ga = t.grad_of(a);
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t c = 0; c < s.cols; ++c) ga[idx[r] * s.cols + c] += g[r * s.cols + c];
  });
}

Tensor add_constant(const Tensor& a, std::span<const double> c) {
  if (c.size() != a.size()) throw ShapeError("add_constant: size mismatch");
  Tape& tape = a.tape();
  const auto& av = tape.value_of(a);
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + c[i];
  return tape.record("add_constant", a.shape(), std::move(out), [a](const Tensor& self) {
    Tape& t = self.tape();
    const auto& g = t.grad_of(self);
    auto& ga = t.grad_of(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  if (!(lo < hi)) throw ParameterError("clamp: empty interval");
  return unary("clamp", a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
               [lo, hi](double x, double) { return (x > lo && x < hi) ? 1.0 : 0.0; });
}

std::vector<double> softmin_weights(std::span<const double> d, double temperature) {
  if (!(temperature > 0.0)) throw ParameterError("softmin_weights: temperature must be positive");
  if (d.empty()) throw ShapeError("softmin_weights: empty input");
  for (double v : d) {
    if (!std::isfinite(v)) throw NumericDomainError("softmin_weights: non-finite distance");
  }
  const double lowest = *std::min_element(d.begin(), d.end());
  std::vector<double> w(d.size());
  double z = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    w[i] = std::exp(-(d[i] - lowest) / temperature);
    z += w[i];
  }
  for (double& x : w) x /= z;
  return w;
}

Tensor softmin(const Tensor& d, double temperature) {
  Tape& tape = d.tape();
  std::vector<double> w = softmin_weights(tape.value_of(d), temperature);
  return tape.record("softmin", d.shape(), std::move(w), [d, temperature](const Tensor& self) {
    Tape& t = self.tape();
    const auto& w = t.value_of(self);
    const auto& g = t.grad_of(self);
    double wg = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) wg += w[i] * g[i];
    auto& gd = t.grad_of(d);
    for (std::size_t i = 0; i < w.size(); ++i) gd[i] -= w[i] * (g[i] - wg) / temperature;
  });
}

}  // namespace gcs::ad
