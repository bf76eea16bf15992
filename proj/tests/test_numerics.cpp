#include "gcs/error.hpp"
#include "gcs/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace gcs::ad;

namespace {

// Central differences of a plain function; independent of the tape.
std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> x, double h = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    x[i] = x0 + h;
    const double fp = f(x);
    x[i] = x0 - h;
    const double fm = f(x);
    x[i] = x0;
    g[i] = (fp - fm) / (2 * h);
  }
  return g;
}

double rel_err(double a, double n) { return std::abs(a - n) / std::max(1.0, std::abs(a)); }

}  // namespace

TEST_CASE("mul records the product rule") {
  Tape t;
  Var a = t.scalar(2.0), b = t.scalar(3.0);
  Var c = a * b;
  CHECK(c.value() == 6.0);
  t.backward(c);
  CHECK(a.grad() == 3.0);
  CHECK(b.grad() == 2.0);
  CHECK(c.grad() == 1.0);
}

TEST_CASE("relu and exp at their special points") {
  Tape t;
  Var x = t.scalar(-1.5);
  Var r = relu(x);
  CHECK(r.value() == 0.0);
  t.backward(r);
  CHECK(x.grad() == 0.0);

  Tape t2;
  Var z = t2.scalar(0.0);
  Var e = exp(z);
  CHECK(e.value() == 1.0);
  t2.backward(e);
  CHECK(z.grad() == 1.0);

  Tape t3;
  Var k = t3.scalar(0.0);
  Var rk = relu(k);
  t3.backward(rk);
  CHECK(k.grad() == 0.0);
}

TEST_CASE("backward on small compositions") {
  Tape t;
  Var x = t.scalar(3.0);
  Var y = square(x);
  t.backward(y);
  CHECK(x.grad() == doctest::Approx(6.0).epsilon(1e-15));

  Tape t2;
  Var u = t2.scalar(0.7);
  Var v = ln(exp(u));
  t2.backward(v);
  CHECK(u.grad() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("backward rejects non-scalar roots and a second pass") {
  Tape t;
  Tensor a = t.column({1.0, 2.0});
  CHECK_THROWS_AS(t.backward(a), gcs::UsageError);
  Var s = sum(a);
  t.backward(s);
  CHECK_THROWS_AS(t.backward(s), gcs::UsageError);
  t.clear();
  Var x = t.scalar(1.0);
  Var y = x * x;
  CHECK_NOTHROW(t.backward(y));
}

TEST_CASE("non-finite operands raise a numeric-domain error") {
  Tape t;
  CHECK_THROWS_AS(t.scalar(std::nan("")), gcs::NumericDomainError);
  Var zero = t.scalar(0.0), one = t.scalar(1.0);
  CHECK_THROWS_AS(one / zero, gcs::NumericDomainError);
  CHECK_THROWS_AS(ln(zero), gcs::NumericDomainError);
  Var big = t.scalar(1000.0);
  CHECK_THROWS_AS(exp(big), gcs::NumericDomainError);
}

TEST_CASE("random five-op composite matches finite differences") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.2, 1.5);
  auto plain = [](const std::vector<double>& x) {
    return std::tanh(x[0] * x[1]) + std::log(x[2] + std::exp(x[0])) / (x[1] * x[1] + 1.0);
  };
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x{u(rng), u(rng), u(rng)};
    Tape t;
    Var a = t.scalar(x[0]), b = t.scalar(x[1]), c = t.scalar(x[2]);
    Var one = t.scalar(1.0);
    Var f = tanh(a * b) + ln(c + exp(a)) / (square(b) + one);
    CHECK(f.value() == doctest::Approx(plain(x)).epsilon(1e-14));
    t.backward(f);
    const auto g = fd_gradient(plain, x);
    CHECK(rel_err(a.grad(), g[0]) < 1e-6);
    CHECK(rel_err(b.grad(), g[1]) < 1e-6);
    CHECK(rel_err(c.grad(), g[2]) < 1e-6);
  }
}

TEST_CASE("matvec values and shapes") {
  Tape t;
  Tensor eye = t.leaf({2, 2}, {1, 0, 0, 1});
  Tensor ab = t.column({4.0, -2.0});
  Tensor r = matvec(eye, ab);
  CHECK(r.value(0, 0) == 4.0);
  CHECK(r.value(1, 0) == -2.0);
  Tensor w = t.leaf({2, 2}, {1, 2, 3, 4});
  Tensor ones = t.column({1.0, 1.0});
  Tensor p = matvec(w, ones);
  CHECK(p.value(0, 0) == 3.0);
  CHECK(p.value(1, 0) == 7.0);
  Tensor bad = t.column({1.0, 2.0, 3.0});
  CHECK_THROWS_AS(matvec(w, bad), gcs::ShapeError);
}

TEST_CASE("gradient of sum(matvec(W, x)) w.r.t. W") {
  const std::vector<double> w0{0.3, -1.2, 0.5, 2.0, 0.1, -0.7};
  const std::vector<double> x0{0.9, -0.4};
  Tape t;
  Tensor w = t.leaf({3, 2}, w0);
  Tensor x = t.column(x0);
  Var s = sum(matvec(w, x));
  t.backward(s);
  auto plain = [&](const std::vector<double>& wv) {
    double acc = 0;
    for (int r = 0; r < 3; ++r) acc += wv[r * 2] * x0[0] + wv[r * 2 + 1] * x0[1];
    return acc;
  };
  const auto g = fd_gradient(plain, w0);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(rel_err(w.grads()[i], g[i]) < 1e-6);
}

TEST_CASE("softmin_weights examples") {
  const std::vector<double> flat{1, 1, 1};
  for (double tau : {0.001, 0.5, 1.0}) {
    for (double w : softmin_weights(flat, tau)) CHECK(w == doctest::Approx(1.0 / 3).epsilon(1e-15));
  }
  const auto hard = softmin_weights(std::vector<double>{0, 10}, 0.001);
  CHECK(hard[0] >= 1 - 1e-9);
  const auto soft = softmin_weights(std::vector<double>{0, 1}, 1.0);
  const double e = std::exp(1.0);
  CHECK(soft[0] == doctest::Approx(e / (e + 1)).epsilon(1e-14));
  CHECK(soft[1] == doctest::Approx(1 / (e + 1)).epsilon(1e-14));
  CHECK_THROWS_AS(softmin_weights(flat, 0.0), gcs::ParameterError);
  CHECK_THROWS_AS(softmin_weights(flat, -1.0), gcs::ParameterError);
}

TEST_CASE("softmin_weights sums to one and tracks the argmin") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> d(1 + trial % 40);
    for (double& v : d) v = n(rng);
    const double tau = std::pow(10.0, -3.0 + 3.0 * (trial % 7) / 6.0);
    const auto w = softmin_weights(d, tau);
    double total = 0;
    for (double v : w) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      total += v;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    const auto cold = softmin_weights(d, 1e-6);
    CHECK(std::max_element(cold.begin(), cold.end()) - cold.begin() ==
          std::min_element(d.begin(), d.end()) - d.begin());
  }
}

TEST_CASE("every exported op matches finite differences at random points") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  // Each case maps a 6-element input column to a scalar; inputs to ln/div are
  // shifted positive, relu inputs are kept away from 0 by construction.
  const std::vector<std::pair<const char*, ScalarFn>> cases = {
      {"add", [](Tape&, const Tensor& x) { return sum(add(slice(x, 0, 3), slice(x, 3, 3))); }},
      {"sub", [](Tape&, const Tensor& x) { return sum(square(sub(slice(x, 0, 3), slice(x, 3, 3)))); }},
      {"mul", [](Tape&, const Tensor& x) { return sum(mul(slice(x, 0, 3), slice(x, 3, 3))); }},
      {"div", [](Tape& t, const Tensor& x) {
         const Tensor den = add_constant(square(slice(x, 3, 3)), std::vector<double>{1, 1, 1});
         (void)t;
         return sum(div(slice(x, 0, 3), den));
       }},
      {"neg_exp", [](Tape&, const Tensor& x) { return sum(neg(exp(x))); }},
      {"ln", [](Tape&, const Tensor& x) {
         return sum(ln(add_constant(square(x), std::vector<double>(6, 0.5))));
       }},
      {"relu", [](Tape&, const Tensor& x) { return sum(mul(relu(x), x)); }},
      {"tanh", [](Tape&, const Tensor& x) { return sum(tanh(x)); }},
      {"scale_mean", [](Tape&, const Tensor& x) { return mean(scale(square(x), 2.5)); }},
      {"matmul", [](Tape&, const Tensor& x) {
         const Tensor a = reshape(x, {2, 3});
         const Tensor b = reshape(x, {3, 2});
         return sum(square(matmul(a, b)));
       }},
      {"linear", [](Tape&, const Tensor& x) {
         const Tensor in = reshape(slice(x, 0, 4), {2, 2});
         const Tensor w = reshape(slice(x, 2, 4), {2, 2});
         const Tensor b = slice(x, 4, 2);
         return sum(tanh(linear(in, w, b)));
       }},
      {"column_hconcat", [](Tape&, const Tensor& x) {
         const Tensor m = reshape(x, {3, 2});
         return sum(mul(square(hconcat(column(m, 1), column(m, 0))), m));
       }},
      {"gather", [](Tape&, const Tensor& x) {
         const std::size_t rows[] = {2, 0, 2, 1};
         return sum(square(gather_rows(reshape(x, {3, 2}), rows)));
       }},
      {"clamp", [](Tape&, const Tensor& x) { return sum(square(clamp(x, -0.8, 0.8))); }},
      {"softmin", [](Tape&, const Tensor& x) {
         return sum(mul(softmin(x, 0.7), x));
       }},
  };
  for (const auto& [name, f] : cases) {
    CAPTURE(name);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> x(6);
      for (double& v : x) {
        v = u(rng);
        if (std::abs(v) < 1e-3 || std::abs(std::abs(v) - 0.8) < 1e-3) v += 0.01;
      }
      CHECK(gradcheck(f, x) < 1e-5);
    }
  }
}

TEST_CASE("gradcheck oracle examples") {
  const ScalarFn sq = [](Tape&, const Tensor& x) { return sum(square(x)); };
  CHECK(gradcheck(sq, std::vector<double>{2.0}) < 1e-8);

  // BCE of a one-hidden-layer net on a fixed input: softplus((2b - 1) L).
  const ScalarFn bce = [](Tape& t, const Tensor& p) {
    const Tensor in = t.leaf({1, 2}, {0.3, -0.8});
    const Tensor w1 = reshape(slice(p, 0, 6), {3, 2});
    const Tensor b1 = slice(p, 6, 3);
    const Tensor w2 = reshape(slice(p, 9, 3), {1, 3});
    const Tensor b2 = slice(p, 12, 1);
    const Var l(linear(tanh(linear(in, w1, b1)), w2, b2));
    // bit 1: softplus(L) = ln(1 + e^L)
    return ln(exp(l) + t.scalar(1.0));
  };
  std::vector<double> p(13);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (double& v : p) v = u(rng);
  CHECK(gradcheck(bce, p) < 1e-5);

  // At the relu kink the tape reports the 0 subgradient while central
  // differences see the average slope 1/2; the point is excluded by contract.
  const ScalarFn kink = [](Tape&, const Tensor& x) { return sum(relu(x)); };
  const GradcheckReport r = gradcheck_report(kink, std::vector<double>{0.0});
  CHECK(r.analytic[0] == 0.0);
  CHECK(r.numeric[0] == doctest::Approx(0.5));
}
