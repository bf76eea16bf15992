#include "gcs/constellation.hpp"
#include "gcs/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>

using gcs::cplx;

namespace {

std::size_t hot_index(const std::vector<double>& onehot) {
  CHECK(std::count(onehot.begin(), onehot.end(), 1.0) == 1);
  CHECK(std::count(onehot.begin(), onehot.end(), 0.0) == static_cast<long>(onehot.size()) - 1);
  return static_cast<std::size_t>(std::find(onehot.begin(), onehot.end(), 1.0) - onehot.begin());
}

}  // namespace

TEST_CASE("bits_to_onehot uses b_1 as the most significant bit") {
  CHECK(hot_index(gcs::bits_to_onehot(gcs::BitBlock{0, 0}, 2)) == 0);
  CHECK(hot_index(gcs::bits_to_onehot(gcs::BitBlock{1, 0}, 2)) == 2);
  CHECK(hot_index(gcs::bits_to_onehot(gcs::BitBlock{1, 1, 1, 1, 1, 1}, 6)) == 63);
  CHECK_THROWS_AS(gcs::bits_to_onehot(gcs::BitBlock{1, 0, 1}, 2), gcs::ShapeError);
}

TEST_CASE("bits -> one-hot -> index -> bits round trip is exhaustive") {
  for (int m = 1; m <= 6; ++m) {
    for (std::size_t i = 0; i < (std::size_t{1} << m); ++i) {
      const gcs::BitBlock bits = gcs::index_to_bits(i, m);
      CHECK(bits.size() == static_cast<std::size_t>(m));
      const std::size_t hot = hot_index(gcs::bits_to_onehot(bits, m));
      CHECK(hot == i);
      CHECK(gcs::bits_to_index(bits) == i);
      CHECK(gcs::index_to_bits(hot, m) == bits);
    }
  }
}

TEST_CASE("map_symbol is the one-hot dot product") {
  gcs::Rng rng(2);
  const gcs::Constellation c = gcs::perturbed_square_qam(4, 0.3, rng);
  std::vector<double> e0(16, 0.0);
  e0[0] = 1.0;
  CHECK(gcs::map_symbol(e0, c) == c.point(0));

  const gcs::Constellation qam = gcs::square_qam(6);
  const cplx corner = gcs::map_symbol(gcs::bits_to_onehot(gcs::BitBlock{1, 1, 1, 1, 1, 1}, 6), qam);
  CHECK(corner == qam.point(63));
  // Gray index 63 -> binary 5 on both axes -> amplitude 2*5 - 7 = 3 on a 7-scaled grid.
  const double scale = 1.0 / std::sqrt(42.0);
  CHECK(std::abs(corner.real()) == doctest::Approx(3 * scale).epsilon(1e-12));
  CHECK(std::abs(corner.imag()) == doctest::Approx(3 * scale).epsilon(1e-12));
}

TEST_CASE("map_symbols is linear in the points and routes gradients to the hot row") {
  gcs::Rng rng(9);
  const gcs::Constellation a = gcs::perturbed_square_qam(4, 0.5, rng);
  const gcs::Constellation b = gcs::perturbed_square_qam(4, 0.5, rng);
  const double lam = 0.3;
  std::vector<cplx> mix(16);
  for (std::size_t i = 0; i < 16; ++i) mix[i] = lam * a.point(i) + (1 - lam) * b.point(i);
  const gcs::Constellation cm(4, mix);
  for (std::size_t i = 0; i < 16; ++i) {
    const auto e = gcs::bits_to_onehot(gcs::index_to_bits(i, 4), 4);
    const cplx lhs = gcs::map_symbol(e, cm);
    const cplx rhs = lam * gcs::map_symbol(e, a) + (1 - lam) * gcs::map_symbol(e, b);
    CHECK(std::abs(lhs - rhs) < 1e-15);
  }

  gcs::ad::Tape t;
  const gcs::ad::Tensor pts = t.leaf({16, 2}, a.coordinates());
  const std::size_t idx[] = {5};
  const gcs::ad::Tensor x = gcs::ad_ops::map_symbols(pts, idx);
  t.backward(gcs::ad::Var(gcs::ad::column(x, 0)));
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(pts.grad(i, 0) == (i == 5 ? 1.0 : 0.0));
    CHECK(pts.grad(i, 1) == 0.0);
  }
}

TEST_CASE("normalize_power") {
  std::vector<cplx> pts;
  for (int i = 0; i < 8; ++i) pts.push_back(std::polar(2.0, 0.3 * i));
  const gcs::Constellation c = gcs::normalize_power(gcs::Constellation(3, pts));
  for (cplx p : c.points()) CHECK(std::abs(p) == doctest::Approx(1.0).epsilon(1e-14));

  const gcs::Constellation again = gcs::normalize_power(c);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(again.point(i) - c.point(i)) < 1e-12);

  gcs::Rng rng(4);
  std::normal_distribution<double> n(0.0, 3.0);
  std::vector<cplx> random(64);
  for (cplx& p : random) p = {n(rng), n(rng)};
  const gcs::Constellation r = gcs::normalize_power(gcs::Constellation(6, random));
  double power = 0;
  for (cplx p : r.points()) power += std::norm(p);
  CHECK(std::abs(power / 64 - 1.0) < 1e-9);

  CHECK_THROWS_AS(gcs::normalize_power(gcs::Constellation(2, std::vector<cplx>(4))),
                  gcs::DegenerateInputError);
}

TEST_CASE("normalize_power on the tape matches the plain version and finite differences") {
  gcs::Rng rng(12);
  const gcs::Constellation c = gcs::perturbed_square_qam(4, 0.2, rng);
  gcs::ad::Tape t;
  const gcs::ad::Tensor pts = t.leaf({16, 2}, c.coordinates());
  const gcs::ad::Tensor n = gcs::ad_ops::normalize_power(pts);
  const auto ref = gcs::normalize_power(c).coordinates();
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(n.values()[i] == doctest::Approx(ref[i]).epsilon(1e-14));

  const std::vector<double> w{0.3, -1.1, 2.0, 0.5};
  const gcs::ad::ScalarFn f = [&](gcs::ad::Tape& tape, const gcs::ad::Tensor& x) {
    const auto np = gcs::ad_ops::normalize_power(gcs::ad::reshape(x, {16, 2}));
    const auto probe = tape.leaf({2, 2}, w);
    return gcs::ad::sum(gcs::ad::square(gcs::ad::matmul(gcs::ad::gather_rows(np, std::vector<std::size_t>{3, 9}), probe)));
  };
  CHECK(gcs::ad::gradcheck(f, c.coordinates()) < 1e-6);
}

TEST_CASE("square_qam geometry and labelling") {
  const gcs::Constellation qpsk = gcs::square_qam(2);
  for (cplx p : qpsk.points()) {
    CHECK(std::abs(std::abs(p.real()) - 1 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(std::abs(p.imag()) - 1 / std::sqrt(2.0)) < 1e-15);
  }

  const gcs::Constellation q16 = gcs::square_qam(4);
  const double unit = 1 / std::sqrt(10.0);
  for (cplx p : q16.points()) {
    const double a = p.real() / unit;
    CHECK(std::min({std::abs(a - 3), std::abs(a - 1), std::abs(a + 1), std::abs(a + 3)}) < 1e-12);
  }

  for (int m : {2, 4, 6, 8}) {
    const gcs::Constellation q = gcs::square_qam(m);
    CHECK(std::abs(q.average_power() - 1.0) < 1e-12);
    // Exhaustive neighbour check: points one grid step apart differ in one bit.
    double step = 1e300;
    for (std::size_t i = 0; i < q.size(); ++i) {
      for (std::size_t j = i + 1; j < q.size(); ++j) step = std::min(step, std::abs(q.point(i) - q.point(j)));
    }
    int pairs = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      for (std::size_t j = i + 1; j < q.size(); ++j) {
        if (std::abs(std::abs(q.point(i) - q.point(j)) - step) < 1e-9) {
          ++pairs;
          CHECK(std::popcount(i ^ j) == 1);
        }
      }
    }
    const int side = 1 << (m / 2);
    CHECK(pairs == 2 * side * (side - 1));
  }

  // In-phase amplitude depends only on the first m/2 bits.
  const gcs::Constellation q64 = gcs::square_qam(6);
  for (std::size_t i = 0; i < 64; ++i) {
    for (std::size_t j = 0; j < 64; ++j) {
      if ((i >> 3) == (j >> 3)) CHECK(q64.point(i).real() == q64.point(j).real());
      if ((i & 7) == (j & 7)) CHECK(q64.point(i).imag() == q64.point(j).imag());
    }
  }

  CHECK_THROWS_AS(gcs::square_qam(3), gcs::ParameterError);
  CHECK_THROWS_AS(gcs::square_qam(0), gcs::ParameterError);
}

TEST_CASE("gray code helpers invert each other") {
  for (std::uint32_t v = 0; v < 4096; ++v) {
    CHECK(gcs::gray_decode(gcs::gray_encode(v)) == v);
    if (v > 0) CHECK(std::popcount(gcs::gray_encode(v) ^ gcs::gray_encode(v - 1)) == 1);
  }
}

TEST_CASE("perturbed_square_qam is seeded and not renormalised") {
  gcs::Rng a(77), b(77);
  const auto ca = gcs::perturbed_square_qam(6, 0.01, a);
  const auto cb = gcs::perturbed_square_qam(6, 0.01, b);
  CHECK(ca.coordinates() == cb.coordinates());
  const auto base = gcs::square_qam(6);
  double worst = 0;
  for (std::size_t i = 0; i < 64; ++i) worst = std::max(worst, std::abs(ca.point(i) - base.point(i)));
  CHECK(worst > 0.0);
  CHECK(worst < 0.06);
}

TEST_CASE("constellation TSV round trip") {
  gcs::Rng rng(31);
  const auto c = gcs::normalize_power(gcs::perturbed_square_qam(6, 0.1, rng));
  const std::string text = gcs::to_tsv(c);
  CHECK(text.rfind("re\tim\tlabel\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 65);
  CHECK(text.find("\t101101\n") != std::string::npos);
  const auto back = gcs::from_tsv(text);
  CHECK(back.bits_per_symbol() == 6);
  CHECK(back.coordinates() == c.coordinates());
  CHECK(gcs::to_tsv(back) == text);
  CHECK_THROWS_AS(gcs::from_tsv("re\tim\tlabel\n0.1\t0.2\t01\n"), gcs::InputError);
}
