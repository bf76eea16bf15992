#include "gcs/error.hpp"
#include "gcs/training.hpp"

#include <cmath>
#include <numbers>

namespace gcs {
namespace {

// softplus(x) = ln(1 + e^x)
inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_shapes(std::size_t n_llr, std::size_t n_bits, int m) {
  if (m < 1 || n_llr != n_bits || n_llr % static_cast<std::size_t>(m) != 0) {
    throw ShapeError("LLR and bit batches must both be K x m");
  }
  if (n_llr == 0) throw ShapeError("empty LLR batch");
}

}  // namespace

double bce_loss(std::span<const double> llrs, std::span<const std::uint8_t> bits, int m) {
  check_shapes(llrs.size(), bits.size(), m);
  double acc = 0.0;
  for (std::size_t i = 0; i < llrs.size(); ++i) {
    const double sign = bits[i] ? 1.0 : -1.0;
    acc += softplus(sign * llrs[i]);
  }
  return acc / static_cast<double>(llrs.size());
}

double bmi_from_loss(double loss_nats, int m) { return m * (1.0 - loss_nats / std::numbers::ln2); }

double bmi(std::span<const double> llrs, std::span<const std::uint8_t> bits, int m) {
  return bmi_from_loss(bce_loss(llrs, bits, m), m);
}

namespace ad_ops {

ad::Var bce_loss(const ad::Tensor& llrs, std::span<const std::uint8_t> bits,
                 std::size_t row_begin, std::size_t row_end) {
  const std::size_t m = llrs.cols();
  if (bits.size() != llrs.size()) throw ShapeError("bce_loss: bits must match the LLR shape");
  if (!(row_begin < row_end) || row_end > llrs.rows()) throw ShapeError("bce_loss: bad row range");
  ad::Tape& tape = llrs.tape();
  const auto& l = tape.value_of(llrs);
  const std::size_t first = row_begin * m, last = row_end * m;
  const double count = static_cast<double>(last - first);
  double acc = 0.0;
  for (std::size_t i = first; i < last; ++i) acc += softplus((bits[i] ? 1.0 : -1.0) * l[i]);
  std::vector<std::uint8_t> used(bits.begin() + static_cast<std::ptrdiff_t>(first),
                                 bits.begin() + static_cast<std::ptrdiff_t>(last));
  return ad::Var(tape.record("bce_loss", {1, 1}, {acc / count},
                             [llrs, first, count, used = std::move(used)](const ad::Tensor& self) {
    ad::Tape& t = self.tape();
    const double g = t.grad_of(self)[0] / count;
    const auto& l = t.value_of(llrs);
    auto& gl = t.grad_of(llrs);
    for (std::size_t i = 0; i < used.size(); ++i) {
      const double sign = used[i] ? 1.0 : -1.0;
      gl[first + i] += g * sign * sigmoid(sign * l[first + i]);
    }
  }));
}

}  // namespace ad_ops

}  // namespace gcs
