#include "gcs/demapper.hpp"
#include "gcs/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gcs {
namespace {

void check_n0(double n0) {
  if (!(n0 > 0.0) || !std::isfinite(n0)) throw ParameterError("N0 must be positive and finite");
}

// Writes m clamped LLRs for one symbol. `scratch` holds M exponents.
void logmap_one(cplx y, const Constellation& c, double n0, std::span<double> scratch,
                std::span<double> out) {
  const std::size_t m_count = c.size();
  const int m = c.bits_per_symbol();
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m_count; ++j) {
    scratch[j] = -std::norm(y - c.point(j)) / n0;
    peak = std::max(peak, scratch[j]);
  }
  for (std::size_t j = 0; j < m_count; ++j) scratch[j] = std::exp(scratch[j] - peak);
  for (int pos = 0; pos < m; ++pos) {
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t j = 0; j < m_count; ++j) {
      if (c.bit(j, pos)) {
        s1 += scratch[j];
      } else {
        s0 += scratch[j];
      }
    }
    double llr;
    if (s1 == 0.0) {
      llr = kLlrClamp;
    } else if (s0 == 0.0) {
      llr = -kLlrClamp;
    } else {
      llr = std::clamp(std::log(s0) - std::log(s1), -kLlrClamp, kLlrClamp);
    }
    out[static_cast<std::size_t>(pos)] = llr;
  }
}

void check_batch(std::span<const cplx> y, const Constellation& c, std::span<double> out) {
  if (out.size() != y.size() * static_cast<std::size_t>(c.bits_per_symbol())) {
    throw ShapeError("LLR output buffer must hold K x m values");
  }
}

}  // namespace

LlrVector logmap_llr(cplx y, const Constellation& c, double n0) {
  check_n0(n0);
  std::vector<double> scratch(c.size());
  LlrVector out(static_cast<std::size_t>(c.bits_per_symbol()));
  logmap_one(y, c, n0, scratch, out);
  return out;
}

void logmap_llr_batch(std::span<const cplx> y, const Constellation& c, double n0,
                      std::span<double> out) {
  check_n0(n0);
  check_batch(y, c, out);
  const auto m = static_cast<std::size_t>(c.bits_per_symbol());
  const auto kk = static_cast<std::ptrdiff_t>(y.size());
#pragma omp parallel
  {
    std::vector<double> scratch(c.size());
#pragma omp for schedule(static)
    for (std::ptrdiff_t ks = 0; ks < kk; ++ks) {
      const auto k = static_cast<std::size_t>(ks);
      logmap_one(y[k], c, n0, scratch, out.subspan(k * m, m));
    }
  }
}

void logmap_llr_batch_reference(std::span<const cplx> y, const Constellation& c, double n0,
                                std::span<double> out) {
  check_n0(n0);
  check_batch(y, c, out);
  const auto m = static_cast<std::size_t>(c.bits_per_symbol());
  for (std::size_t k = 0; k < y.size(); ++k) {
    const LlrVector l = logmap_llr(y[k], c, n0);
    std::copy(l.begin(), l.end(), out.begin() + static_cast<std::ptrdiff_t>(k * m));
  }
}

}  // namespace gcs
