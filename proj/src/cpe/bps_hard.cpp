#include "gcs/cpe.hpp"
#include "gcs/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gcs {

BpsOutput bps_hard(std::span<const cplx> z, const Constellation& c, const BpsConfig& cfg) {
  cfg.validate();
  const std::size_t k_count = z.size();
  const std::size_t n = static_cast<std::size_t>(cfg.window);
  if (k_count < n) {
    throw InputError("BPS block of " + std::to_string(k_count) +
                     " symbols is shorter than the window of " + std::to_string(n));
  }
  const std::vector<double> angles = test_angles(cfg);
  const std::size_t b_count = angles.size();
  std::vector<double> cs(b_count), sn(b_count);
  for (std::size_t b = 0; b < b_count; ++b) {
    cs[b] = std::cos(angles[b]);
    sn[b] = std::sin(angles[b]);
  }
  const std::vector<double> pts = c.coordinates();
  const std::size_t m_count = c.size();

  // Per-symbol nearest-point distances, K x B.
  std::vector<double> dist(k_count * b_count);
  const auto kk = static_cast<std::ptrdiff_t>(k_count);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < kk; ++k) {
    const double zr = z[static_cast<std::size_t>(k)].real();
    const double zi = z[static_cast<std::size_t>(k)].imag();
    for (std::size_t b = 0; b < b_count; ++b) {
      const double u = zr * cs[b] + zi * sn[b];
      const double v = zi * cs[b] - zr * sn[b];
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_count; ++i) {
        const double du = u - pts[2 * i];
        const double dv = v - pts[2 * i + 1];
        best = std::min(best, du * du + dv * dv);
      }
      dist[static_cast<std::size_t>(k) * b_count + b] = best;
    }
  }

  // Running window sums via prefix sums along k, (K + 1) x B.
  std::vector<double> prefix((k_count + 1) * b_count, 0.0);
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t b = 0; b < b_count; ++b) {
      prefix[(k + 1) * b_count + b] = prefix[k * b_count + b] + dist[k * b_count + b];
    }
  }

  BpsOutput out;
  out.angle_index.resize(k_count);
  const std::ptrdiff_t lead = cfg.lead();
  const std::ptrdiff_t win = cfg.window;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < kk; ++k) {
    const auto lo = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, k - lead));
    const auto hi = static_cast<std::size_t>(std::min<std::ptrdiff_t>(kk, k - lead + win));
    int best_b = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < b_count; ++b) {
      const double metric = prefix[hi * b_count + b] - prefix[lo * b_count + b];
      if (metric < best) {
        best = metric;
        best_b = static_cast<int>(b);
      }
    }
    out.angle_index[static_cast<std::size_t>(k)] = best_b;
  }

  out.phase = unwrap_estimates(out.angle_index, angles, cfg.span_width(), &out.branch_changes);
  out.corrected.resize(k_count);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < kk; ++k) {
    const auto i = static_cast<std::size_t>(k);
    out.corrected[i] = z[i] * std::polar(1.0, -out.phase[i]);
  }
  return out;
}

}  // namespace gcs
