#include "gcs/cpe.hpp"
#include "gcs/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gcs {

BpsOutput bps_hard_reference(std::span<const cplx> z, const Constellation& c,
                             const BpsConfig& cfg) {
  cfg.validate();
  const std::size_t k_count = z.size();
  if (k_count < static_cast<std::size_t>(cfg.window)) {
    throw InputError("BPS block is shorter than the window");
  }
  const std::vector<double> angles = test_angles(cfg);
  const std::size_t b_count = angles.size();

  std::vector<double> dist(k_count * b_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t b = 0; b < b_count; ++b) {
      const cplx r = z[k] * std::polar(1.0, -angles[b]);
      double best = std::numeric_limits<double>::infinity();
      for (const cplx& p : c.points()) best = std::min(best, std::norm(r - p));
      dist[k * b_count + b] = best;
    }
  }

  BpsOutput out;
  out.angle_index.resize(k_count);
  const long long kk = static_cast<long long>(k_count);
  for (long long k = 0; k < kk; ++k) {
    const long long lo = std::max(0LL, k - cfg.lead());
    const long long hi = std::min(kk, k - cfg.lead() + cfg.window);
    int best_b = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < b_count; ++b) {
      double metric = 0.0;
      for (long long j = lo; j < hi; ++j) metric += dist[static_cast<std::size_t>(j) * b_count + b];
      if (metric < best) {
        best = metric;
        best_b = static_cast<int>(b);
      }
    }
    out.angle_index[static_cast<std::size_t>(k)] = best_b;
  }

  out.phase = unwrap_estimates(out.angle_index, angles, cfg.span_width(), &out.branch_changes);
  out.corrected.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) out.corrected[k] = z[k] * std::polar(1.0, -out.phase[k]);
  return out;
}

}  // namespace gcs
