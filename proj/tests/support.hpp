#pragma once

#include "gcs/cpe.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace gcs::testing {

// Brute-force hard BPS margins: for each symbol, the gap between the smallest
// and second smallest windowed distance sum over the test angles.
inline std::vector<double> hard_bps_margins(std::span<const cplx> z, const Constellation& c,
                                            const BpsConfig& cfg) {
  const auto angles = test_angles(cfg);
  const long long kk = static_cast<long long>(z.size());
  std::vector<std::vector<double>> d(z.size(), std::vector<double>(angles.size()));
  for (std::size_t k = 0; k < z.size(); ++k) {
    for (std::size_t b = 0; b < angles.size(); ++b) {
      double best = std::numeric_limits<double>::infinity();
      for (const cplx& p : c.points()) best = std::min(best, std::norm(z[k] * std::polar(1.0, -angles[b]) - p));
      d[k][b] = best;
    }
  }
  std::vector<double> margin(z.size());
  for (long long k = 0; k < kk; ++k) {
    std::vector<double> sums(angles.size(), 0.0);
    const long long lo = std::max(0LL, k - cfg.lead());
    const long long hi = std::min(kk, k - cfg.lead() + cfg.window);
    for (long long j = lo; j < hi; ++j)
      for (std::size_t b = 0; b < angles.size(); ++b) sums[b] += d[static_cast<std::size_t>(j)][b];
    std::partial_sort(sums.begin(), sums.begin() + 2, sums.end());
    margin[static_cast<std::size_t>(k)] = sums[1] - sums[0];
  }
  return margin;
}

}  // namespace gcs::testing
