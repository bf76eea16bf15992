#pragma once

// Carrier phase estimation by blind phase search (BPS).
//
// Hard BPS: for each symbol k and test angle phi_b the squared distance of
// z_k e^{-j phi_b} to the nearest constellation point is summed over a
// window of N neighbours; the angle with the smallest sum wins and the
// estimates are unwrapped across k.
//
// Differentiable BPS replaces both minima with temperature-controlled soft
// minima: the per-symbol distance is the smooth minimum
//   d = -T ln sum_i exp(-|r - c_i|^2 / T),
// and the output is the softmin-weighted mix of the rotated candidates
//   x_k = sum_b w_{k,b} z_k e^{-j phi_b},  w_{k,.} = softmin(D_{k,.}, T).

#include "gcs/channel.hpp"
#include "gcs/constellation.hpp"
#include "gcs/numerics.hpp"

#include <span>
#include <string>
#include <vector>

namespace gcs {

enum class AngleSpan {
  Quadrant,  // [-pi/4, pi/4), period pi/2
  Full,      // [-pi, pi), period 2 pi
};

std::string to_string(AngleSpan span);  // "quadrant" | "full"
AngleSpan parse_angle_span(const std::string& s);

struct BpsConfig {
  int n_angles = 60;
  int window = 120;
  AngleSpan span = AngleSpan::Quadrant;

  void validate() const;
  double span_begin() const;
  double span_width() const;
  double grid_step() const { return span_width() / n_angles; }
  // Offsets of the averaging window relative to k: [k - lead, k - lead + window - 1].
  int lead() const { return window / 2; }
};

class Temperature {
 public:
  explicit Temperature(double value);
  double value() const { return value_; }

 private:
  double value_;
};

std::vector<double> test_angles(const BpsConfig& cfg);

// Geometric schedule from 1.0 at step 0 to 0.001 at step == total_steps.
Temperature anneal(int step, int total_steps);

struct BpsOutput {
  SymbolBlock corrected;
  std::vector<double> phase;      // unwrapped estimate per symbol
  std::vector<int> angle_index;   // raw argmin over test angles
  std::size_t branch_changes = 0; // times unwrapping moved to another period
};

// OpenMP kernel.
BpsOutput bps_hard(std::span<const cplx> z, const Constellation& c, const BpsConfig& cfg);
// Serial reference with direct window sums; kept for testing the kernel.
BpsOutput bps_hard_reference(std::span<const cplx> z, const Constellation& c,
                             const BpsConfig& cfg);

// Greedy nearest-branch continuation of raw grid estimates.
std::vector<double> unwrap_estimates(std::span<const int> angle_index,
                                     std::span<const double> angles, double period,
                                     std::size_t* branch_changes = nullptr);

struct SoftBpsOutput {
  SymbolBlock corrected;
  std::vector<double> weights;     // K x B row-major
  std::vector<int> dominant_index; // argmax_b w_{k,b}
};

// Differentiable BPS evaluated without a tape.
SoftBpsOutput bps_diff_eval(std::span<const cplx> z, const Constellation& c,
                            const BpsConfig& cfg, Temperature temperature);

namespace ad_ops {

// Differentiable BPS on a tape; z is K x 2, points is M x 2. Result is K x 2.
ad::Tensor bps_diff(const ad::Tensor& z, const ad::Tensor& points, const BpsConfig& cfg,
                    Temperature temperature);

}  // namespace ad_ops

}  // namespace gcs
