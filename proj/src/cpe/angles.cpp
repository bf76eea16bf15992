#include "gcs/cpe.hpp"
#include "gcs/error.hpp"

#include <cmath>
#include <numbers>

namespace gcs {

std::string to_string(AngleSpan span) { return span == AngleSpan::Quadrant ? "quadrant" : "full"; }

AngleSpan parse_angle_span(const std::string& s) {
  if (s == "quadrant") return AngleSpan::Quadrant;
  if (s == "full") return AngleSpan::Full;
  throw ParameterError("unknown angle_span '" + s + "' (expected quadrant|full)");
}

void BpsConfig::validate() const {
  if (n_angles < 2) throw ParameterError("BPS needs at least 2 test angles");
  if (window < 1) throw ParameterError("BPS window must be at least 1");
}

double BpsConfig::span_begin() const {
  return span == AngleSpan::Quadrant ? -std::numbers::pi / 4 : -std::numbers::pi;
}

double BpsConfig::span_width() const {
  return span == AngleSpan::Quadrant ? std::numbers::pi / 2 : 2 * std::numbers::pi;
}

Temperature::Temperature(double value) : value_(value) {
  if (!(value > 0.0) || value > 1.0) {
    throw ParameterError("temperature must lie in (0, 1], got " + std::to_string(value));
  }
}

std::vector<double> test_angles(const BpsConfig& cfg) {
  cfg.validate();
  std::vector<double> angles(static_cast<std::size_t>(cfg.n_angles));
  // Both spans are symmetric about 0; this form puts the zero angle exactly on 0.
  const double half_step = cfg.grid_step() / 2.0;
  for (std::size_t b = 0; b < angles.size(); ++b) {
    angles[b] = (2.0 * static_cast<double>(b) - cfg.n_angles) * half_step;
  }
  return angles;
}

Temperature anneal(int step, int total_steps) {
  if (total_steps < 1) throw ParameterError("anneal: total_steps must be >= 1");
  if (step < 0 || step > total_steps) throw ParameterError("anneal: step out of range");
  if (step == total_steps) return Temperature(0.001);
  const double frac = static_cast<double>(step) / total_steps;
  return Temperature(std::pow(0.001, frac));
}

std::vector<double> unwrap_estimates(std::span<const int> angle_index,
                                     std::span<const double> angles, double period,
                                     std::size_t* branch_changes) {
  std::vector<double> phase(angle_index.size());
  std::size_t changes = 0;
  long long branch = 0;
  for (std::size_t k = 0; k < angle_index.size(); ++k) {
    const double raw = angles[static_cast<std::size_t>(angle_index[k])];
    if (k == 0) {
      phase[k] = raw;
      continue;
    }
    const long long next = std::llround((phase[k - 1] - raw) / period);
    if (next != branch) ++changes;
    branch = next;
    phase[k] = raw + static_cast<double>(branch) * period;
  }
  if (branch_changes) *branch_changes = changes;
  return phase;
}

}  // namespace gcs
