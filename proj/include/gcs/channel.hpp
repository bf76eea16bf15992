#pragma once

#include "gcs/constellation.hpp"
#include "gcs/numerics.hpp"

#include <span>
#include <vector>

namespace gcs {

using SymbolBlock = std::vector<cplx>;

inline constexpr double kDefaultSymbolRate = 32e9;

// SNR is Es/N0 with Es = 1; sigma_n is the total complex noise deviation and
// sigma_phi the standard deviation of the per-symbol Wiener phase increment.
struct ChannelParams {
  double snr_db = 17.0;
  double linewidth_hz = 100e3;
  double symbol_rate_baud = kDefaultSymbolRate;
  double sigma_n = 0.0;
  double sigma_phi = 0.0;

  double n0() const { return sigma_n * sigma_n; }
};

ChannelParams params_from(double snr_db, double linewidth_hz,
                          double symbol_rate_baud = kDefaultSymbolRate);

// Circularly symmetric complex Gaussian samples with total variance sigma_n^2.
SymbolBlock sample_awgn(std::size_t count, double sigma_n, Rng& rng);

// Wiener phase track phi_0 = initial_phase, phi_k = phi_{k-1} + N(0, sigma_phi^2).
std::vector<double> sample_wiener_phase(std::size_t count, double sigma_phi, Rng& rng,
                                        double initial_phase = 0.0);

SymbolBlock awgn(std::span<const cplx> x, double sigma_n, Rng& rng);

struct PhaseNoiseOutput {
  SymbolBlock symbols;
  std::vector<double> phase;
};

PhaseNoiseOutput wiener_phase(std::span<const cplx> x, double sigma_phi, Rng& rng,
                              double initial_phase = 0.0);

namespace ad_ops {

// (x_k + n_k) e^{j phi_k} for a K x 2 symbol tensor with constant noise and
// phase; differentiable with respect to x.
ad::Tensor apply_channel(const ad::Tensor& x, std::span<const cplx> noise,
                         std::span<const double> phase);

}  // namespace ad_ops

}  // namespace gcs
