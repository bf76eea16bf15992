#include "gcs/channel.hpp"

#include "gcs/error.hpp"

#include <cmath>
#include <numbers>

namespace gcs {

ChannelParams params_from(double snr_db, double linewidth_hz, double symbol_rate_baud) {
  if (!(symbol_rate_baud > 0.0)) throw ParameterError("symbol rate must be positive");
  if (linewidth_hz < 0.0) throw ParameterError("laser linewidth must be non-negative");
  if (!std::isfinite(snr_db)) throw ParameterError("SNR must be finite");
  ChannelParams p;
  p.snr_db = snr_db;
  p.linewidth_hz = linewidth_hz;
  p.symbol_rate_baud = symbol_rate_baud;
  p.sigma_n = std::sqrt(std::pow(10.0, -snr_db / 10.0));
  p.sigma_phi = std::sqrt(2.0 * std::numbers::pi * linewidth_hz / symbol_rate_baud);
  return p;
}

SymbolBlock sample_awgn(std::size_t count, double sigma_n, Rng& rng) {
  if (sigma_n < 0.0) throw ParameterError("noise deviation must be non-negative");
  SymbolBlock n(count);
  if (sigma_n == 0.0) return n;
  std::normal_distribution<double> gauss(0.0, sigma_n / std::numbers::sqrt2);
  for (cplx& v : n) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v = {re, im};
  }
  return n;
}

std::vector<double> sample_wiener_phase(std::size_t count, double sigma_phi, Rng& rng,
                                        double initial_phase) {
  if (sigma_phi < 0.0) throw ParameterError("phase increment deviation must be non-negative");
  std::vector<double> phi(count, initial_phase);
  if (count == 0 || sigma_phi == 0.0) return phi;
  std::normal_distribution<double> gauss(0.0, sigma_phi);
  for (std::size_t k = 1; k < count; ++k) phi[k] = phi[k - 1] + gauss(rng);
  return phi;
}

SymbolBlock awgn(std::span<const cplx> x, double sigma_n, Rng& rng) {
  SymbolBlock y = sample_awgn(x.size(), sigma_n, rng);
  for (std::size_t k = 0; k < x.size(); ++k) y[k] += x[k];
  return y;
}

PhaseNoiseOutput wiener_phase(std::span<const cplx> x, double sigma_phi, Rng& rng,
                              double initial_phase) {
  PhaseNoiseOutput out;
  out.phase = sample_wiener_phase(x.size(), sigma_phi, rng, initial_phase);
  out.symbols.resize(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out.symbols[k] = x[k] * std::polar(1.0, out.phase[k]);
  return out;
}

namespace ad_ops {

ad::Tensor apply_channel(const ad::Tensor& x, std::span<const cplx> noise,
                         std::span<const double> phase) {
  const std::size_t k_count = x.rows();
  if (x.cols() != 2 || noise.size() != k_count || phase.size() != k_count) {
    throw ShapeError("apply_channel: expected K x 2 symbols with K noise and phase samples");
  }
  ad::Tape& tape = x.tape();
  const auto& xv = tape.value_of(x);
  std::vector<double> cs(2 * k_count);
  std::vector<double> out(2 * k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const double c = std::cos(phase[k]);
    const double s = std::sin(phase[k]);
    cs[2 * k] = c;
    cs[2 * k + 1] = s;
    const double re = xv[2 * k] + noise[k].real();
    const double im = xv[2 * k + 1] + noise[k].imag();
    out[2 * k] = c * re - s * im;
    out[2 * k + 1] = s * re + c * im;
  }
  return tape.record("apply_channel", x.shape(), std::move(out),
                     [x, cs = std::move(cs)](const ad::Tensor& self) {
    ad::Tape& t = self.tape();
    const auto& g = t.grad_of(self);
    auto& gx = t.grad_of(x);
    for (std::size_t k = 0; k < g.size() / 2; ++k) {
      const double c = cs[2 * k], s = cs[2 * k + 1];
      gx[2 * k] += c * g[2 * k] + s * g[2 * k + 1];
      gx[2 * k + 1] += -s * g[2 * k] + c * g[2 * k + 1];
    }
  });
}

}  // namespace ad_ops

}  // namespace gcs
