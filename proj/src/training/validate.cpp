#include "gcs/error.hpp"
#include "gcs/training.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace gcs {
namespace {

// Gaussian demapping on a noiseless channel uses this vanishing N0.
constexpr double kMinN0 = 1e-12;

double interior_bmi(std::span<const cplx> y, const Receiver& rx, double n0,
                    std::span<const std::uint8_t> bits, std::size_t lo, std::size_t hi) {
  const auto m = static_cast<std::size_t>(rx.constellation.bits_per_symbol());
  const auto inner = y.subspan(lo, hi - lo);
  std::vector<double> llr(inner.size() * m);
  if (rx.demapper) {
    nn_llr_batch(inner, *rx.demapper, llr);
  } else {
    logmap_llr_batch(inner, rx.constellation, n0, llr);
  }
  return bmi(llr, bits.subspan(lo * m, (hi - lo) * m), static_cast<int>(m));
}

}  // namespace

Rng seed_stream(std::uint64_t master, std::uint64_t seed_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(seed_index),
                    static_cast<std::uint32_t>(seed_index >> 32)};
  return Rng(seq);
}

ValidationResult validate(const Receiver& rx, const ChannelParams& channel, const BpsConfig& bps,
                          const ValidationOptions& opts) {
  bps.validate();
  const int m = rx.constellation.bits_per_symbol();
  if (m < 1) throw ParameterError("receiver has no constellation");
  if (rx.demapper && rx.demapper->bits_per_symbol() != m) {
    throw ParameterError("demapper and constellation disagree on m");
  }
  if (opts.n_seeds < 2) throw ParameterError("validation needs at least 2 seeds");
  if (opts.n_symbols < 10 * static_cast<std::size_t>(bps.window)) {
    throw ParameterError("n_symbols must be at least 10 BPS windows");
  }
  const auto rows = interior_rows(opts.n_symbols, bps);
  const std::size_t lo = rows.first;
  const std::size_t hi = rows.second;
  const double period = bps.span_width();
  const double quarter = std::numbers::pi / 2.0;
  const double n0 = std::max(channel.n0(), kMinN0);

  ValidationResult result;
  result.seeds.resize(static_cast<std::size_t>(opts.n_seeds));
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < opts.n_seeds; ++s) {
    Rng rng = seed_stream(opts.seed, static_cast<std::uint64_t>(s));
    std::uniform_real_distribution<double> start(-std::numbers::pi / 4.0, std::numbers::pi / 4.0);
    const double phi0 = start(rng);
    const ChainBatch batch = sample_batch(m, opts.n_symbols, channel, rng, phi0);

    SymbolBlock z(opts.n_symbols);
    for (std::size_t k = 0; k < z.size(); ++k) {
      z[k] = (rx.constellation.point(batch.indices[k]) + batch.noise[k]) *
             std::polar(1.0, batch.phase[k]);
    }

    SeedResult& out = result.seeds[static_cast<std::size_t>(s)];
    SymbolBlock corrected;
    if (opts.recovery == PhaseRecovery::Genie) {
      corrected.resize(z.size());
      for (std::size_t k = 0; k < z.size(); ++k) corrected[k] = z[k] * std::polar(1.0, -batch.phase[k]);
    } else {
      BpsOutput est = bps_hard(z, rx.constellation, bps);
      out.branch_changes = est.branch_changes;
      long long prev = 0;
      for (std::size_t k = lo; k < hi; ++k) {
        const auto offset = std::llround((est.phase[k] - batch.phase[k]) / period);
        if (k > lo && offset != prev) ++out.slips;
        prev = offset;
      }
      corrected = std::move(est.corrected);
    }

    out.bmi = interior_bmi(corrected, rx, n0, batch.bits, lo, hi);
    out.best_rotation_bmi = out.bmi;
    for (int r = 1; r < 4; ++r) {
      const cplx turn = std::polar(1.0, quarter * r);
      SymbolBlock rotated(corrected);
      for (cplx& v : rotated) v *= turn;
      out.best_rotation_bmi =
          std::max(out.best_rotation_bmi, interior_bmi(rotated, rx, n0, batch.bits, lo, hi));
    }
  }

  const auto n = static_cast<double>(opts.n_seeds);
  double sum = 0.0, best = 0.0;
  for (const SeedResult& r : result.seeds) {
    sum += r.bmi;
    best += r.best_rotation_bmi;
  }
  result.mean = sum / n;
  result.best_rotation_mean = best / n;
  double ss = 0.0;
  for (const SeedResult& r : result.seeds) ss += (r.bmi - result.mean) * (r.bmi - result.mean);
  result.stddev = std::sqrt(ss / (n - 1.0));
  return result;
}

}  // namespace gcs
