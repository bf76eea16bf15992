#include "gcs/error.hpp"
#include "gcs/training.hpp"

namespace gcs {

ChainBatch sample_batch(int m, std::size_t symbols, const ChannelParams& channel, Rng& rng,
                        double initial_phase) {
  ChainBatch batch;
  const std::size_t msize = std::size_t{1} << m;
  std::uniform_int_distribution<std::size_t> pick(0, msize - 1);
  batch.indices.resize(symbols);
  batch.bits.resize(symbols * static_cast<std::size_t>(m));
  for (std::size_t k = 0; k < symbols; ++k) {
    batch.indices[k] = pick(rng);
    const BitBlock b = index_to_bits(batch.indices[k], m);
    std::copy(b.begin(), b.end(), batch.bits.begin() + static_cast<std::ptrdiff_t>(k * b.size()));
  }
  batch.noise = sample_awgn(symbols, channel.sigma_n, rng);
  batch.phase = sample_wiener_phase(symbols, channel.sigma_phi, rng, initial_phase);
  return batch;
}

std::pair<std::size_t, std::size_t> interior_rows(std::size_t k_count, const BpsConfig& bps) {
  const auto edge = static_cast<std::size_t>(bps.window / 2);
  if (k_count <= 2 * edge) {
    throw InputError("block of " + std::to_string(k_count) +
                     " symbols leaves nothing outside the edge zones of " + std::to_string(edge));
  }
  return {edge, k_count - edge};
}

ad::Var chain_loss(const ad::Tensor& raw_points, const ad_ops::DemapperVars& demapper,
                   const NnDemapperModel& model, const ChainBatch& batch, const BpsConfig& bps,
                   Temperature temperature) {
  const ad::Tensor points = ad_ops::normalize_power(raw_points);
  const ad::Tensor x = ad_ops::map_symbols(points, batch.indices);
  const ad::Tensor z = ad_ops::apply_channel(x, batch.noise, batch.phase);
  const ad::Tensor corrected = ad_ops::bps_diff(z, points, bps, temperature);
  const ad::Tensor llr = ad_ops::nn_demap(corrected, demapper, model);
  const auto [lo, hi] = interior_rows(batch.indices.size(), bps);
  return ad_ops::bce_loss(llr, batch.bits, lo, hi);
}

ad::GradcheckReport gradcheck_chain(const MiniChainOptions& opts) {
  constexpr int m = 2;
  constexpr std::size_t symbols = 8;
  BpsConfig bps;
  bps.n_angles = 4;
  bps.window = 4;
  const ChannelParams channel = params_from(10.0, 2e6);

  Rng rng(opts.seed);
  const Constellation init = perturbed_square_qam(m, 0.05, rng);
  const NnDemapperModel model = NnDemapperModel::random(opts.layout, m, 4, opts.activation, rng);
  const ChainBatch batch = sample_batch(m, symbols, channel, rng, 0.1);
  const Temperature tau(opts.temperature);

  std::vector<double> x = init.coordinates();
  const std::size_t n_coords = x.size();
  const std::vector<double> params = model.parameters();
  x.insert(x.end(), params.begin(), params.end());

  const ad::ScalarFn f = [&](ad::Tape&, const ad::Tensor& flat) {
    const ad::Tensor raw = ad::reshape(ad::slice(flat, 0, n_coords), {n_coords / 2, 2});
    const ad_ops::DemapperVars vars = ad_ops::from_flat(flat, n_coords, model);
    return chain_loss(raw, vars, model, batch, bps, tau);
  };
  return ad::gradcheck_report(f, x, opts.step);
}

}  // namespace gcs
