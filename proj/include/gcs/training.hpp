#pragma once

#include "gcs/channel.hpp"
#include "gcs/constellation.hpp"
#include "gcs/cpe.hpp"
#include "gcs/demapper.hpp"
#include "gcs/numerics.hpp"
#include "gcs/text_io.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gcs {

// ---------------------------------------------------------------------------
// Loss and metric

// Mean over symbols and bit positions of softplus((2b - 1) L), in nats per
// bit. llrs and bits are K x m row-major.
double bce_loss(std::span<const double> llrs, std::span<const std::uint8_t> bits, int m);

// m (1 - loss / ln 2), bits per symbol.
double bmi_from_loss(double loss_nats, int m);
double bmi(std::span<const double> llrs, std::span<const std::uint8_t> bits, int m);

namespace ad_ops {

// Mean BCE over rows [row_begin, row_end) of a K x m LLR tensor.
ad::Var bce_loss(const ad::Tensor& llrs, std::span<const std::uint8_t> bits,
                 std::size_t row_begin, std::size_t row_end);

}  // namespace ad_ops

// ---------------------------------------------------------------------------
// Optimiser

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam(std::size_t n_params, double learning_rate, AdamConfig cfg = {});
  void step(std::span<double> params, std::span<const double> grads);
  long long steps_taken() const { return t_; }

 private:
  double lr_;
  AdamConfig cfg_;
  std::vector<double> m_, v_;
  long long t_ = 0;
};

// ---------------------------------------------------------------------------
// Differentiable chain

struct TrainConfig {
  int m = 6;
  int steps = 2000;
  int batch_symbols = 1024;
  double learning_rate = 1e-2;
  std::uint64_t seed = 1;
  ChannelParams channel = params_from(17.0, 100e3);
  BpsConfig bps;
  Layout layout = Layout::Separated;
  int hidden = 8;
  Activation activation = Activation::Relu;
  AdamConfig adam;
  double init_perturbation = 0.01;
  // Reuse the first batch (bits, noise, phase) on every step.
  bool freeze_noise = false;
  // Overrides the annealing schedule when set.
  std::optional<double> fixed_temperature;

  void validate() const;
};

std::string to_config_text(const TrainConfig& cfg);
// Fills a TrainConfig from documented keys, starting from `base`.
TrainConfig train_config_from(const text::KeyValues& kv, TrainConfig base = {});

struct ChainBatch {
  std::vector<std::size_t> indices;  // K symbol labels
  std::vector<std::uint8_t> bits;    // K x m
  SymbolBlock noise;
  std::vector<double> phase;
};

ChainBatch sample_batch(int m, std::size_t symbols, const ChannelParams& channel, Rng& rng,
                        double initial_phase = 0.0);

// bits -> Tx lookup -> power normalisation -> AWGN + phase noise -> soft BPS
// -> NN demapper -> BCE over the rows outside the window edge zones.
ad::Var chain_loss(const ad::Tensor& raw_points, const ad_ops::DemapperVars& demapper,
                   const NnDemapperModel& model, const ChainBatch& batch, const BpsConfig& bps,
                   Temperature temperature);

// First and one-past-last symbol index outside the edge exclusion zones.
std::pair<std::size_t, std::size_t> interior_rows(std::size_t k_count, const BpsConfig& bps);

struct MiniChainOptions {
  std::uint64_t seed = 7;
  Layout layout = Layout::Separated;
  Activation activation = Activation::Relu;
  double temperature = 0.1;
  double step = 1e-5;
};

// Gradient check of the loss w.r.t. every trainable parameter on a miniature
// chain: M = 4, 4 test angles, window 4, 8 symbols.
ad::GradcheckReport gradcheck_chain(const MiniChainOptions& opts);

// ---------------------------------------------------------------------------
// Training

struct TrainMetadata {
  TrainConfig config;
  int steps_run = 0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double final_temperature = 1.0;
  std::vector<double> loss_history;
};

struct TrainedSystem {
  Constellation constellation;  // normalised
  NnDemapperModel demapper;
  TrainMetadata meta;
};

// Untrained starting point: perturbed square QAM and random demapper weights.
TrainedSystem initial_system(const TrainConfig& cfg);

using StepObserver = std::function<void(int step, double loss, double temperature)>;

TrainedSystem train_e2e(const TrainConfig& cfg, const StepObserver& observer = {});

// Checkpoint directory: constellation.tsv, demapper.txt, meta.txt.
void save_checkpoint(const std::string& dir, const TrainedSystem& sys);
TrainedSystem load_checkpoint(const std::string& dir);

// ---------------------------------------------------------------------------
// Validation with hard BPS

enum class PhaseRecovery {
  Bps,
  Genie,  // true phase removed; no estimation
};

// Demapper is the NN when present, otherwise the Gaussian log-MAP demapper
// with the true channel N0.
struct Receiver {
  Constellation constellation;
  std::optional<NnDemapperModel> demapper;
};

struct ValidationOptions {
  std::size_t n_symbols = 100000;
  int n_seeds = 5;
  std::uint64_t seed = 1;
  PhaseRecovery recovery = PhaseRecovery::Bps;
};

struct SeedResult {
  double bmi = 0.0;
  double best_rotation_bmi = 0.0;
  std::size_t slips = 0;
  std::size_t branch_changes = 0;
};

struct ValidationResult {
  double mean = 0.0;
  double stddev = 0.0;
  double best_rotation_mean = 0.0;
  std::vector<SeedResult> seeds;
};

ValidationResult validate(const Receiver& rx, const ChannelParams& channel, const BpsConfig& bps,
                          const ValidationOptions& opts);

// Per-seed generator used by validate(); seed_index selects the stream.
Rng seed_stream(std::uint64_t master, std::uint64_t seed_index);

}  // namespace gcs
