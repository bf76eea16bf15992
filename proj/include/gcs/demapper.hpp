#pragma once

// Soft demappers producing per-bit LLRs. Sign convention: positive means bit 0
// is more likely. All outputs are clamped to +-kLlrClamp.

#include "gcs/constellation.hpp"
#include "gcs/numerics.hpp"

#include <span>
#include <string>
#include <vector>

namespace gcs {

inline constexpr double kLlrClamp = 50.0;

using LlrVector = std::vector<double>;

// Gaussian log-MAP demapper with log-sum-exp stabilisation:
//   L_i(y) = ln sum_{x in X_i^0} exp(-|y-x|^2/N0) - ln sum_{x in X_i^1} exp(-|y-x|^2/N0)
LlrVector logmap_llr(cplx y, const Constellation& c, double n0);

// Batched log-MAP, K x m row-major output. OpenMP kernel and serial reference.
void logmap_llr_batch(std::span<const cplx> y, const Constellation& c, double n0,
                      std::span<double> out);
void logmap_llr_batch_reference(std::span<const cplx> y, const Constellation& c, double n0,
                                std::span<double> out);

enum class Layout { Full, Separated };
enum class Activation { Relu, Tanh };

std::string to_string(Layout layout);
std::string to_string(Activation act);
Layout parse_layout(const std::string& s);
Activation parse_activation(const std::string& s);

// One hidden layer network. weight matrices are (out x in), row-major.
struct Mlp {
  std::size_t in = 0;
  std::size_t hidden = 0;
  std::size_t out = 0;
  std::vector<double> w1, b1, w2, b2;

  std::size_t parameter_count() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
};

// Full layout: one network (re, im) -> m LLRs.
// Separated layout: an in-phase network re -> L_1..L_{m/2} and a quadrature
// network im -> L_{m/2+1}..L_m.
class NnDemapperModel {
 public:
  NnDemapperModel() = default;
  NnDemapperModel(Layout layout, int m, int width, Activation act);

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialisation of all weights and biases.
  static NnDemapperModel random(Layout layout, int m, int width, Activation act, Rng& rng);

  Layout layout() const { return layout_; }
  int bits_per_symbol() const { return m_; }
  int width() const { return width_; }
  Activation activation() const { return act_; }
  const std::vector<Mlp>& nets() const { return nets_; }
  std::vector<Mlp>& nets() { return nets_; }

  // Flattened in declared order: for each net w1, b1, w2, b2.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> params);
  std::size_t parameter_count() const;

 private:
  Layout layout_ = Layout::Full;
  int m_ = 0;
  int width_ = 0;
  Activation act_ = Activation::Relu;
  std::vector<Mlp> nets_;
};

LlrVector nn_full_llr(cplx y, const NnDemapperModel& model);
LlrVector nn_separated_llr(cplx y, const NnDemapperModel& model);
LlrVector nn_llr(cplx y, const NnDemapperModel& model);
// K x m row-major output, OpenMP over symbols.
void nn_llr_batch(std::span<const cplx> y, const NnDemapperModel& model, std::span<double> out);

enum class DemapperKind { Gaussian, NnFull, NnSeparated };

// Real-valued multiplications per received symbol:
//   gaussian     4 * 2^m
//   nn_full      k n + (layers - 1) n + n m           (k = input width, 2)
//   nn_separated 2 * (1 n + (layers - 1) n + n m/2)
long long count_multiplications(DemapperKind kind, int m, int n = 0, int layers = 1, int k = 2);

// Hidden width giving the same multiplication count as the Gaussian demapper,
// 4 * 2^m / (m + 2), rounded to nearest.
int equal_complexity_width(int m);

// Text format:
//   gcs-demapper 1
//   <layout> <m> <n> <activation>
// followed, for each network, by the rows of W1, one row b1, the rows of W2
// and one row b2, whitespace separated.
std::string to_text(const NnDemapperModel& model);
NnDemapperModel model_from_text(const std::string& text);
void write_model(const std::string& path, const NnDemapperModel& model);
NnDemapperModel read_model(const std::string& path);

namespace ad_ops {

struct MlpVars {
  ad::Tensor w1, b1, w2, b2;
};

struct DemapperVars {
  std::vector<MlpVars> nets;
};

DemapperVars place_on_tape(ad::Tape& tape, const NnDemapperModel& model);
// Network tensors viewed from a flat parameter column starting at `offset`,
// in NnDemapperModel::parameters() order.
DemapperVars from_flat(const ad::Tensor& flat, std::size_t offset, const NnDemapperModel& model);
// Gradients in NnDemapperModel::parameters() order.
std::vector<double> gradients(const DemapperVars& vars);

// K x 2 symbols -> K x m clamped LLRs.
ad::Tensor nn_demap(const ad::Tensor& symbols, const DemapperVars& vars,
                    const NnDemapperModel& model);

}  // namespace ad_ops

}  // namespace gcs
