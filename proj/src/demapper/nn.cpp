#include "gcs/demapper.hpp"
#include "gcs/error.hpp"

#include <algorithm>
#include <cmath>

namespace gcs {
namespace {

Mlp make_mlp(std::size_t in, std::size_t hidden, std::size_t out) {
  Mlp net;
  net.in = in;
  net.hidden = hidden;
  net.out = out;
  net.w1.assign(hidden * in, 0.0);
  net.b1.assign(hidden, 0.0);
  net.w2.assign(out * hidden, 0.0);
  net.b2.assign(out, 0.0);
  return net;
}

void fill_uniform(std::vector<double>& v, double bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& x : v) x = dist(rng);
}

double activate(Activation act, double x) {
  return act == Activation::Relu ? (x > 0.0 ? x : 0.0) : std::tanh(x);
}

// Evaluates one network on `input`, writing `net.out` clamped LLRs to `out`.
void forward(const Mlp& net, Activation act, std::span<const double> input, double* hidden,
             std::span<double> out) {
  for (std::size_t h = 0; h < net.hidden; ++h) {
    double acc = net.b1[h];
    for (std::size_t i = 0; i < net.in; ++i) acc += net.w1[h * net.in + i] * input[i];
    hidden[h] = activate(act, acc);
  }
  for (std::size_t o = 0; o < net.out; ++o) {
    double acc = net.b2[o];
    for (std::size_t h = 0; h < net.hidden; ++h) acc += net.w2[o * net.hidden + h] * hidden[h];
    out[o] = std::clamp(acc, -kLlrClamp, kLlrClamp);
  }
}

void nn_llr_into(cplx y, const NnDemapperModel& model, std::vector<double>& hidden,
                 std::span<double> out) {
  const auto& nets = model.nets();
  if (model.layout() == Layout::Full) {
    const double in[2] = {y.real(), y.imag()};
    forward(nets[0], model.activation(), in, hidden.data(), out);
  } else {
    const std::size_t half = nets[0].out;
    const double re[1] = {y.real()};
    const double im[1] = {y.imag()};
    forward(nets[0], model.activation(), re, hidden.data(), out.subspan(0, half));
    forward(nets[1], model.activation(), im, hidden.data(), out.subspan(half, half));
  }
}

}  // namespace

std::string to_string(Layout layout) { return layout == Layout::Full ? "full" : "separated"; }

std::string to_string(Activation act) { return act == Activation::Relu ? "relu" : "tanh"; }

Layout parse_layout(const std::string& s) {
  if (s == "full") return Layout::Full;
  if (s == "separated") return Layout::Separated;
  throw ParameterError("unknown demapper layout '" + s + "' (expected full|separated)");
}

Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::Relu;
  if (s == "tanh") return Activation::Tanh;
  throw ParameterError("unknown activation '" + s + "' (expected relu|tanh)");
}

NnDemapperModel::NnDemapperModel(Layout layout, int m, int width, Activation act)
    : layout_(layout), m_(m), width_(width), act_(act) {
  if (m < 1) throw ParameterError("m must be >= 1");
  if (width < 1) throw ParameterError("hidden width must be >= 1");
  const auto n = static_cast<std::size_t>(width);
  if (layout == Layout::Full) {
    nets_.push_back(make_mlp(2, n, static_cast<std::size_t>(m)));
  } else {
    if (m % 2 != 0) throw ParameterError("separated demapper needs an even m");
    const auto half = static_cast<std::size_t>(m / 2);
    nets_.push_back(make_mlp(1, n, half));
    nets_.push_back(make_mlp(1, n, half));
  }
}

NnDemapperModel NnDemapperModel::random(Layout layout, int m, int width, Activation act,
                                        Rng& rng) {
  NnDemapperModel model(layout, m, width, act);
  for (Mlp& net : model.nets_) {
    const double b1 = 1.0 / std::sqrt(static_cast<double>(net.in));
    const double b2 = 1.0 / std::sqrt(static_cast<double>(net.hidden));
    fill_uniform(net.w1, b1, rng);
    fill_uniform(net.b1, b1, rng);
    fill_uniform(net.w2, b2, rng);
    fill_uniform(net.b2, b2, rng);
  }
  return model;
}

std::vector<double> NnDemapperModel::parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const Mlp& net : nets_) {
    for (const auto* v : {&net.w1, &net.b1, &net.w2, &net.b2}) out.insert(out.end(), v->begin(), v->end());
  }
  return out;
}

void NnDemapperModel::set_parameters(std::span<const double> params) {
  if (params.size() != parameter_count()) throw ShapeError("parameter count mismatch");
  std::size_t pos = 0;
  for (Mlp& net : nets_) {
    for (auto* v : {&net.w1, &net.b1, &net.w2, &net.b2}) {
      std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(pos), v->size(), v->begin());
      pos += v->size();
    }
  }
}

std::size_t NnDemapperModel::parameter_count() const {
  std::size_t n = 0;
  for (const Mlp& net : nets_) n += net.parameter_count();
  return n;
}

LlrVector nn_full_llr(cplx y, const NnDemapperModel& model) {
  if (model.layout() != Layout::Full) throw UsageError("nn_full_llr needs a full-layout model");
  return nn_llr(y, model);
}

LlrVector nn_separated_llr(cplx y, const NnDemapperModel& model) {
  if (model.layout() != Layout::Separated) {
    throw UsageError("nn_separated_llr needs a separated-layout model");
  }
  return nn_llr(y, model);
}

LlrVector nn_llr(cplx y, const NnDemapperModel& model) {
  std::vector<double> hidden(static_cast<std::size_t>(model.width()));
  LlrVector out(static_cast<std::size_t>(model.bits_per_symbol()));
  nn_llr_into(y, model, hidden, out);
  return out;
}

void nn_llr_batch(std::span<const cplx> y, const NnDemapperModel& model, std::span<double> out) {
  const auto m = static_cast<std::size_t>(model.bits_per_symbol());
  if (out.size() != y.size() * m) throw ShapeError("LLR output buffer must hold K x m values");
  const auto kk = static_cast<std::ptrdiff_t>(y.size());
#pragma omp parallel
  {
    std::vector<double> hidden(static_cast<std::size_t>(model.width()));
#pragma omp for schedule(static)
    for (std::ptrdiff_t ks = 0; ks < kk; ++ks) {
      const auto k = static_cast<std::size_t>(ks);
      nn_llr_into(y[k], model, hidden, out.subspan(k * m, m));
    }
  }
}

namespace ad_ops {

DemapperVars place_on_tape(ad::Tape& tape, const NnDemapperModel& model) {
  DemapperVars vars;
  for (const Mlp& net : model.nets()) {
    MlpVars v;
    v.w1 = tape.leaf({net.hidden, net.in}, net.w1);
    v.b1 = tape.leaf({net.hidden, 1}, net.b1);
    v.w2 = tape.leaf({net.out, net.hidden}, net.w2);
    v.b2 = tape.leaf({net.out, 1}, net.b2);
    vars.nets.push_back(v);
  }
  return vars;
}

DemapperVars from_flat(const ad::Tensor& flat, std::size_t offset, const NnDemapperModel& model) {
  DemapperVars vars;
  std::size_t pos = offset;
  auto take = [&](std::size_t rows, std::size_t cols) {
    const ad::Tensor t = ad::reshape(ad::slice(flat, pos, rows * cols), {rows, cols});
    pos += rows * cols;
    return t;
  };
  for (const Mlp& net : model.nets()) {
    MlpVars v;
    v.w1 = take(net.hidden, net.in);
    v.b1 = take(net.hidden, 1);
    v.w2 = take(net.out, net.hidden);
    v.b2 = take(net.out, 1);
    vars.nets.push_back(v);
  }
  return vars;
}

std::vector<double> gradients(const DemapperVars& vars) {
  std::vector<double> out;
  for (const MlpVars& v : vars.nets) {
    for (const ad::Tensor* t : {&v.w1, &v.b1, &v.w2, &v.b2}) {
      const auto g = t->grads();
      out.insert(out.end(), g.begin(), g.end());
    }
  }
  return out;
}

namespace {

ad::Tensor mlp(const ad::Tensor& x, const MlpVars& v, Activation act) {
  const ad::Tensor pre = ad::linear(x, v.w1, v.b1);
  const ad::Tensor h = act == Activation::Relu ? ad::relu(pre) : ad::tanh(pre);
  return ad::linear(h, v.w2, v.b2);
}

}  // namespace

ad::Tensor nn_demap(const ad::Tensor& symbols, const DemapperVars& vars,
                    const NnDemapperModel& model) {
  if (symbols.cols() != 2) throw ShapeError("nn_demap: symbols must be K x 2");
  if (vars.nets.size() != model.nets().size()) throw UsageError("nn_demap: layout mismatch");
  ad::Tensor llr;
  if (model.layout() == Layout::Full) {
    llr = mlp(symbols, vars.nets[0], model.activation());
  } else {
    const ad::Tensor re = mlp(ad::column(symbols, 0), vars.nets[0], model.activation());
    const ad::Tensor im = mlp(ad::column(symbols, 1), vars.nets[1], model.activation());
    llr = ad::hconcat(re, im);
  }
  return ad::clamp(llr, -kLlrClamp, kLlrClamp);
}

}  // namespace ad_ops

}  // namespace gcs
