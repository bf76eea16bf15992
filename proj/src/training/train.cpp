#include "gcs/error.hpp"
#include "gcs/training.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gcs {
namespace {

constexpr std::uint64_t kDataStream = 0xda7a;

bool parse_bool(const std::string& s) {
  if (s == "1" || s == "true" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "no") return false;
  throw ParameterError("expected a boolean, got '" + s + "'");
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void TrainConfig::validate() const {
  if (m < 1 || m > 12) throw ParameterError("m must be in [1, 12]");
  if (steps < 1) throw ParameterError("steps must be >= 1");
  if (learning_rate < 0.0) throw ParameterError("learning_rate must be non-negative");
  if (hidden < 1) throw ParameterError("hidden width must be >= 1");
  if (layout == Layout::Separated && m % 2 != 0) {
    throw ParameterError("separated demapper needs an even m");
  }
  bps.validate();
  if (batch_symbols < bps.window || batch_symbols <= 2 * (bps.window / 2)) {
    throw ParameterError("batch_symbols must exceed the BPS window");
  }
  if (fixed_temperature) Temperature check(*fixed_temperature);
}

std::string to_config_text(const TrainConfig& cfg) {
  using text::format_double;
  std::ostringstream out;
  out << "m = " << cfg.m << '\n'
      << "steps = " << cfg.steps << '\n'
      << "batch_symbols = " << cfg.batch_symbols << '\n'
      << "learning_rate = " << format_double(cfg.learning_rate) << '\n'
      << "seed = " << cfg.seed << '\n'
      << "snr_db = " << format_double(cfg.channel.snr_db) << '\n'
      << "linewidth_hz = " << format_double(cfg.channel.linewidth_hz) << '\n'
      << "symbol_rate_baud = " << format_double(cfg.channel.symbol_rate_baud) << '\n'
      << "n_angles = " << cfg.bps.n_angles << '\n'
      << "window = " << cfg.bps.window << '\n'
      << "angle_span = " << to_string(cfg.bps.span) << '\n'
      << "layout = " << to_string(cfg.layout) << '\n'
      << "hidden = " << cfg.hidden << '\n'
      << "activation = " << to_string(cfg.activation) << '\n'
      << "adam_beta1 = " << format_double(cfg.adam.beta1) << '\n'
      << "adam_beta2 = " << format_double(cfg.adam.beta2) << '\n'
      << "adam_epsilon = " << format_double(cfg.adam.epsilon) << '\n'
      << "init_perturbation = " << format_double(cfg.init_perturbation) << '\n'
      << "freeze_noise = " << (cfg.freeze_noise ? 1 : 0) << '\n'
      << "fixed_temperature = "
      << (cfg.fixed_temperature ? format_double(*cfg.fixed_temperature) : std::string("none"))
      << '\n';
  return out.str();
}

TrainConfig train_config_from(const text::KeyValues& kv, TrainConfig cfg) {
  auto get = [&](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto as_int = [](const std::string& s) { return static_cast<int>(text::parse_int(s)); };
  double snr = cfg.channel.snr_db, lw = cfg.channel.linewidth_hz,
         rate = cfg.channel.symbol_rate_baud;
  if (auto v = get("m")) cfg.m = as_int(*v);
  if (auto v = get("steps")) cfg.steps = as_int(*v);
  if (auto v = get("batch_symbols")) cfg.batch_symbols = as_int(*v);
  if (auto v = get("learning_rate")) cfg.learning_rate = text::parse_double(*v);
  if (auto v = get("seed")) cfg.seed = static_cast<std::uint64_t>(text::parse_int(*v));
  if (auto v = get("snr_db")) snr = text::parse_double(*v);
  if (auto v = get("linewidth_hz")) lw = text::parse_double(*v);
  if (auto v = get("symbol_rate_baud")) rate = text::parse_double(*v);
  if (auto v = get("n_angles")) cfg.bps.n_angles = as_int(*v);
  if (auto v = get("window")) cfg.bps.window = as_int(*v);
  if (auto v = get("angle_span")) cfg.bps.span = parse_angle_span(*v);
  if (auto v = get("layout")) cfg.layout = parse_layout(*v);
  if (auto v = get("hidden")) cfg.hidden = as_int(*v);
  if (auto v = get("activation")) cfg.activation = parse_activation(*v);
  if (auto v = get("adam_beta1")) cfg.adam.beta1 = text::parse_double(*v);
  if (auto v = get("adam_beta2")) cfg.adam.beta2 = text::parse_double(*v);
  if (auto v = get("adam_epsilon")) cfg.adam.epsilon = text::parse_double(*v);
  if (auto v = get("init_perturbation")) cfg.init_perturbation = text::parse_double(*v);
  if (auto v = get("freeze_noise")) cfg.freeze_noise = parse_bool(*v);
  if (auto v = get("fixed_temperature")) {
    if (*v == "none") {
      cfg.fixed_temperature.reset();
    } else {
      cfg.fixed_temperature = text::parse_double(*v);
    }
  }
  cfg.channel = params_from(snr, lw, rate);
  return cfg;
}

TrainedSystem initial_system(const TrainConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const Constellation raw = perturbed_square_qam(cfg.m, cfg.init_perturbation, rng);
  TrainedSystem sys;
  sys.constellation = normalize_power(raw);
  sys.demapper = NnDemapperModel::random(cfg.layout, cfg.m, cfg.hidden, cfg.activation, rng);
  sys.meta.config = cfg;
  return sys;
}

TrainedSystem train_e2e(const TrainConfig& cfg, const StepObserver& observer) {
  cfg.validate();
  Rng init_rng(cfg.seed);
  const Constellation raw = perturbed_square_qam(cfg.m, cfg.init_perturbation, init_rng);
  NnDemapperModel model =
      NnDemapperModel::random(cfg.layout, cfg.m, cfg.hidden, cfg.activation, init_rng);

  std::vector<double> coords = raw.coordinates();
  std::vector<double> weights = model.parameters();
  const std::size_t n_coords = coords.size();
  std::vector<double> params(coords);
  params.insert(params.end(), weights.begin(), weights.end());
  Adam optimiser(params.size(), cfg.learning_rate, cfg.adam);

  Rng data_rng = seed_stream(cfg.seed, kDataStream);
  const auto symbols = static_cast<std::size_t>(cfg.batch_symbols);
  ChainBatch frozen;
  if (cfg.freeze_noise) frozen = sample_batch(cfg.m, symbols, cfg.channel, data_rng);

  TrainMetadata meta;
  meta.config = cfg;
  const int schedule_end = std::max(1, cfg.steps - 1);
  for (int step = 0; step < cfg.steps; ++step) {
    const Temperature tau = cfg.fixed_temperature ? Temperature(*cfg.fixed_temperature)
                                                  : anneal(step, schedule_end);
    const ChainBatch fresh =
        cfg.freeze_noise ? ChainBatch{} : sample_batch(cfg.m, symbols, cfg.channel, data_rng);
    const ChainBatch& batch = cfg.freeze_noise ? frozen : fresh;

    ad::Tape tape;
    const ad::Tensor raw_points = tape.leaf({n_coords / 2, 2}, {params.begin(), params.begin() + static_cast<std::ptrdiff_t>(n_coords)});
    const ad_ops::DemapperVars vars = ad_ops::place_on_tape(tape, model);
    double loss_value = 0.0;
    std::vector<double> grads;
    try {
      const ad::Var loss = chain_loss(raw_points, vars, model, batch, cfg.bps, tau);
      loss_value = loss.value();
      tape.backward(loss);
      grads.assign(raw_points.grads().begin(), raw_points.grads().end());
      const std::vector<double> gw = ad_ops::gradients(vars);
      grads.insert(grads.end(), gw.begin(), gw.end());
    } catch (const NumericDomainError& e) {
      throw TrainingFailure(step, e.what());
    } catch (const DegenerateInputError& e) {
      throw TrainingFailure(step, e.what());
    }
    if (!all_finite(grads)) throw TrainingFailure(step, "non-finite gradient");

    optimiser.step(params, grads);
    if (!all_finite(params)) throw TrainingFailure(step, "parameters diverged");
    model.set_parameters(std::span<const double>(params).subspan(n_coords));

    if (step == 0) meta.initial_loss = loss_value;
    meta.loss_history.push_back(loss_value);
    meta.final_loss = loss_value;
    meta.final_temperature = tau.value();
    meta.steps_run = step + 1;
    if (observer) observer(step, loss_value, tau.value());
  }

  TrainedSystem sys;
  sys.constellation = normalize_power(
      Constellation::from_coordinates(cfg.m, std::span<const double>(params).subspan(0, n_coords)));
  sys.demapper = std::move(model);
  sys.meta = std::move(meta);
  return sys;
}

}  // namespace gcs
