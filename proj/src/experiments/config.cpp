#include "gcs/error.hpp"
#include "gcs/experiments.hpp"

#include <sstream>

namespace gcs {

std::string axis_name(SweepAxis axis) { return axis == SweepAxis::Snr ? "snr" : "linewidth"; }

SweepAxis parse_axis(const std::string& s) {
  if (s == "snr") return SweepAxis::Snr;
  if (s == "linewidth") return SweepAxis::Linewidth;
  throw ParameterError("unknown sweep axis '" + s + "' (expected snr|linewidth)");
}

std::vector<double> default_grid(SweepAxis axis) {
  if (axis == SweepAxis::Snr) {
    std::vector<double> grid;
    for (int snr = 14; snr <= 25; ++snr) grid.push_back(snr);
    return grid;
  }
  return {50e3, 100e3, 200e3, 300e3, 400e3, 500e3, 600e3};
}

void SweepSpec::validate() const {
  if (grid.empty()) throw ParameterError("sweep grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ParameterError("sweep grid must be strictly increasing");
  }
  if (axis == SweepAxis::Linewidth && grid.front() < 0.0) {
    throw ParameterError("linewidth must be non-negative");
  }
  if (systems.empty()) throw ParameterError("sweep needs at least one system");
  for (std::size_t i = 0; i < systems.size(); ++i) {
    if (systems[i].name.empty() || systems[i].source.empty()) {
      throw ParameterError("system entries need a name and a source");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (systems[j].name == systems[i].name) {
        throw ParameterError("duplicate system name '" + systems[i].name + "'");
      }
    }
  }
  if (!(symbol_rate_baud > 0.0)) throw ParameterError("symbol rate must be positive");
  bps.validate();
}

ChannelParams SweepSpec::channel_at(double x) const {
  return axis == SweepAxis::Snr ? params_from(x, fixed, symbol_rate_baud)
                                : params_from(fixed, x, symbol_rate_baud);
}

std::vector<SystemSpec> parse_systems(const std::string& s) {
  std::vector<SystemSpec> out;
  for (const std::string& item : text::split(s, ',')) {
    const std::string_view entry = text::trim(item);
    if (entry.empty()) continue;
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) {
      throw ParameterError("system entry '" + std::string(entry) + "' is not name=source");
    }
    out.push_back({std::string(text::trim(entry.substr(0, eq))),
                   std::string(text::trim(entry.substr(eq + 1)))});
  }
  return out;
}

std::string to_config_text(const SweepSpec& spec) {
  using text::format_double;
  std::ostringstream out;
  out << "axis = " << axis_name(spec.axis) << '\n' << "grid = ";
  for (std::size_t i = 0; i < spec.grid.size(); ++i) {
    out << (i ? "," : "") << format_double(spec.grid[i]);
  }
  out << '\n' << "fixed = " << format_double(spec.fixed) << '\n' << "systems = ";
  for (std::size_t i = 0; i < spec.systems.size(); ++i) {
    out << (i ? "," : "") << spec.systems[i].name << '=' << spec.systems[i].source;
  }
  out << '\n'
      << "n_symbols = " << spec.n_symbols << '\n'
      << "n_seeds = " << spec.n_seeds << '\n'
      << "seed = " << spec.seed << '\n'
      << "n_angles = " << spec.bps.n_angles << '\n'
      << "window = " << spec.bps.window << '\n'
      << "angle_span = " << to_string(spec.bps.span) << '\n'
      << "symbol_rate_baud = " << format_double(spec.symbol_rate_baud) << '\n'
      << "qam_m = " << spec.qam_m << '\n'
      << "recovery = " << (spec.recovery == PhaseRecovery::Bps ? "bps" : "genie") << '\n';
  return out.str();
}

SweepSpec sweep_spec_from(const text::KeyValues& kv, SweepSpec spec) {
  auto get = [&](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto v = get("axis")) {
    const SweepAxis axis = parse_axis(*v);
    if (axis != spec.axis) {
      spec.axis = axis;
      spec.grid = default_grid(axis);
      spec.fixed = axis == SweepAxis::Snr ? 100e3 : 17.0;
    }
  }
  if (auto v = get("grid")) {
    spec.grid.clear();
    for (const std::string& item : text::split(*v, ',')) spec.grid.push_back(text::parse_double(item));
  }
  if (auto v = get("fixed")) spec.fixed = text::parse_double(*v);
  if (auto v = get("systems")) spec.systems = parse_systems(*v);
  if (auto v = get("n_symbols")) spec.n_symbols = static_cast<std::size_t>(text::parse_int(*v));
  if (auto v = get("n_seeds")) spec.n_seeds = static_cast<int>(text::parse_int(*v));
  if (auto v = get("seed")) spec.seed = static_cast<std::uint64_t>(text::parse_int(*v));
  if (auto v = get("n_angles")) spec.bps.n_angles = static_cast<int>(text::parse_int(*v));
  if (auto v = get("window")) spec.bps.window = static_cast<int>(text::parse_int(*v));
  if (auto v = get("angle_span")) spec.bps.span = parse_angle_span(*v);
  if (auto v = get("symbol_rate_baud")) spec.symbol_rate_baud = text::parse_double(*v);
  if (auto v = get("qam_m")) spec.qam_m = static_cast<int>(text::parse_int(*v));
  if (auto v = get("recovery")) {
    if (*v == "bps") {
      spec.recovery = PhaseRecovery::Bps;
    } else if (*v == "genie") {
      spec.recovery = PhaseRecovery::Genie;
    } else {
      throw ParameterError("unknown recovery '" + *v + "' (expected bps|genie)");
    }
  }
  return spec;
}

}  // namespace gcs
