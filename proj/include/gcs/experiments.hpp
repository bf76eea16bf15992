#pragma once

#include "gcs/cpe.hpp"
#include "gcs/demapper.hpp"
#include "gcs/text_io.hpp"
#include "gcs/training.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gcs {

inline constexpr const char* kVersion = "1.0.0";

enum class SweepAxis { Snr, Linewidth };

// "snr" or "linewidth"; also the first column name in data files.
std::string axis_name(SweepAxis axis);
SweepAxis parse_axis(const std::string& s);

// Default grids: SNR 14..25 dB in 1 dB steps; linewidth 50..600 kHz (in Hz).
std::vector<double> default_grid(SweepAxis axis);

// A system under test. `source` is a checkpoint directory, or "qam" for
// square QAM with the Gaussian log-MAP demapper.
struct SystemSpec {
  std::string name;
  std::string source;
};

struct SweepSpec {
  SweepAxis axis = SweepAxis::Snr;
  std::vector<double> grid = default_grid(SweepAxis::Snr);
  double fixed = 100e3;  // linewidth in Hz on an SNR sweep, SNR in dB otherwise
  std::vector<SystemSpec> systems;
  std::size_t n_symbols = 100000;
  int n_seeds = 5;
  std::uint64_t seed = 1;
  BpsConfig bps;
  double symbol_rate_baud = kDefaultSymbolRate;
  int qam_m = 6;
  PhaseRecovery recovery = PhaseRecovery::Bps;

  void validate() const;
  ChannelParams channel_at(double x) const;
};

// "name=source,name=source" -> systems.
std::vector<SystemSpec> parse_systems(const std::string& s);
std::string to_config_text(const SweepSpec& spec);
// Keys: axis, grid (comma separated), fixed, systems, n_symbols, n_seeds,
// seed, n_angles, window, angle_span, symbol_rate_baud, qam_m, recovery.
// Changing the axis without giving a grid selects that axis's default grid.
SweepSpec sweep_spec_from(const text::KeyValues& kv, SweepSpec base = {});

struct SystemInfo {
  std::string name;
  DemapperKind kind = DemapperKind::Gaussian;
  int m = 0;
  int n = 0;
  long long multiplications = 0;
};

struct LoadedSystem {
  SystemInfo info;
  Receiver receiver;
};

// Missing or unreadable checkpoints raise FileError naming the system.
LoadedSystem load_system(const SystemSpec& spec, int qam_m = 6);

struct RunRecord {
  double x = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
};

struct SweepTable {
  SystemInfo system;
  SweepAxis axis = SweepAxis::Snr;
  std::vector<RunRecord> rows;
  std::string config_hash;
  std::uint64_t seed = 0;
};

// Validation seed used at grid index g; shared by every system.
std::uint64_t grid_point_seed(std::uint64_t master, std::size_t g);

std::vector<SweepTable> run_sweep(const SweepSpec& spec);

// Data file: header "<axis> mean stddev", one '#' provenance line, then one
// space separated row per grid point in ascending order.
std::string to_text(const SweepTable& table);
SweepTable table_from_text(const std::string& text);
// Writes <dir>/<system name>.txt per table and returns the paths.
std::vector<std::string> write_tables(const std::string& dir, std::span<const SweepTable> tables);

// BMI deltas against the first table, multiplications per system, and a flag
// on grid points where a separated n=8 system beats a full n=8 system.
std::string compare_report(std::span<const SweepTable> tables);

// True when, on both axes, the points grouped by that axis's label bits have
// mean coordinates whose sorted order walks a Gray sequence (neighbours differ
// in exactly one bit). Requires an even m.
bool axis_labels_gray(const Constellation& c);

}  // namespace gcs
