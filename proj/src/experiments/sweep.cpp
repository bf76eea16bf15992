#include "gcs/error.hpp"
#include "gcs/experiments.hpp"

#include <filesystem>
#include <sstream>

namespace gcs {

LoadedSystem load_system(const SystemSpec& spec, int qam_m) {
  LoadedSystem out;
  out.info.name = spec.name;
  if (spec.source == "qam") {
    out.receiver.constellation = square_qam(qam_m);
    out.info.kind = DemapperKind::Gaussian;
    out.info.m = qam_m;
    out.info.multiplications = count_multiplications(DemapperKind::Gaussian, qam_m);
    return out;
  }
  if (!std::filesystem::is_directory(spec.source)) {
    throw FileError("system '" + spec.name + "': checkpoint '" + spec.source + "' not found");
  }
  TrainedSystem sys;
  try {
    sys = load_checkpoint(spec.source);
  } catch (const Error& e) {
    throw FileError("system '" + spec.name + "': " + e.what());
  }
  const NnDemapperModel& d = sys.demapper;
  out.info.kind = d.layout() == Layout::Full ? DemapperKind::NnFull : DemapperKind::NnSeparated;
  out.info.m = d.bits_per_symbol();
  out.info.n = d.width();
  out.info.multiplications = count_multiplications(out.info.kind, out.info.m, out.info.n);
  out.receiver.constellation = std::move(sys.constellation);
  out.receiver.demapper = std::move(sys.demapper);
  return out;
}

std::uint64_t grid_point_seed(std::uint64_t master, std::size_t g) {
  return master * 1000003ULL + static_cast<std::uint64_t>(g);
}

std::vector<SweepTable> run_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<LoadedSystem> systems;
  for (const SystemSpec& s : spec.systems) systems.push_back(load_system(s, spec.qam_m));
  const std::string hash = text::hex64(text::fnv1a(to_config_text(spec)));

  std::vector<SweepTable> tables;
  for (const LoadedSystem& sys : systems) {
    SweepTable table;
    table.system = sys.info;
    table.axis = spec.axis;
    table.config_hash = hash;
    table.seed = spec.seed;
    for (std::size_t g = 0; g < spec.grid.size(); ++g) {
      ValidationOptions opts;
      opts.n_symbols = spec.n_symbols;
      opts.n_seeds = spec.n_seeds;
      opts.seed = grid_point_seed(spec.seed, g);
      opts.recovery = spec.recovery;
      const ValidationResult r = validate(sys.receiver, spec.channel_at(spec.grid[g]), spec.bps, opts);
      table.rows.push_back({spec.grid[g], r.mean, r.stddev});
    }
    tables.push_back(std::move(table));
  }
  return tables;
}

namespace {

std::string kind_name(DemapperKind kind) {
  switch (kind) {
    case DemapperKind::Gaussian:
      return "gaussian";
    case DemapperKind::NnFull:
      return "nn_full";
    case DemapperKind::NnSeparated:
      return "nn_separated";
  }
  return "gaussian";
}

DemapperKind parse_kind(const std::string& s) {
  if (s == "gaussian") return DemapperKind::Gaussian;
  if (s == "nn_full") return DemapperKind::NnFull;
  if (s == "nn_separated") return DemapperKind::NnSeparated;
  throw InputError("unknown demapper kind '" + s + "'");
}

}  // namespace

std::string to_text(const SweepTable& table) {
  using text::format_double;
  std::ostringstream out;
  out << axis_name(table.axis) << " mean stddev\n"
      << "# system=" << table.system.name << " demapper=" << kind_name(table.system.kind)
      << " m=" << table.system.m << " n=" << table.system.n
      << " multiplications=" << table.system.multiplications
      << " config_hash=" << table.config_hash << " seed=" << table.seed
      << " version=" << kVersion << '\n';
  for (const RunRecord& r : table.rows) {
    out << format_double(r.x) << ' ' << format_double(r.mean) << ' ' << format_double(r.stddev)
        << '\n';
  }
  return out.str();
}

SweepTable table_from_text(const std::string& text) {
  SweepTable table;
  bool header = false;
  for (const std::string& raw : text::split(text, '\n')) {
    const std::string_view line = text::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      for (const std::string& field : text::split_ws(line.substr(1))) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = field.substr(0, eq), value = field.substr(eq + 1);
        if (key == "system") table.system.name = value;
        else if (key == "demapper") table.system.kind = parse_kind(value);
        else if (key == "m") table.system.m = static_cast<int>(text::parse_int(value));
        else if (key == "n") table.system.n = static_cast<int>(text::parse_int(value));
        else if (key == "multiplications") table.system.multiplications = text::parse_int(value);
        else if (key == "config_hash") table.config_hash = value;
        else if (key == "seed") table.seed = static_cast<std::uint64_t>(text::parse_int(value));
      }
      continue;
    }
    const std::vector<std::string> cols = text::split_ws(line);
    if (cols.size() != 3) throw InputError("data row must have 3 columns: '" + std::string(line) + "'");
    if (!header) {
      if (cols[1] != "mean" || cols[2] != "stddev") throw InputError("missing data file header");
      table.axis = parse_axis(cols[0]);
      header = true;
      continue;
    }
    RunRecord r{text::parse_double(cols[0]), text::parse_double(cols[1]),
                text::parse_double(cols[2])};
    if (r.stddev < 0.0) throw InputError("negative stddev in data file");
    if (!table.rows.empty() && !(r.x > table.rows.back().x)) {
      throw InputError("data rows must be strictly increasing");
    }
    table.rows.push_back(r);
  }
  if (!header) throw InputError("missing data file header");
  return table;
}

std::vector<std::string> write_tables(const std::string& dir, std::span<const SweepTable> tables) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw FileError("cannot create output directory '" + dir + "': " + ec.message());
  std::vector<std::string> paths;
  for (const SweepTable& t : tables) {
    const std::string path = dir + "/" + t.system.name + ".txt";
    text::write_file(path, to_text(t));
    paths.push_back(path);
  }
  return paths;
}

}  // namespace gcs
