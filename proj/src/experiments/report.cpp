#include "gcs/error.hpp"
#include "gcs/experiments.hpp"

#include <algorithm>
#include <bit>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace gcs {
namespace {

std::string signed_fixed(double v) {
  std::ostringstream out;
  out << std::showpos << std::fixed << std::setprecision(4) << v;
  return out.str();
}

std::string fixed4(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << v;
  return out.str();
}

std::string kind_label(DemapperKind kind) {
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

std::ptrdiff_t find_system(std::span<const SweepTable> tables, DemapperKind kind, int n) {
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (tables[i].system.kind == kind && tables[i].system.n == n) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

bool axis_gray(const Constellation& c, bool in_phase) {
  const int h = c.bits_per_symbol() / 2;
  const std::size_t levels = std::size_t{1} << h;
  std::vector<double> mean(levels, 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const std::size_t label = in_phase ? (i >> h) : (i & (levels - 1));
    mean[label] += in_phase ? c.point(i).real() : c.point(i).imag();
  }
  std::vector<std::size_t> order(levels);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mean[a] < mean[b]; });
  for (std::size_t i = 1; i < levels; ++i) {
    if (std::popcount(order[i] ^ order[i - 1]) != 1) return false;
  }
  return true;
}

}  // namespace

std::string compare_report(std::span<const SweepTable> tables) {
  if (tables.size() < 2) throw InputError("compare_report needs at least two tables");
  const SweepTable& base = tables.front();
  for (const SweepTable& t : tables) {
    if (t.axis != base.axis || t.rows.size() != base.rows.size()) {
      throw InputError("tables '" + base.system.name + "' and '" + t.system.name +
                       "' are on different grids");
    }
    for (std::size_t g = 0; g < t.rows.size(); ++g) {
      if (t.rows[g].x != base.rows[g].x) {
        throw InputError("tables '" + base.system.name + "' and '" + t.system.name +
                         "' are on different grids");
      }
    }
  }
  const std::ptrdiff_t sep8 = find_system(tables, DemapperKind::NnSeparated, 8);
  const std::ptrdiff_t full8 = find_system(tables, DemapperKind::NnFull, 8);
  const bool flag = sep8 >= 0 && full8 >= 0;

  std::ostringstream out;
  out << "systems\n";
  for (const SweepTable& t : tables) {
    out << "  " << t.system.name << " demapper=" << kind_label(t.system.kind)
        << " m=" << t.system.m << " n=" << t.system.n
        << " multiplications=" << t.system.multiplications << '\n';
  }
  out << axis_name(base.axis);
  for (const SweepTable& t : tables) out << ' ' << t.system.name;
  for (std::size_t i = 1; i < tables.size(); ++i) out << " delta_" << tables[i].system.name;
  if (flag) out << " sep8_beats_full8";
  out << '\n';
  for (std::size_t g = 0; g < base.rows.size(); ++g) {
    out << text::format_double(base.rows[g].x);
    for (const SweepTable& t : tables) out << ' ' << fixed4(t.rows[g].mean);
    for (std::size_t i = 1; i < tables.size(); ++i) {
      out << ' ' << signed_fixed(tables[i].rows[g].mean - base.rows[g].mean);
    }
    if (flag) {
      const bool wins = tables[static_cast<std::size_t>(sep8)].rows[g].mean >
                        tables[static_cast<std::size_t>(full8)].rows[g].mean;
      out << ' ' << (wins ? "yes" : "no");
    }
    out << '\n';
  }
  return out.str();
}

bool axis_labels_gray(const Constellation& c) {
  if (c.bits_per_symbol() < 2 || c.bits_per_symbol() % 2 != 0) {
    throw ParameterError("axis Gray check needs an even m");
  }
  return axis_gray(c, true) && axis_gray(c, false);
}

}  // namespace gcs
