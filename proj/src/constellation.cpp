#include "gcs/constellation.hpp"

#include "gcs/error.hpp"
#include "gcs/text_io.hpp"

#include <cmath>
#include <sstream>

namespace gcs {

Constellation::Constellation(int m, std::vector<cplx> points) : m_(m), points_(std::move(points)) {
  if (m < 1 || m > 16) throw ParameterError("bits per symbol must be in [1, 16]");
  if (points_.size() != (std::size_t{1} << m)) {
    throw ShapeError("constellation with m=" + std::to_string(m) + " needs " +
                     std::to_string(std::size_t{1} << m) + " points, got " +
                     std::to_string(points_.size()));
  }
  for (const cplx& p : points_) {
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) {
      throw NumericDomainError("constellation point is not finite");
    }
  }
}

std::string Constellation::label_string(std::size_t i) const {
  std::string s(static_cast<std::size_t>(m_), '0');
  for (int pos = 0; pos < m_; ++pos) s[static_cast<std::size_t>(pos)] = bit(i, pos) ? '1' : '0';
  return s;
}

double Constellation::average_power() const {
  double acc = 0.0;
  for (const cplx& p : points_) acc += std::norm(p);
  return acc / static_cast<double>(points_.size());
}

std::vector<double> Constellation::coordinates() const {
  std::vector<double> out;
  out.reserve(points_.size() * 2);
  for (const cplx& p : points_) {
    out.push_back(p.real());
    out.push_back(p.imag());
  }
  return out;
}

Constellation Constellation::from_coordinates(int m, std::span<const double> coords) {
  if (coords.size() % 2 != 0) throw ShapeError("coordinate list must hold (re, im) pairs");
  std::vector<cplx> pts(coords.size() / 2);
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {coords[2 * i], coords[2 * i + 1]};
  return Constellation(m, std::move(pts));
}

std::size_t bits_to_index(std::span<const std::uint8_t> bits) {
  std::size_t idx = 0;
  for (std::uint8_t b : bits) {
    if (b > 1) throw InputError("bit values must be 0 or 1");
    idx = (idx << 1) | b;
  }
  return idx;
}

BitBlock index_to_bits(std::size_t index, int m) {
  BitBlock bits(static_cast<std::size_t>(m));
  for (int pos = 0; pos < m; ++pos) {
    bits[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>((index >> (m - 1 - pos)) & 1U);
  }
  return bits;
}

std::vector<double> bits_to_onehot(std::span<const std::uint8_t> bits, int m) {
  if (bits.size() != static_cast<std::size_t>(m)) {
    throw ShapeError("bit block has length " + std::to_string(bits.size()) + ", expected " +
                     std::to_string(m));
  }
  std::vector<double> onehot(std::size_t{1} << m, 0.0);
  onehot[bits_to_index(bits)] = 1.0;
  return onehot;
}

cplx map_symbol(std::span<const double> onehot, const Constellation& c) {
  if (onehot.size() != c.size()) throw ShapeError("one-hot length does not match constellation");
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < onehot.size(); ++i) acc += onehot[i] * c.point(i);
  return acc;
}

Constellation normalize_power(const Constellation& c) {
  const double p = c.average_power();
  if (!(p > 0.0)) throw DegenerateInputError("cannot normalise an all-zero constellation");
  const double s = 1.0 / std::sqrt(p);
  std::vector<cplx> pts(c.points().begin(), c.points().end());
  for (cplx& x : pts) x *= s;
  return Constellation(c.bits_per_symbol(), std::move(pts));
}

std::uint32_t gray_decode(std::uint32_t g) {
  std::uint32_t v = g;
  for (std::uint32_t shift = 1; shift < 32; shift <<= 1) v ^= v >> shift;
  return v;
}

Constellation square_qam(int m) {
  if (m < 2 || m % 2 != 0) throw ParameterError("square QAM needs an even m >= 2");
  const int half = m / 2;
  const std::uint32_t levels = 1U << half;
  std::vector<cplx> pts(std::size_t{1} << m);
  for (std::uint32_t label = 0; label < pts.size(); ++label) {
    const std::uint32_t hi = label >> half;
    const std::uint32_t lo = label & (levels - 1);
    const double re = 2.0 * gray_decode(hi) - (levels - 1.0);
    const double im = 2.0 * gray_decode(lo) - (levels - 1.0);
    pts[label] = {re, im};
  }
  return normalize_power(Constellation(m, std::move(pts)));
}

Constellation perturbed_square_qam(int m, double sigma, Rng& rng) {
  if (sigma < 0.0) throw ParameterError("perturbation sigma must be non-negative");
  const Constellation base = square_qam(m);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<cplx> pts(base.points().begin(), base.points().end());
  for (cplx& p : pts) {
    const double dr = sigma * noise(rng);
    const double di = sigma * noise(rng);
    p += cplx{dr, di};
  }
  return Constellation(m, std::move(pts));
}

std::string to_tsv(const Constellation& c) {
  std::ostringstream out;
  out << "re\tim\tlabel\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    out << text::format_double(c.point(i).real()) << '\t'
        << text::format_double(c.point(i).imag()) << '\t' << c.label_string(i) << '\n';
  }
  return out.str();
}

Constellation from_tsv(const std::string& contents) {
  std::istringstream in(contents);
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != "re\tim\tlabel") {
    throw InputError("constellation table must start with header 're<TAB>im<TAB>label'");
  }
  std::vector<std::pair<std::string, cplx>> rows;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    const auto cols = text::split(text::trim(line), '\t');
    if (cols.size() != 3) throw InputError("constellation row needs 3 tab-separated columns");
    rows.emplace_back(cols[2], cplx{text::parse_double(cols[0]), text::parse_double(cols[1])});
  }
  if (rows.empty()) throw InputError("constellation table has no rows");
  const int m = static_cast<int>(rows.front().first.size());
  if (rows.size() != (std::size_t{1} << m)) {
    throw InputError("constellation table has " + std::to_string(rows.size()) +
                     " rows but labels of length " + std::to_string(m));
  }
  std::vector<cplx> pts(rows.size());
  std::vector<bool> seen(rows.size(), false);
  for (const auto& [label, p] : rows) {
    if (label.size() != static_cast<std::size_t>(m) ||
        label.find_first_not_of("01") != std::string::npos) {
      throw InputError("bad label '" + label + "'");
    }
    const std::size_t idx = std::stoul(label, nullptr, 2);
    if (seen[idx]) throw InputError("duplicate label '" + label + "'");
    seen[idx] = true;
    pts[idx] = p;
  }
  return Constellation(m, std::move(pts));
}

void write_constellation(const std::string& path, const Constellation& c) {
  text::write_file(path, to_tsv(c));
}

Constellation read_constellation(const std::string& path) {
  return from_tsv(text::read_file(path));
}

namespace ad_ops {

ad::Tensor map_symbols(const ad::Tensor& points, std::span<const std::size_t> indices) {
  if (points.cols() != 2) throw ShapeError("map_symbols: points must be M x 2");
  return ad::gather_rows(points, indices);
}

ad::Tensor normalize_power(const ad::Tensor& points) {
  if (points.cols() != 2) throw ShapeError("normalize_power: points must be M x 2");
  ad::Tape& tape = points.tape();
  const auto& c = tape.value_of(points);
  const double count = static_cast<double>(points.rows());
  double power = 0.0;
  for (double v : c) power += v * v;
  power /= count;
  if (!(power > 0.0)) throw DegenerateInputError("cannot normalise an all-zero constellation");
  const double s = 1.0 / std::sqrt(power);
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = s * c[i];
  return tape.record("normalize_power", points.shape(), std::move(out),
                     [points, s, count](const ad::Tensor& self) {
    ad::Tape& t = self.tape();
    const auto& g = t.grad_of(self);
    const auto& c = t.value_of(points);
    double gc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) gc += g[i] * c[i];
    const double k = s * s * s * gc / count;
    auto& gp = t.grad_of(points);
    for (std::size_t i = 0; i < c.size(); ++i) gp[i] += s * g[i] - k * c[i];
  });
}

}  // namespace ad_ops

}  // namespace gcs
