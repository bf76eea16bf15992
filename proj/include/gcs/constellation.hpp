#pragma once

#include "gcs/numerics.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace gcs {

using cplx = std::complex<double>;
using Rng = std::mt19937_64;

// Bit vector (b_1, ..., b_m); b_1 is the most significant bit of the label.
using BitBlock = std::vector<std::uint8_t>;

// M = 2^m labelled points. points()[i] carries the label whose integer value
// is i, so the labelling is the identity index <-> bit string map.
class Constellation {
 public:
  Constellation() = default;
  Constellation(int m, std::vector<cplx> points);

  int bits_per_symbol() const { return m_; }
  std::size_t size() const { return points_.size(); }
  std::span<const cplx> points() const { return points_; }
  cplx point(std::size_t i) const { return points_.at(i); }

  // Bit `pos` (0-based, 0 = b_1) of the label of point i.
  int bit(std::size_t i, int pos) const { return static_cast<int>((i >> (m_ - 1 - pos)) & 1U); }
  std::string label_string(std::size_t i) const;

  double average_power() const;

  // Interleaved (re, im) coordinates, M x 2 row-major.
  std::vector<double> coordinates() const;
  static Constellation from_coordinates(int m, std::span<const double> coords);

 private:
  int m_ = 0;
  std::vector<cplx> points_;
};

std::size_t bits_to_index(std::span<const std::uint8_t> bits);
BitBlock index_to_bits(std::size_t index, int m);
std::vector<double> bits_to_onehot(std::span<const std::uint8_t> bits, int m);

// Dot product of a one-hot vector with the constellation points.
cplx map_symbol(std::span<const double> onehot, const Constellation& c);

Constellation normalize_power(const Constellation& c);

// Gray-labelled sqrt(M) x sqrt(M) grid with unit average power. The first m/2
// bits select the in-phase amplitude, the last m/2 bits the quadrature one.
Constellation square_qam(int m);

// Square QAM with i.i.d. N(0, sigma^2) added to every coordinate, not
// renormalised (training normalises on every forward pass).
Constellation perturbed_square_qam(int m, double sigma, Rng& rng);

// Gray code of a non-negative integer and its inverse.
inline std::uint32_t gray_encode(std::uint32_t v) { return v ^ (v >> 1); }
std::uint32_t gray_decode(std::uint32_t g);

// Tab-separated "re im label" table with a header row.
std::string to_tsv(const Constellation& c);
Constellation from_tsv(const std::string& text);
void write_constellation(const std::string& path, const Constellation& c);
Constellation read_constellation(const std::string& path);

namespace ad_ops {

// Rows of `points` (M x 2) selected by symbol index; equivalent to the one-hot
// dot product for each symbol.
ad::Tensor map_symbols(const ad::Tensor& points, std::span<const std::size_t> indices);

// Scales M x 2 coordinates to unit average power inside the graph.
ad::Tensor normalize_power(const ad::Tensor& points);

}  // namespace ad_ops

}  // namespace gcs
