#include "gcs/demapper.hpp"
#include "gcs/error.hpp"

#include <cmath>

namespace gcs {

long long count_multiplications(DemapperKind kind, int m, int n, int layers, int k) {
  if (m < 1) throw ParameterError("m must be >= 1");
  const long long mm = m, nn = n, ll = layers;
  switch (kind) {
    case DemapperKind::Gaussian:
      return 4LL << m;
    case DemapperKind::NnFull:
      if (n < 1 || layers < 1 || k < 1) throw ParameterError("network sizes must be >= 1");
      return k * nn + (ll - 1) * nn + nn * mm;
    case DemapperKind::NnSeparated:
      if (n < 1 || layers < 1) throw ParameterError("network sizes must be >= 1");
      if (m % 2 != 0) throw ParameterError("separated demapper needs an even m");
      return 2 * (1 * nn + (ll - 1) * nn + nn * (mm / 2));
  }
  throw ParameterError("unknown demapper kind");
}

int equal_complexity_width(int m) {
  if (m < 1) throw ParameterError("m must be >= 1");
  return static_cast<int>(std::lround(4.0 * std::ldexp(1.0, m) / (m + 2)));
}

}  // namespace gcs
