#include "gcs/cpe.hpp"
#include "gcs/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace gcs {
namespace {

// Terms further than this many temperatures above the minimum contribute less
// than e^-50 relative weight and are skipped.
constexpr double kCutoff = 50.0;

// Symbols are processed in fixed chunks so the accumulation order of point
// gradients does not depend on the thread count.
constexpr std::size_t kChunk = 64;

struct Geometry {
  std::vector<double> angles;
  std::vector<double> cs;
  std::vector<double> sn;

  explicit Geometry(const BpsConfig& cfg) : angles(test_angles(cfg)) {
    cs.resize(angles.size());
    sn.resize(angles.size());
    for (std::size_t b = 0; b < angles.size(); ++b) {
      cs[b] = std::cos(angles[b]);
      sn[b] = std::sin(angles[b]);
    }
  }
};

struct SoftForward {
  std::vector<double> corrected;  // K x 2
  std::vector<double> weights;    // K x B
};

// Smooth minimum of |r - c_i|^2 over points; writes the per-point exponent
// shift (minimum) and normaliser when requested.
inline double smooth_min(double u, double v, std::span<const double> pts, double tau,
                         double* e_min_out, double* norm_out) {
  const std::size_t m_count = pts.size() / 2;
  double e_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m_count; ++i) {
    const double du = u - pts[2 * i];
    const double dv = v - pts[2 * i + 1];
    e_min = std::min(e_min, du * du + dv * dv);
  }
  const double limit = kCutoff * tau;
  double s = 0.0;
  for (std::size_t i = 0; i < m_count; ++i) {
    const double du = u - pts[2 * i];
    const double dv = v - pts[2 * i + 1];
    const double excess = du * du + dv * dv - e_min;
    if (excess <= limit) s += std::exp(-excess / tau);
  }
  if (e_min_out) *e_min_out = e_min;
  if (norm_out) *norm_out = s;
  return e_min - tau * std::log(s);
}

SoftForward soft_forward(std::span<const double> z, std::span<const double> pts,
                         const BpsConfig& cfg, const Geometry& geo, double tau) {
  const std::size_t k_count = z.size() / 2;
  const std::size_t b_count = geo.angles.size();
  std::vector<double> dist(k_count * b_count);
  const auto kk = static_cast<std::ptrdiff_t>(k_count);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ks = 0; ks < kk; ++ks) {
    const auto k = static_cast<std::size_t>(ks);
    const double zr = z[2 * k], zi = z[2 * k + 1];
    for (std::size_t b = 0; b < b_count; ++b) {
      const double u = zr * geo.cs[b] + zi * geo.sn[b];
      const double v = zi * geo.cs[b] - zr * geo.sn[b];
      dist[k * b_count + b] = smooth_min(u, v, pts, tau, nullptr, nullptr);
    }
  }

  std::vector<double> prefix((k_count + 1) * b_count, 0.0);
  for (std::size_t k = 0; k < k_count; ++k)
    for (std::size_t b = 0; b < b_count; ++b)
      prefix[(k + 1) * b_count + b] = prefix[k * b_count + b] + dist[k * b_count + b];

  SoftForward out;
  out.weights.resize(k_count * b_count);
  out.corrected.resize(2 * k_count);
  const std::ptrdiff_t lead = cfg.lead();
  const std::ptrdiff_t win = cfg.window;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ks = 0; ks < kk; ++ks) {
    const auto k = static_cast<std::size_t>(ks);
    const auto lo = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, ks - lead));
    const auto hi = static_cast<std::size_t>(std::min<std::ptrdiff_t>(kk, ks - lead + win));
    double* w = &out.weights[k * b_count];
    double d_min = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < b_count; ++b) {
      w[b] = prefix[hi * b_count + b] - prefix[lo * b_count + b];
      d_min = std::min(d_min, w[b]);
    }
    double norm = 0.0;
    for (std::size_t b = 0; b < b_count; ++b) {
      w[b] = std::exp(-(w[b] - d_min) / tau);
      norm += w[b];
    }
    const double zr = z[2 * k], zi = z[2 * k + 1];
    double xr = 0.0, xi = 0.0;
    for (std::size_t b = 0; b < b_count; ++b) {
      w[b] /= norm;
      xr += w[b] * (zr * geo.cs[b] + zi * geo.sn[b]);
      xi += w[b] * (zi * geo.cs[b] - zr * geo.sn[b]);
    }
    out.corrected[2 * k] = xr;
    out.corrected[2 * k + 1] = xi;
  }
  return out;
}

void check_inputs(std::size_t k_count, const BpsConfig& cfg) {
  cfg.validate();
  if (k_count < static_cast<std::size_t>(cfg.window)) {
    throw InputError("BPS block of " + std::to_string(k_count) +
                     " symbols is shorter than the window of " + std::to_string(cfg.window));
  }
}

}  // namespace

SoftBpsOutput bps_diff_eval(std::span<const cplx> z, const Constellation& c,
                            const BpsConfig& cfg, Temperature temperature) {
  check_inputs(z.size(), cfg);
  const Geometry geo(cfg);
  std::vector<double> zv(2 * z.size());
  for (std::size_t k = 0; k < z.size(); ++k) {
    zv[2 * k] = z[k].real();
    zv[2 * k + 1] = z[k].imag();
  }
  const std::vector<double> pts = c.coordinates();
  SoftForward fwd = soft_forward(zv, pts, cfg, geo, temperature.value());

  SoftBpsOutput out;
  const std::size_t b_count = geo.angles.size();
  out.corrected.resize(z.size());
  out.dominant_index.resize(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) {
    out.corrected[k] = {fwd.corrected[2 * k], fwd.corrected[2 * k + 1]};
    const auto first = fwd.weights.begin() + static_cast<std::ptrdiff_t>(k * b_count);
    out.dominant_index[k] =
        static_cast<int>(std::max_element(first, first + static_cast<std::ptrdiff_t>(b_count)) - first);
  }
  out.weights = std::move(fwd.weights);
  return out;
}

namespace ad_ops {

ad::Tensor bps_diff(const ad::Tensor& z, const ad::Tensor& points, const BpsConfig& cfg,
                    Temperature temperature) {
  if (z.cols() != 2 || points.cols() != 2) {
    throw ShapeError("bps_diff: symbols and points must be (re, im) column pairs");
  }
  check_inputs(z.rows(), cfg);
  ad::Tape& tape = z.tape();
  auto geo = std::make_shared<Geometry>(cfg);
  const double tau = temperature.value();
  SoftForward fwd = soft_forward(tape.value_of(z), tape.value_of(points), cfg, *geo, tau);
  auto weights = std::make_shared<std::vector<double>>(std::move(fwd.weights));

  return tape.record("bps_diff", z.shape(), std::move(fwd.corrected),
                     [z, points, cfg, tau, geo, weights](const ad::Tensor& self) {
    ad::Tape& t = self.tape();
    const auto& g = t.grad_of(self);
    const auto& zv = t.value_of(z);
    const auto& pts = t.value_of(points);
    const std::size_t k_count = z.rows();
    const std::size_t b_count = geo->angles.size();
    const std::size_t m_count = points.rows();
    const std::vector<double>& w = *weights;
    auto& gz = t.grad_of(z);
    const auto kk = static_cast<std::ptrdiff_t>(k_count);

    // Adjoint of the window metric D_{k,b} through the angle softmin, plus the
    // direct path from x_k to z_k.
    std::vector<double> g_metric(k_count * b_count);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ks = 0; ks < kk; ++ks) {
      const auto k = static_cast<std::size_t>(ks);
      const double zr = zv[2 * k], zi = zv[2 * k + 1];
      const double gr = g[2 * k], gi = g[2 * k + 1];
      const double* wk = &w[k * b_count];
      double mean_a = 0.0;
      double gzr = 0.0, gzi = 0.0;
      for (std::size_t b = 0; b < b_count; ++b) {
        const double u = zr * geo->cs[b] + zi * geo->sn[b];
        const double v = zi * geo->cs[b] - zr * geo->sn[b];
        const double a = gr * u + gi * v;
        g_metric[k * b_count + b] = a;
        mean_a += wk[b] * a;
        // R(+phi) applied to the adjoint.
        gzr += wk[b] * (gr * geo->cs[b] - gi * geo->sn[b]);
        gzi += wk[b] * (gr * geo->sn[b] + gi * geo->cs[b]);
      }
      for (std::size_t b = 0; b < b_count; ++b) {
        double& gm = g_metric[k * b_count + b];
        gm = -wk[b] * (gm - mean_a) / tau;
      }
      gz[2 * k] += gzr;
      gz[2 * k + 1] += gzi;
    }

    // d_{j,b} enters D_{k,b} for k in [j - window + 1 + lead, j + lead].
    std::vector<double> prefix((k_count + 1) * b_count, 0.0);
    for (std::size_t k = 0; k < k_count; ++k)
      for (std::size_t b = 0; b < b_count; ++b)
        prefix[(k + 1) * b_count + b] = prefix[k * b_count + b] + g_metric[k * b_count + b];

    const std::ptrdiff_t lead = cfg.lead();
    const std::ptrdiff_t win = cfg.window;
    const std::size_t n_chunks = (k_count + kChunk - 1) / kChunk;
    std::vector<double> g_points(n_chunks * m_count * 2, 0.0);
    const auto cc = static_cast<std::ptrdiff_t>(n_chunks);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t chunk = 0; chunk < cc; ++chunk) {
      double* gp = &g_points[static_cast<std::size_t>(chunk) * m_count * 2];
      const std::size_t begin = static_cast<std::size_t>(chunk) * kChunk;
      const std::size_t end = std::min(k_count, begin + kChunk);
      for (std::size_t j = begin; j < end; ++j) {
        const auto js = static_cast<std::ptrdiff_t>(j);
        const auto lo = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, js - win + 1 + lead));
        const auto hi = static_cast<std::size_t>(std::min<std::ptrdiff_t>(kk, js + lead + 1));
        const double zr = zv[2 * j], zi = zv[2 * j + 1];
        double gzr = 0.0, gzi = 0.0;
        for (std::size_t b = 0; b < b_count; ++b) {
          const double gd = prefix[hi * b_count + b] - prefix[lo * b_count + b];
          if (gd == 0.0) continue;
          const double u = zr * geo->cs[b] + zi * geo->sn[b];
          const double v = zi * geo->cs[b] - zr * geo->sn[b];
          double e_min = 0.0, norm = 0.0;
          smooth_min(u, v, pts, tau, &e_min, &norm);
          const double limit = kCutoff * tau;
          double gu = 0.0, gv = 0.0;
          for (std::size_t i = 0; i < m_count; ++i) {
            const double du = u - pts[2 * i];
            const double dv = v - pts[2 * i + 1];
            const double excess = du * du + dv * dv - e_min;
            if (excess > limit) continue;
            const double coef = 2.0 * gd * std::exp(-excess / tau) / norm;
            gu += coef * du;
            gv += coef * dv;
            gp[2 * i] -= coef * du;
            gp[2 * i + 1] -= coef * dv;
          }
          gzr += gu * geo->cs[b] - gv * geo->sn[b];
          gzi += gu * geo->sn[b] + gv * geo->cs[b];
        }
        gz[2 * j] += gzr;
        gz[2 * j + 1] += gzi;
      }
    }
    auto& g_pts = t.grad_of(points);
    for (std::size_t chunk = 0; chunk < n_chunks; ++chunk)
      for (std::size_t i = 0; i < 2 * m_count; ++i) g_pts[i] += g_points[chunk * m_count * 2 + i];
  });
}

}  // namespace ad_ops

}  // namespace gcs
