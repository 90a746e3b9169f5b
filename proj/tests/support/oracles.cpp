#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace apf::oracle {

ComplexPlane naive_dft(const Plane& values, int pw, int ph) {
  ComplexPlane out(pw, ph);
  for (int v = 0; v < ph; ++v)
    for (int u = 0; u < pw; ++u) {
      std::complex<double> acc;
      for (int y = 0; y < values.height(); ++y)
        for (int x = 0; x < values.width(); ++x) {
          const double phase = -2.0 * std::numbers::pi * (static_cast<double>(u) * x / pw + static_cast<double>(v) * y / ph);
          acc += values(x, y) * std::polar(1.0, phase);
        }
      out(u, v) = acc;
    }
  return out;
}

ComplexPlane naive_kernel_spectrum(const Plane& kernel, int cx, int cy, int w, int h) {
  ComplexPlane out(w, h);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      std::complex<double> acc;
      for (int y = 0; y < kernel.height(); ++y)
        for (int x = 0; x < kernel.width(); ++x) {
          const double phase =
              -2.0 * std::numbers::pi * (static_cast<double>(u) * (x - cx) / w + static_cast<double>(v) * (y - cy) / h);
          acc += kernel(x, y) * std::polar(1.0, phase);
        }
      out(u, v) = acc;
    }
  return out;
}

Plane direct_convolution(const Plane& img, const Plane& kernel, int cx, int cy) {
  Plane out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      double acc = 0.0;
      for (int j = 0; j < kernel.height(); ++j)
        for (int i = 0; i < kernel.width(); ++i) {
          // out(x) = sum_t k(t) img(x - t), t measured from the kernel origin.
          int sx = x - (i - cx);
          int sy = y - (j - cy);
          sx = sx < 0 ? 0 : (sx >= img.width() ? img.width() - 1 : sx);
          sy = sy < 0 ? 0 : (sy >= img.height() ? img.height() - 1 : sy);
          acc += kernel(i, j) * img(sx, sy);
        }
      out(x, y) = acc;
    }
  return out;
}

double photons(double q, double reflectivity, double t, double pixel_um, double f_number, double lux) {
  const double pixel_m = pixel_um / 1e6;
  const double area = pixel_m * pixel_m;
  return 1e15 * (1.0 / (f_number * f_number)) * reflectivity * lux * q * area * t;
}

double r_metric(const ComplexPlane& k, double sigma_r, double j, int n, const Plane& a1) {
  const double jn = n * j;
  double sum = 0.0;
  for (int v = 0; v < k.height(); ++v)
    for (int u = 0; u < k.width(); ++u) {
      const double c2 = (sigma_r * sigma_r + jn) / (jn * jn * a1(u, v));
      const double mag2 = k(u, v).real() * k(u, v).real() + k(u, v).imag() * k(u, v).imag();
      sum += (sigma_r * sigma_r + jn) / (mag2 + c2);
    }
  return sum / (n * n);
}

double d_metric(const ComplexPlane& k2, const ComplexPlane& k1, double sigma_r, double j, int n, const Plane& a1) {
  const double jn = n * j;
  double sum = 0.0;
  for (int v = 0; v < k2.height(); ++v)
    for (int u = 0; u < k2.width(); ++u) {
      const double c2 = (sigma_r * sigma_r + jn) / (jn * jn * a1(u, v));
      const double mag2 = std::abs(k2(u, v)) * std::abs(k2(u, v));
      const double diff = std::abs(k2(u, v) - k1(u, v));
      sum += jn * jn * a1(u, v) * mag2 / ((mag2 + c2) * (mag2 + c2)) * diff * diff;
    }
  return sum / (n * n);
}

std::vector<std::size_t> non_dominated(const std::vector<std::array<double, 2>>& pts) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      if (i == j) continue;
      const bool no_worse = pts[j][0] <= pts[i][0] && pts[j][1] <= pts[i][1];
      const bool better = pts[j][0] < pts[i][0] || pts[j][1] < pts[i][1];
      dominated = no_worse && better;
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

double brute_min_cut(int n, const std::vector<double>& source_caps, const std::vector<double>& sink_caps,
                     const std::vector<CutEdge>& edges) {
  double best = std::numeric_limits<double>::infinity();
  for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
    // bit set: node on the sink side
    double cut = 0.0;
    for (int i = 0; i < n; ++i) cut += ((mask >> i) & 1u) ? source_caps[static_cast<std::size_t>(i)]
                                                          : sink_caps[static_cast<std::size_t>(i)];
    for (const CutEdge& e : edges)
      if (!((mask >> e.from) & 1u) && ((mask >> e.to) & 1u)) cut += e.cap;
    best = std::min(best, cut);
  }
  return best;
}

Grid<int> icm(const DataTerm& data, const Image& img, const MrfParams& params, Grid<int> labels, int max_sweeps) {
  const int w = data.width;
  const int h = data.height;
  auto lambda = [&](int x0, int y0, int x1, int y1) {
    const double d = img(x0, y0) - img(x1, y1);
    const double v = params.lambda0 * std::exp(-d * d / (params.sigma_lambda * params.sigma_lambda));
    return v < 1e-300 ? 0.0 : v;
  };
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool changed = false;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        int best = labels(x, y);
        double best_e = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < data.labels(); ++k) {
          double e = data.at(x, y, k);
          for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
              if ((dx == 0 && dy == 0) || x + dx < 0 || y + dy < 0 || x + dx >= w || y + dy >= h) continue;
              e += lambda(x, y, x + dx, y + dy) * std::abs(static_cast<int>(k) - labels(x + dx, y + dy));
            }
          if (e < best_e - 1e-12) {
            best_e = e;
            best = static_cast<int>(k);
          }
        }
        if (best != labels(x, y)) {
          labels(x, y) = best;
          changed = true;
        }
      }
    if (!changed) break;
  }
  return labels;
}

}  // namespace apf::oracle
