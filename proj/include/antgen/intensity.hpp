#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "antgen/core.hpp"
#include "antgen/parallel.hpp"

namespace antgen {

enum class Kernel : std::uint8_t { gaussian };

/// Bandwidth (same units as coordinates) plus kernel choice.
/// Only the isotropic bivariate Gaussian is available.
struct KernelConfig {
  double bandwidth;
  Kernel kernel = Kernel::gaussian;

  explicit KernelConfig(double b) : bandwidth(b) {
    if (!std::isfinite(b) || !(b > 0.0)) throw Error("bandwidth must be positive and finite");
  }
};

/// Standard bivariate Gaussian density scaled to bandwidth b:
/// k_b(d) = exp(-|d|^2 / (2 b^2)) / (2 pi b^2). Integrates to 1 over the plane.
inline double gaussian_kernel(double dx, double dy, double b) {
  const double s2 = (dx * dx + dy * dy) / (2.0 * b * b);
  return std::exp(-s2) / (2.0 * std::numbers::pi * b * b);
}

enum class FieldInterp : std::uint8_t { nearest, bilinear };

/// Nonnegative intensity sampled at the m x m intersections of grid lines
/// spanning `box`. Node (i,j) sits at (a + i*hx, c + j*hy) with
/// hx = (b-a)/(m-1). `fixed` marks nodes whose values are data-constrained.
class IntensityField {
 public:
  IntensityField(Window box, int m, std::vector<double> values, std::vector<std::uint8_t> fixed)
      : box_(box), m_(m), values_(std::move(values)), fixed_(std::move(fixed)) {
    if (m_ < 2) throw Error("grid resolution must be at least 2 nodes per side");
    const std::size_t n = static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_);
    if (values_.size() != n || fixed_.size() != n) {
      throw Error("field value/mask size does not match grid resolution");
    }
    for (double v : values_) {
      if (!std::isfinite(v) || v < 0.0) throw Error("field values must be finite and nonnegative");
    }
  }

  const Window& box() const { return box_; }
  int resolution() const { return m_; }
  double spacing_x() const { return box_.width() / (m_ - 1); }
  double spacing_y() const { return box_.height() / (m_ - 1); }

  double at(int i, int j) const { return values_[index(i, j)]; }
  bool fixed_at(int i, int j) const { return fixed_[index(i, j)] != 0; }
  Point node(int i, int j) const {
    return {box_.a() + i * spacing_x(), box_.c() + j * spacing_y()};
  }

  const std::vector<double>& values() const { return values_; }
  const std::vector<std::uint8_t>& fixed_mask() const { return fixed_; }

  double max_value() const { return *std::max_element(values_.begin(), values_.end()); }
  double min_value() const { return *std::min_element(values_.begin(), values_.end()); }

  double max_fixed_value() const {
    double v = 0.0;
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (fixed_[k]) v = std::max(v, values_[k]);
    }
    return v;
  }

  bool any_fixed() const {
    return std::any_of(fixed_.begin(), fixed_.end(), [](std::uint8_t f) { return f != 0; });
  }

  /// Value at a query point inside the box. Nearest grid node by default
  /// (ties toward lower indices); bilinear available behind the flag.
  double evaluate(const Point& p, FieldInterp interp = FieldInterp::nearest) const {
    if (!box_.contains(p)) throw Error("field query lies outside the box");
    const double tx = (p.x - box_.a()) / spacing_x();
    const double ty = (p.y - box_.c()) / spacing_y();
    if (interp == FieldInterp::nearest) {
      const int i = clamp_index(static_cast<int>(std::ceil(tx - 0.5)));
      const int j = clamp_index(static_cast<int>(std::ceil(ty - 0.5)));
      return at(i, j);
    }
    const int i0 = clamp_index(static_cast<int>(std::floor(tx)));
    const int j0 = clamp_index(static_cast<int>(std::floor(ty)));
    const int i1 = clamp_index(i0 + 1);
    const int j1 = clamp_index(j0 + 1);
    const double fx = std::min(std::max(tx - i0, 0.0), 1.0);
    const double fy = std::min(std::max(ty - j0, 0.0), 1.0);
    const double lo = at(i0, j0) * (1.0 - fx) + at(i1, j0) * fx;
    const double hi = at(i0, j1) * (1.0 - fx) + at(i1, j1) * fx;
    return lo * (1.0 - fy) + hi * fy;
  }

  /// Minimum node value over nodes whose nearest-node cell intersects `w`.
  /// This is the largest constant rho_min with rho_min <= evaluate(x) for all
  /// x in w, which is what location-dependent thinning needs.
  double min_value_near(const Window& w) const {
    const double hx = spacing_x();
    const double hy = spacing_y();
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m_; ++i) {
      const double x = box_.a() + i * hx;
      const double cell_lo_x = std::max(x - hx / 2.0, box_.a());
      const double cell_hi_x = std::min(x + hx / 2.0, box_.b());
      if (cell_hi_x < w.a() || cell_lo_x > w.b()) continue;
      for (int j = 0; j < m_; ++j) {
        const double y = box_.c() + j * hy;
        const double cell_lo_y = std::max(y - hy / 2.0, box_.c());
        const double cell_hi_y = std::min(y + hy / 2.0, box_.d());
        if (cell_hi_y < w.c() || cell_lo_y > w.d()) continue;
        best = std::min(best, at(i, j));
      }
    }
    if (!std::isfinite(best)) throw Error("window does not intersect the field box");
    return best;
  }

 private:
  int clamp_index(int i) const { return std::min(std::max(i, 0), m_ - 1); }
  std::size_t index(int i, int j) const {
    if (i < 0 || i >= m_ || j < 0 || j >= m_) throw Error("field node index out of range");
    return static_cast<std::size_t>(i) * m_ + j;
  }

  Window box_;
  int m_;
  std::vector<double> values_;
  std::vector<std::uint8_t> fixed_;
};

/// Maximum-likelihood intensity of a homogeneous process: N / Area.
inline double estimate_homogeneous(const PointPattern& pattern) {
  return static_cast<double>(pattern.size()) / pattern.window().area();
}

/// Kernel estimate of the intensity at a query point:
/// rho_hat(x) = sum over data points of k_b(x - zeta).
inline double kernel_intensity(const PointPattern& pattern, const KernelConfig& config,
                               const Point& query) {
  double sum = 0.0;
  for (const Point& z : pattern.points()) {
    sum += gaussian_kernel(query.x - z.x, query.y - z.y, config.bandwidth);
  }
  return sum;
}

namespace detail {

// Midpoint quadrature grid used by the leave-one-out risk. The L2 norm is
// integrated over the window inflated by 4b per side; the Gaussian tail
// beyond that contributes under 0.01%.
constexpr int kLooQuadNodes = 128;
constexpr double kLooInflationBandwidths = 4.0;
// Kernel sums ignore contributions beyond 6b (relative error ~1e-8).
constexpr double kKernelCutoffBandwidths = 6.0;

struct QuadGrid {
  double lo_x, lo_y, hx, hy;
  int nx, ny;

  Point center(int i, int j) const { return {lo_x + (i + 0.5) * hx, lo_y + (j + 0.5) * hy}; }
  double cell_area() const { return hx * hy; }
};

inline QuadGrid loo_quad_grid(const Window& w, double b) {
  const double margin = kLooInflationBandwidths * b;
  QuadGrid g;
  g.nx = kLooQuadNodes;
  g.ny = kLooQuadNodes;
  g.lo_x = w.a() - margin;
  g.lo_y = w.c() - margin;
  g.hx = (w.width() + 2.0 * margin) / g.nx;
  g.hy = (w.height() + 2.0 * margin) / g.ny;
  return g;
}

// Adds k_b(center - z) to acc over all cells within the cutoff radius of z.
template <typename Acc>
inline void for_cells_near(const QuadGrid& g, const Point& z, double b, Acc&& acc) {
  const double r = kKernelCutoffBandwidths * b;
  const int i0 = std::max(0, static_cast<int>(std::floor((z.x - r - g.lo_x) / g.hx)));
  const int i1 = std::min(g.nx - 1, static_cast<int>(std::ceil((z.x + r - g.lo_x) / g.hx)));
  const int j0 = std::max(0, static_cast<int>(std::floor((z.y - r - g.lo_y) / g.hy)));
  const int j1 = std::min(g.ny - 1, static_cast<int>(std::ceil((z.y + r - g.lo_y) / g.hy)));
  const double inv2b2 = 1.0 / (2.0 * b * b);
  const double norm = 1.0 / (2.0 * std::numbers::pi * b * b);
  for (int i = i0; i <= i1; ++i) {
    const double dx = g.lo_x + (i + 0.5) * g.hx - z.x;
    for (int j = j0; j <= j1; ++j) {
      const double dy = g.lo_y + (j + 0.5) * g.hy - z.y;
      acc(i * g.ny + j, norm * std::exp(-(dx * dx + dy * dy) * inv2b2));
    }
  }
}

}  // namespace detail

/// Leave-one-out cross-validation estimate of the L2 risk of rho_hat_b:
/// mean over points zeta of ||rho_hat^zeta||_2^2 - 2 rho_hat^zeta(zeta),
/// where rho_hat^zeta omits zeta. The squared norm uses midpoint quadrature
/// on a 128x128 grid over the window inflated by 4b per side.
inline double loo_risk(const PointPattern& pattern, const KernelConfig& config) {
  const std::size_t n = pattern.size();
  if (n < 2) throw Error("insufficient data: leave-one-out risk needs at least 2 points");
  const double b = config.bandwidth;
  const auto& pts = pattern.points();
  const detail::QuadGrid grid = detail::loo_quad_grid(pattern.window(), b);
  const double cell = grid.cell_area();

  // Full-sample kernel sum S on the quadrature grid.
  std::vector<double> s(static_cast<std::size_t>(grid.nx) * grid.ny, 0.0);
  for (const Point& z : pts) {
    detail::for_cells_near(grid, z, b, [&](std::size_t k, double v) { s[k] += v; });
  }
  double norm_ss = 0.0;
  for (double v : s) norm_ss += v * v;
  norm_ss *= cell;

  const double k0 = 1.0 / (2.0 * std::numbers::pi * b * b);
  double total = 0.0;
  for (std::size_t zi = 0; zi < n; ++zi) {
    const Point& z = pts[zi];
    // ||S - k_b(.-z)||^2 = ||S||^2 - 2 <S, k_z> + ||k_z||^2 on the same grid.
    double cross = 0.0;
    double self = 0.0;
    detail::for_cells_near(grid, z, b, [&](std::size_t k, double v) {
      cross += s[k] * v;
      self += v * v;
    });
    const double norm_loo = norm_ss - 2.0 * cell * cross + cell * self;
    double at_z = 0.0;
    for (const Point& other : pts) {
      at_z += gaussian_kernel(z.x - other.x, z.y - other.y, b);
    }
    at_z -= k0;  // drop the point's own kernel
    total += norm_loo - 2.0 * at_z;
  }
  return total / static_cast<double>(n);
}

/// Risk estimates along a strictly increasing bandwidth grid.
struct RiskCurve {
  std::vector<double> bandwidths;
  std::vector<double> risks;

  RiskCurve() = default;
  RiskCurve(std::vector<double> b, std::vector<double> r)
      : bandwidths(std::move(b)), risks(std::move(r)) {
    if (bandwidths.size() != risks.size()) throw Error("risk curve columns differ in length");
    for (std::size_t i = 0; i < bandwidths.size(); ++i) {
      if (!(bandwidths[i] > 0.0)) throw Error("risk curve bandwidths must be positive");
      if (i > 0 && !(bandwidths[i] > bandwidths[i - 1])) {
        throw Error("risk curve bandwidths must be strictly increasing");
      }
    }
  }
};

struct BandwidthSelection {
  double bandwidth = 0.0;
  RiskCurve curve;
};

/// Evaluates the LOO risk over the candidate grid and returns the first
/// minimizer plus the whole curve. Candidates are evaluated independently
/// (and possibly concurrently); the result does not depend on order.
inline BandwidthSelection select_bandwidth(const PointPattern& pattern,
                                           const std::vector<double>& candidates) {
  if (candidates.size() < 2) throw Error("bandwidth selection needs at least 2 candidates");
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!(candidates[i] > 0.0)) throw Error("bandwidth candidates must be positive");
    if (i > 0 && !(candidates[i] > candidates[i - 1])) {
      throw Error("bandwidth candidates must be strictly increasing");
    }
  }
  if (pattern.size() < 2) throw Error("insufficient data: bandwidth selection needs at least 2 points");

  std::vector<double> risks(candidates.size(), 0.0);
  parallel_for(candidates.size(), [&](std::size_t i) {
    risks[i] = loo_risk(pattern, KernelConfig(candidates[i]));
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < risks.size(); ++i) {
    if (risks[i] < risks[best]) best = i;  // first minimum wins ties
  }
  return {candidates[best], RiskCurve(candidates, risks)};
}

/// Default CLI candidate grid: 20 geometrically spaced bandwidths spanning
/// [diam/100, diam] of the window.
inline std::vector<double> default_bandwidth_candidates(const Window& window, int count = 20) {
  if (count < 2) throw Error("candidate count must be at least 2");
  const double lo = window.diameter() / 100.0;
  const double hi = window.diameter();
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  }
  return out;
}

/// Samples the kernel estimate on an m x m node grid over `box` (which must
/// contain the pattern window). Nodes inside the window are marked fixed.
inline IntensityField fit_field(const PointPattern& pattern, const KernelConfig& config,
                                const Window& box, int m) {
  if (m < 2) throw Error("grid resolution must be at least 2 nodes per side");
  if (!box.contains(pattern.window())) throw Error("box smaller than the pattern window");
  const std::size_t total = static_cast<std::size_t>(m) * m;
  std::vector<double> values(total, 0.0);
  std::vector<std::uint8_t> fixed(total, 0);
  const double hx = box.width() / (m - 1);
  const double hy = box.height() / (m - 1);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const Point node{box.a() + i * hx, box.c() + j * hy};
      values[static_cast<std::size_t>(i) * m + j] = kernel_intensity(pattern, config, node);
      fixed[static_cast<std::size_t>(i) * m + j] = pattern.window().contains(node) ? 1 : 0;
    }
  }
  return IntensityField(box, m, std::move(values), std::move(fixed));
}

struct ExtensionResult {
  IntensityField field;
  bool degenerate = false;  // no fixed nodes: the solution is identically zero
  long sweeps = 0;
  double max_residual = 0.0;
};

namespace detail {
constexpr double kLaplaceTolFactor = 1e-8;  // of the maximum fixed value
constexpr long kLaplaceSweepCap = 1000000;
constexpr int kLaplaceCheckEvery = 16;
}  // namespace detail

/// Harmonic extension on the grid: every non-fixed interior node is driven to
/// the mean of its 4 neighbors by Gauss-Seidel sweeps. Fixed nodes keep their
/// values; non-fixed nodes on the outermost ring are forced to 0. Free nodes
/// start from 0, so every iterate stays within [0, max fixed value].
inline ExtensionResult harmonic_extension(const IntensityField& input) {
  const int m = input.resolution();
  std::vector<double> v = input.values();
  const std::vector<std::uint8_t>& fixed = input.fixed_mask();
  const auto idx = [m](int i, int j) { return static_cast<std::size_t>(i) * m + j; };

  const bool any_fixed = input.any_fixed();
  const double max_fixed = input.max_fixed_value();
  const double tol = detail::kLaplaceTolFactor * max_fixed;

  // Zero both the non-fixed outer ring (Dirichlet data) and the free interior
  // (cold start); Gauss-Seidel averages then never leave [0, max fixed value].
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!fixed[k]) v[k] = 0.0;
  }

  const auto residual = [&]() {
    double r = 0.0;
    for (int i = 1; i < m - 1; ++i) {
      for (int j = 1; j < m - 1; ++j) {
        if (fixed[idx(i, j)]) continue;
        const double mean =
            (v[idx(i + 1, j)] + v[idx(i, j + 1)] + v[idx(i - 1, j)] + v[idx(i, j - 1)]) / 4.0;
        r = std::max(r, std::abs(v[idx(i, j)] - mean));
      }
    }
    return r;
  };

  long sweeps = 0;
  double res = residual();
  while (res > tol && sweeps < detail::kLaplaceSweepCap) {
    for (int step = 0; step < detail::kLaplaceCheckEvery && sweeps < detail::kLaplaceSweepCap;
         ++step) {
      for (int i = 1; i < m - 1; ++i) {
        for (int j = 1; j < m - 1; ++j) {
          if (fixed[idx(i, j)]) continue;
          v[idx(i, j)] =
              (v[idx(i + 1, j)] + v[idx(i, j + 1)] + v[idx(i - 1, j)] + v[idx(i, j - 1)]) / 4.0;
        }
      }
      ++sweeps;
    }
    res = residual();
  }

  return ExtensionResult{IntensityField(input.box(), m, std::move(v), input.fixed_mask()),
                         !any_fixed, sweeps, res};
}

}  // namespace antgen
