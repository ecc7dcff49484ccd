#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "antgen/core.hpp"
#include "antgen/intensity.hpp"
#include "antgen/rng.hpp"

namespace antgen {

/// Per-point retention probability, range [0,1].
using RetentionFunction = std::function<double(const Point&)>;

namespace detail {

inline std::size_t draw_poisson(Rng& rng, double mean) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<long long> dist(mean);
  const long long n = dist(rng);
  return n > 0 ? static_cast<std::size_t>(n) : 0;
}

inline void append_uniform(Rng& rng, const Window& w, std::size_t n, std::vector<Point>& out) {
  std::uniform_real_distribution<double> ux(w.a(), w.b());
  std::uniform_real_distribution<double> uy(w.c(), w.d());
  for (std::size_t k = 0; k < n; ++k) {
    const double x = ux(rng);
    const double y = uy(rng);
    out.push_back({x, y});
  }
}

}  // namespace detail

/// Homogeneous Poisson process on a window: the count is Poisson with mean
/// rate * area, then that many independent uniform points.
inline PointPattern simulate_homogeneous(double rate, const Window& window, Seed seed) {
  if (!std::isfinite(rate) || rate < 0.0) throw Error("rate must be nonnegative");
  Rng rng(seed);
  const std::size_t n = detail::draw_poisson(rng, rate * window.area());
  std::vector<Point> pts;
  pts.reserve(n);
  detail::append_uniform(rng, window, n, pts);
  return PointPattern(window, std::move(pts));
}

enum class CellEval : std::uint8_t { lower_left, midpoint };

/// Inhomogeneous simulation by grid partition: the field box is split into
/// m_sim x m_sim rectangles, each simulated as a homogeneous process at the
/// intensity evaluated at the cell's lower-left corner (midpoint behind the
/// flag). Cells are visited row by row in y, then x, and concatenated.
inline PointPattern simulate_inhomogeneous_grid(const IntensityField& field, int m_sim, Seed seed,
                                                CellEval eval = CellEval::lower_left) {
  if (m_sim < 1) throw Error("grid partition needs at least 1 cell per side");
  const Window& box = field.box();
  Rng rng(seed);
  const double wx = box.width() / m_sim;
  const double wy = box.height() / m_sim;
  std::vector<Point> pts;
  for (int i = 0; i < m_sim; ++i) {
    for (int j = 0; j < m_sim; ++j) {
      const double x0 = box.a() + wx * j;
      const double y0 = box.c() + wy * i;
      const Point where = (eval == CellEval::lower_left)
                              ? Point{x0, y0}
                              : Point{x0 + wx / 2.0, y0 + wy / 2.0};
      const double rate = field.evaluate(where);
      const std::size_t n = detail::draw_poisson(rng, rate * wx * wy);
      Window cell(x0, x0 + wx, y0, y0 + wy);
      detail::append_uniform(rng, cell, n, pts);
    }
  }
  return PointPattern(box, std::move(pts));
}

/// Inhomogeneous simulation by thinning a dominating homogeneous process:
/// simulate at rate lmax on the field box, keep each point with probability
/// field(x) / lmax. lmax must dominate the field.
inline PointPattern simulate_inhomogeneous_reject(const IntensityField& field, double lmax,
                                                  Seed seed) {
  if (!std::isfinite(lmax) || lmax < 0.0) throw Error("dominating rate must be nonnegative");
  if (lmax < field.max_value()) throw Error("dominating rate too small");
  const Window& box = field.box();
  Rng rng(seed);
  const std::size_t n = detail::draw_poisson(rng, lmax * box.area());
  std::uniform_real_distribution<double> ux(box.a(), box.b());
  std::uniform_real_distribution<double> uy(box.c(), box.d());
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Point> pts;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = ux(rng);
    const double y = uy(rng);
    const double u = u01(rng);
    if (lmax > 0.0 && u < field.evaluate({x, y}) / lmax) pts.push_back({x, y});
  }
  return PointPattern(box, std::move(pts));
}

/// Location-dependent thinning: each point is kept independently with
/// probability p(x), order preserved. One uniform draw is consumed per input
/// point whether or not it survives.
inline PointPattern thin(const PointPattern& pattern, const RetentionFunction& p, Seed seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Point> kept;
  for (const Point& x : pattern.points()) {
    const double prob = p(x);
    if (!std::isfinite(prob) || prob < 0.0 || prob > 1.0) {
      throw Error("retention probability outside [0,1]");
    }
    if (u01(rng) < prob) kept.push_back(x);
  }
  return PointPattern(pattern.window(), std::move(kept));
}

enum class HomogenizeRule : std::uint8_t {
  // p(x) = rho_min / rho(x): always a valid probability, target rate rho_min.
  scale_free,
  // p(x) = 1 / rho(x): requires rho >= 1 on the window, target rate 1.
  reciprocal,
};

struct HomogenizeResult {
  PointPattern pattern;
  double rate = 0.0;  // intensity of the homogeneous process the thinning targets
};

/// Thinning with p proportional to 1/rho so the surviving process is
/// homogeneous. The field must be strictly positive over the pattern window.
inline HomogenizeResult homogenize(const PointPattern& pattern, const IntensityField& field,
                                   Seed seed, HomogenizeRule rule = HomogenizeRule::scale_free) {
  if (!field.box().contains(pattern.window())) {
    throw Error("field box does not cover the pattern window");
  }
  const double rho_min = field.min_value_near(pattern.window());
  if (!(rho_min > 0.0)) throw Error("intensity vanishes on window");
  if (rule == HomogenizeRule::reciprocal && rho_min < 1.0) {
    throw Error("reciprocal homogenization requires intensity >= 1 on the window");
  }
  const double target = (rule == HomogenizeRule::scale_free) ? rho_min : 1.0;
  PointPattern thinned = thin(
      pattern, [&](const Point& x) { return target / field.evaluate(x); }, seed);
  return {std::move(thinned), target};
}

}  // namespace antgen
