#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "antgen/core.hpp"
#include "antgen/intensity.hpp"
#include "antgen/parallel.hpp"
#include "antgen/rng.hpp"
#include "antgen/simulate.hpp"

namespace antgen {

enum class KEstimator : std::uint8_t { naive, ripley_corrected, theoretical_poisson };

/// Which notion of "proportion of the disk inside the window" weights pairs:
/// the disk's area (default) or its circumference.
enum class EdgeWeight : std::uint8_t { disk_area, circumference };

/// Sampled K function estimate over a strictly increasing t grid.
struct KFunction {
  std::vector<double> t;
  std::vector<double> values;
  KEstimator estimator = KEstimator::naive;
  double lambda_hat = 0.0;  // n/area used inside the estimator, 0 for theoretical

  KFunction() = default;
  KFunction(std::vector<double> t_grid, std::vector<double> v, KEstimator e, double lambda)
      : t(std::move(t_grid)), values(std::move(v)), estimator(e), lambda_hat(lambda) {
    if (t.size() != values.size()) throw Error("K function columns differ in length");
    validate_t_grid(t);
  }

  static void validate_t_grid(const std::vector<double>& t) {
    if (t.empty()) throw Error("t grid is empty");
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!std::isfinite(t[i]) || t[i] < 0.0) throw Error("t grid values must be nonnegative");
      if (i > 0 && !(t[i] > t[i - 1])) throw Error("t grid must be strictly increasing");
    }
  }
};

namespace detail {

inline double circle_segment_antiderivative(double y, double r) {
  const double yy = std::min(std::max(y, -r), r);
  const double s = std::sqrt(std::max(r * r - yy * yy, 0.0));
  const double arg = std::min(std::max(yy / r, -1.0), 1.0);
  return (yy * s + r * r * std::asin(arg)) / 2.0;
}

// Area of {X^2+Y^2 <= r^2, X <= x, Y <= y} for a disk of radius r at the origin.
inline double disk_corner_area(double x, double y, double r) {
  if (x <= -r || y <= -r) return 0.0;
  const auto T = [r](double v) { return circle_segment_antiderivative(v, r); };
  const double yc = std::min(y, r);
  if (x >= r) return 2.0 * (T(yc) - T(-r));
  const double u = std::sqrt(std::max(r * r - x * x, 0.0));
  if (x >= 0.0) {
    if (yc <= -u) return 2.0 * (T(yc) - T(-r));
    double area = 2.0 * (T(-u) - T(-r));
    const double ym = std::min(yc, u);
    area += x * (ym + u) + T(ym) - T(-u);
    if (yc > u) area += 2.0 * (T(yc) - T(u));
    return area;
  }
  if (yc <= -u) return 0.0;
  const double ym = std::min(yc, u);
  return x * (ym + u) + T(ym) - T(-u);
}

}  // namespace detail

/// Fraction of the disk D(center, r) whose area lies inside the window.
/// Exact closed form; r = 0 counts as fully inside.
inline double disk_rect_area_fraction(const Point& center, double r, const Window& w) {
  if (r <= 0.0) return 1.0;
  const double x1 = w.a() - center.x;
  const double x2 = w.b() - center.x;
  const double y1 = w.c() - center.y;
  const double y2 = w.d() - center.y;
  const double area = detail::disk_corner_area(x2, y2, r) - detail::disk_corner_area(x1, y2, r) -
                      detail::disk_corner_area(x2, y1, r) + detail::disk_corner_area(x1, y1, r);
  return std::min(std::max(area / (std::numbers::pi * r * r), 0.0), 1.0);
}

/// Fraction of the circle of radius r around `center` (arc length) inside the
/// window. Exact closed form via the union of the four outside arcs.
inline double circle_rect_arc_fraction(const Point& center, double r, const Window& w) {
  if (r <= 0.0) return 1.0;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<std::pair<double, double>> outside;  // angular intervals, may wrap
  const auto add = [&](double mid, double half_width) {
    if (half_width <= 0.0) return;
    outside.emplace_back(mid - half_width, mid + half_width);
  };
  const auto clamped_acos = [](double v) { return std::acos(std::min(std::max(v, -1.0), 1.0)); };
  const auto clamped_asin = [](double v) { return std::asin(std::min(std::max(v, -1.0), 1.0)); };

  const double tr = (w.b() - center.x) / r;  // cos(theta) > tr is outside right
  if (tr < 1.0) add(0.0, clamped_acos(tr));
  const double tl = (w.a() - center.x) / r;  // cos(theta) < tl is outside left
  if (tl > -1.0) add(std::numbers::pi, std::numbers::pi - clamped_acos(tl));
  const double tt = (w.d() - center.y) / r;  // sin(theta) > tt is outside top
  if (tt < 1.0) add(std::numbers::pi / 2.0, std::numbers::pi / 2.0 - clamped_asin(tt));
  const double tb = (w.c() - center.y) / r;  // sin(theta) < tb is outside bottom
  if (tb > -1.0) add(3.0 * std::numbers::pi / 2.0, std::numbers::pi / 2.0 + clamped_asin(tb));

  // Normalize to [0, 2pi), split wrapping intervals, merge, and measure.
  std::vector<std::pair<double, double>> flat;
  for (auto [lo, hi] : outside) {
    const double len = hi - lo;
    if (len >= two_pi) return 0.0;  // one side swallows the whole circle
    const double start = std::fmod(std::fmod(lo, two_pi) + two_pi, two_pi);
    const double end = start + len;
    if (end <= two_pi) {
      flat.emplace_back(start, end);
    } else {
      flat.emplace_back(start, two_pi);
      flat.emplace_back(0.0, end - two_pi);
    }
  }
  std::sort(flat.begin(), flat.end());
  double total = 0.0;
  double cur_lo = 0.0, cur_hi = -1.0;
  for (auto [lo, hi] : flat) {
    if (cur_hi < cur_lo || lo > cur_hi) {
      if (cur_hi >= cur_lo) total += cur_hi - cur_lo;
      cur_lo = lo;
      cur_hi = hi;
    } else {
      cur_hi = std::max(cur_hi, hi);
    }
  }
  if (cur_hi >= cur_lo) total += cur_hi - cur_lo;
  return std::min(std::max(1.0 - total / two_pi, 0.0), 1.0);
}

namespace detail {

// Shared K estimator core: per unordered pair, record the distance and the
// two ordered inverse weights; sort once and answer every t by prefix sums.
inline KFunction compute_k(const PointPattern& pattern, const std::vector<double>& t_grid,
                           bool corrected, EdgeWeight weight) {
  KFunction::validate_t_grid(t_grid);
  const std::size_t n = pattern.size();
  if (n < 2) throw Error("K estimation needs at least 2 points");
  const auto& pts = pattern.points();
  const Window& w = pattern.window();
  const double lambda = static_cast<double>(n) / w.area();

  std::vector<std::pair<double, double>> contrib;  // (distance, summed inverse weights)
  contrib.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = distance(pts[i], pts[j]);
      double sum = 2.0;
      if (corrected) {
        const auto frac = (weight == EdgeWeight::disk_area) ? disk_rect_area_fraction
                                                            : circle_rect_arc_fraction;
        sum = 1.0 / frac(pts[i], r, w) + 1.0 / frac(pts[j], r, w);
      }
      contrib.emplace_back(r, sum);
    }
  }
  std::sort(contrib.begin(), contrib.end());
  std::vector<double> dist(contrib.size());
  std::vector<double> prefix(contrib.size() + 1, 0.0);
  for (std::size_t k = 0; k < contrib.size(); ++k) {
    dist[k] = contrib[k].first;
    prefix[k + 1] = prefix[k] + contrib[k].second;
  }

  std::vector<double> values(t_grid.size(), 0.0);
  const double norm = 1.0 / (lambda * static_cast<double>(n));
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    // strict indicator I(r < t)
    const auto it = std::lower_bound(dist.begin(), dist.end(), t_grid[k]);
    values[k] = prefix[static_cast<std::size_t>(it - dist.begin())] * norm;
  }
  return KFunction(t_grid, std::move(values),
                   corrected ? KEstimator::ripley_corrected : KEstimator::naive, lambda);
}

}  // namespace detail

/// Uncorrected double-sum estimator; negatively biased near edges.
inline KFunction k_naive(const PointPattern& pattern, const std::vector<double>& t_grid) {
  return detail::compute_k(pattern, t_grid, false, EdgeWeight::disk_area);
}

/// Edge-corrected estimator: each ordered pair (i,j) is weighted by the
/// inverse proportion of the disk D(x_i, r_ij) inside the window.
inline KFunction k_ripley(const PointPattern& pattern, const std::vector<double>& t_grid,
                          EdgeWeight weight = EdgeWeight::disk_area) {
  return detail::compute_k(pattern, t_grid, true, weight);
}

/// K(t) = pi t^2, the homogeneous Poisson reference.
inline KFunction k_theoretical_poisson(const std::vector<double>& t_grid) {
  KFunction::validate_t_grid(t_grid);
  std::vector<double> values(t_grid.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    values[k] = std::numbers::pi * t_grid[k] * t_grid[k];
  }
  return KFunction(t_grid, std::move(values), KEstimator::theoretical_poisson, 0.0);
}

/// Default grid: 50 equally spaced values from 0 to a quarter of the shorter
/// window side.
inline std::vector<double> default_t_grid(const Window& window, int count = 50) {
  if (count < 2) throw Error("t grid needs at least 2 values");
  const double tmax = std::min(window.width(), window.height()) / 4.0;
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) t[i] = tmax * static_cast<double>(i) / (count - 1);
  return t;
}

/// Pointwise min-max band over an ensemble of simulated K functions.
struct Envelope {
  std::vector<double> t;
  std::vector<double> lower;
  std::vector<double> upper;
  int n_sims = 0;

  Envelope() = default;
  Envelope(std::vector<double> t_grid, std::vector<double> lo, std::vector<double> hi, int sims)
      : t(std::move(t_grid)), lower(std::move(lo)), upper(std::move(hi)), n_sims(sims) {
    if (t.size() != lower.size() || t.size() != upper.size()) {
      throw Error("envelope columns differ in length");
    }
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (lower[k] > upper[k]) throw Error("envelope lower band exceeds upper band");
    }
  }
};

/// Source of simulated patterns for envelope construction. The argument is a
/// draw identifier; the same identifier must reproduce the same pattern.
using PatternSource = std::function<PointPattern(std::uint64_t)>;

/// Runs n_sims independent simulations, estimates K on each, and returns the
/// pointwise min and max. Simulations yielding fewer than 2 points are
/// redrawn with fresh identifiers up to 10 times. Replicates may run
/// concurrently; min and max do not depend on completion order.
inline Envelope envelope(const PatternSource& generator, int n_sims,
                         const std::vector<double>& t_grid, KEstimator estimator,
                         EdgeWeight weight = EdgeWeight::disk_area) {
  if (n_sims < 2) throw Error("envelope needs at least 2 simulations");
  if (estimator == KEstimator::theoretical_poisson) {
    throw Error("envelope requires an empirical estimator");
  }
  KFunction::validate_t_grid(t_grid);

  std::vector<std::vector<double>> all(static_cast<std::size_t>(n_sims));
  parallel_for(static_cast<std::size_t>(n_sims), [&](std::size_t r) {
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 10) {
        throw Error("envelope simulation kept producing fewer than 2 points");
      }
      const PointPattern pat =
          generator(static_cast<std::uint64_t>(r) +
                    static_cast<std::uint64_t>(attempt) * static_cast<std::uint64_t>(n_sims));
      if (pat.size() < 2) continue;
      all[r] = (estimator == KEstimator::naive) ? k_naive(pat, t_grid).values
                                                : k_ripley(pat, t_grid, weight).values;
      break;
    }
  });

  std::vector<double> lo(t_grid.size(), std::numeric_limits<double>::infinity());
  std::vector<double> hi(t_grid.size(), -std::numeric_limits<double>::infinity());
  for (const auto& v : all) {
    for (std::size_t k = 0; k < v.size(); ++k) {
      lo[k] = std::min(lo[k], v[k]);
      hi[k] = std::max(hi[k], v[k]);
    }
  }
  return Envelope(t_grid, std::move(lo), std::move(hi), n_sims);
}

enum class ExitDirection : std::uint8_t { inside, above, below };
enum class CsrVerdict : std::uint8_t { consistent, clustering, repulsion };

/// Verdict convention: a departure needs at least 3 consecutive grid points
/// outside the band on the same side, within the lowest quartile of the
/// t grid. Clustering (above) takes precedence over repulsion (below).
inline CsrVerdict verdict_from_exits(const std::vector<ExitDirection>& exits) {
  const std::size_t q = (exits.size() + 3) / 4;
  const auto has_run = [&](ExitDirection side) {
    std::size_t run = 0;
    for (std::size_t k = 0; k < q; ++k) {
      run = (exits[k] == side) ? run + 1 : 0;
      if (run >= 3) return true;
    }
    return false;
  };
  if (has_run(ExitDirection::above)) return CsrVerdict::clustering;
  if (has_run(ExitDirection::below)) return CsrVerdict::repulsion;
  return CsrVerdict::consistent;
}

struct CsrReport {
  KFunction observed;
  Envelope band;
  std::vector<ExitDirection> exit_direction;
  CsrVerdict verdict = CsrVerdict::consistent;
  double homogenized_rate = 0.0;
  std::size_t n_after_thinning = 0;
};

/// Poisson-hypothesis test by homogenization: thin the pattern to a
/// homogeneous process using the supplied intensity, compare its corrected K
/// against the min-max envelope of matched homogeneous simulations, and
/// classify the departure. Rejection on the thinned data rejects the Poisson
/// hypothesis for the original data.
inline CsrReport csr_test(const PointPattern& pattern, const IntensityField& field, int n_sims,
                          const std::vector<double>& t_grid, Seed seed) {
  if (n_sims < 2) throw Error("csr test needs at least 2 simulations");
  const HomogenizeResult homog = homogenize(pattern, field, derive_seed(seed, "csr.homogenize"));
  if (homog.pattern.size() < 10) throw Error("over-thinned; refine intensity or data");

  const KFunction observed = k_ripley(homog.pattern, t_grid);
  const Seed env_seed = derive_seed(seed, "csr.envelope");
  const Window window = pattern.window();
  const double rate = homog.rate;
  const Envelope band = envelope(
      [rate, window, env_seed](std::uint64_t id) {
        return simulate_homogeneous(rate, window, replicate_seed(env_seed, id));
      },
      n_sims, t_grid, KEstimator::ripley_corrected);

  std::vector<ExitDirection> exits(t_grid.size(), ExitDirection::inside);
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (observed.values[k] > band.upper[k]) {
      exits[k] = ExitDirection::above;
    } else if (observed.values[k] < band.lower[k]) {
      exits[k] = ExitDirection::below;
    }
  }
  CsrReport report{observed, band, exits, verdict_from_exits(exits), rate, homog.pattern.size()};
  return report;
}

}  // namespace antgen
