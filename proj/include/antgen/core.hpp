#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace antgen {

/// Domain or data error (invalid geometry, degenerate input, bad file, ...).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline bool operator==(const Point& p, const Point& q) { return p.x == q.x && p.y == q.y; }

inline double distance(const Point& p, const Point& q) { return std::hypot(p.x - q.x, p.y - q.y); }

inline double squared_distance(const Point& p, const Point& q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  return dx * dx + dy * dy;
}

/// Axis-aligned rectangle [a,b] x [c,d] with a < b, c < d.
class Window {
 public:
  Window(double a, double b, double c, double d) : a_(a), b_(b), c_(c), d_(d) {
    if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d))) {
      throw Error("window coordinates must be finite");
    }
    if (!(a < b) || !(c < d)) {
      throw Error("window requires a < b and c < d");
    }
  }

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }

  double width() const { return b_ - a_; }
  double height() const { return d_ - c_; }
  double area() const { return width() * height(); }
  double diameter() const { return std::hypot(width(), height()); }
  Point center() const { return {(a_ + b_) / 2.0, (c_ + d_) / 2.0}; }

  /// Closed-rectangle membership: all four edges inclusive.
  bool contains(const Point& p) const {
    return p.x >= a_ && p.x <= b_ && p.y >= c_ && p.y <= d_;
  }

  /// Contains another rectangle entirely (boundary inclusive).
  bool contains(const Window& w) const {
    return w.a_ >= a_ && w.b_ <= b_ && w.c_ >= c_ && w.d_ <= d_;
  }

  Window inflated(double margin) const {
    return Window(a_ - margin, b_ + margin, c_ - margin, d_ + margin);
  }

  Point clamp(const Point& p) const {
    return {std::min(std::max(p.x, a_), b_), std::min(std::max(p.y, c_), d_)};
  }

  friend bool operator==(const Window& u, const Window& v) {
    return u.a_ == v.a_ && u.b_ == v.b_ && u.c_ == v.c_ && u.d_ == v.d_;
  }

 private:
  double a_, b_, c_, d_;
};

/// A finite ordered set of points inside an observation window.
/// Duplicate coordinates are allowed; see has_duplicates().
class PointPattern {
 public:
  PointPattern(Window window, std::vector<Point> points)
      : window_(window), points_(std::move(points)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const Point& p = points_[i];
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw Error("point " + std::to_string(i) + " has non-finite coordinates");
      }
      if (!window_.contains(p)) {
        throw Error("point " + std::to_string(i) + " lies outside the window");
      }
    }
  }

  explicit PointPattern(Window window) : window_(window) {}

  const Window& window() const { return window_; }
  const std::vector<Point>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

 private:
  Window window_;
  std::vector<Point> points_;
};

enum class PointLabel : std::uint8_t { free, fixed };

/// Point pattern with a per-point free/fixed flag.
class LabeledPattern {
 public:
  LabeledPattern(PointPattern pattern, std::vector<PointLabel> labels)
      : pattern_(std::move(pattern)), labels_(std::move(labels)) {
    if (labels_.size() != pattern_.size()) {
      throw Error("label sequence length differs from point count");
    }
  }

  const PointPattern& pattern() const { return pattern_; }
  const std::vector<PointLabel>& labels() const { return labels_; }
  std::size_t size() const { return pattern_.size(); }

  std::size_t count(PointLabel l) const {
    std::size_t n = 0;
    for (PointLabel v : labels_) n += (v == l) ? 1 : 0;
    return n;
  }

 private:
  PointPattern pattern_;
  std::vector<PointLabel> labels_;
};

/// Number of pattern points inside a rectangle, boundary inclusive.
/// The region need not lie inside the pattern's window.
inline std::size_t count_in(const PointPattern& pattern, const Window& region) {
  std::size_t n = 0;
  for (const Point& p : pattern.points()) n += region.contains(p) ? 1 : 0;
  return n;
}

/// Symmetric matrix of Euclidean distances, zero diagonal.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return d_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<double> d_;
};

inline DistanceMatrix pairwise_distances(const PointPattern& pattern) {
  if (pattern.empty()) throw Error("pairwise_distances needs at least one point");
  const auto& pts = pattern.points();
  DistanceMatrix m(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double r = distance(pts[i], pts[j]);
      m(i, j) = r;
      m(j, i) = r;
    }
  }
  return m;
}

/// Exact-equality duplicate check (the criterion the triangulation stage enforces).
inline bool has_duplicates(const PointPattern& pattern) {
  struct Hash {
    std::size_t operator()(const Point& p) const {
      std::uint64_t hx, hy;
      static_assert(sizeof(double) == sizeof(std::uint64_t));
      std::memcpy(&hx, &p.x, sizeof hx);
      std::memcpy(&hy, &p.y, sizeof hy);
      return std::hash<std::uint64_t>{}(hx * 1000003ull ^ hy);
    }
  };
  struct Eq {
    bool operator()(const Point& p, const Point& q) const { return p == q; }
  };
  std::unordered_set<Point, Hash, Eq> seen;
  seen.reserve(pattern.size());
  for (const Point& p : pattern.points()) {
    if (!seen.insert(p).second) return true;
  }
  return false;
}

}  // namespace antgen
