#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <unordered_set>
#include <utility>
#include <vector>

#include "antgen/core.hpp"

namespace antgen {

/// Delaunay triangulation as a simplex list plus the symmetric neighbor
/// relation derived from it (all three undirected edges of every simplex).
class DelaunayGraph {
 public:
  DelaunayGraph(std::size_t n, std::vector<std::array<std::size_t, 3>> simplices)
      : n_(n), simplices_(std::move(simplices)), adjacency_(n) {
    for (auto& s : simplices_) {
      std::sort(s.begin(), s.end());
      for (std::size_t v : s) {
        if (v >= n_) throw Error("simplex vertex index out of range");
      }
      if (s[0] == s[1] || s[1] == s[2]) throw Error("simplex with repeated vertex");
      add_edge(s[0], s[1]);
      add_edge(s[1], s[2]);
      add_edge(s[0], s[2]);
    }
    std::sort(simplices_.begin(), simplices_.end());
    for (auto& nbrs : adjacency_) {
      std::sort(nbrs.begin(), nbrs.end());
      nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
  }

  std::size_t n() const { return n_; }
  const std::vector<std::array<std::size_t, 3>>& simplices() const { return simplices_; }

  const std::vector<std::size_t>& neighbors(std::size_t i) const {
    if (i >= n_) throw Error("vertex index out of range");
    return adjacency_[i];
  }

  /// Undirected edges as (i,j) pairs with i < j, lexicographically sorted.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j : adjacency_[i]) {
        if (i < j) out.emplace_back(i, j);
      }
    }
    return out;
  }

  std::size_t edge_count() const {
    std::size_t total = 0;
    for (const auto& nbrs : adjacency_) total += nbrs.size();
    return total / 2;
  }

 private:
  void add_edge(std::size_t i, std::size_t j) {
    adjacency_[i].push_back(j);
    adjacency_[j].push_back(i);
  }

  std::size_t n_;
  std::vector<std::array<std::size_t, 3>> simplices_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

namespace detail {

inline double orient(const Point& a, const Point& b, const Point& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// Strict in-circle test for p against the circumcircle of CCW triangle
// (a,b,c). Near-cocircular configurations (within rounding scale) count as
// "not inside", so ties fall back to scan order, i.e. lowest point index.
inline bool in_circle_strict(const Point& a, const Point& b, const Point& c, const Point& p) {
  const double adx = a.x - p.x, ady = a.y - p.y;
  const double bdx = b.x - p.x, bdy = b.y - p.y;
  const double cdx = c.x - p.x, cdy = c.y - p.y;
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  const double det = adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
                     ad * (bdx * cdy - bdy * cdx);
  const double scale = std::max({ad, bd, cd});
  return det > 1e-12 * scale * scale;
}

}  // namespace detail

/// Delaunay triangulation of the pattern by advancing-front construction:
/// starting from a convex-hull edge, each frontier edge is completed with the
/// strictly-left point whose circumcircle is empty (equivalently the one
/// maximizing the subtended angle), chosen by pairwise in-circle comparisons
/// with cocircular ties resolved toward the lowest point index.
inline DelaunayGraph triangulate(const PointPattern& pattern) {
  const auto& pts = pattern.points();
  const std::size_t n = pts.size();
  if (n < 3) throw Error("triangulation needs at least 3 points");
  if (has_duplicates(pattern)) throw Error("triangulation input contains duplicate points");
  {
    bool non_collinear = false;
    for (std::size_t k = 2; k < n && !non_collinear; ++k) {
      non_collinear = detail::orient(pts[0], pts[1], pts[k]) != 0.0;
    }
    if (!non_collinear) throw Error("triangulation input is collinear");
  }

  // Seed with the hull edge leaving the lexicographically smallest point:
  // every other point ends up weakly to its left, collinear ties resolved
  // toward the nearest point so the edge carries no interior point.
  std::size_t i0 = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (pts[i].x < pts[i0].x || (pts[i].x == pts[i0].x && pts[i].y < pts[i0].y)) i0 = i;
  }
  std::size_t i1 = (i0 == 0) ? 1 : 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (r == i0 || r == i1) continue;
    const double o = detail::orient(pts[i0], pts[i1], pts[r]);
    if (o < 0.0 ||
        (o == 0.0 && squared_distance(pts[i0], pts[r]) < squared_distance(pts[i0], pts[i1]))) {
      i1 = r;
    }
  }

  const auto key = [n](std::size_t u, std::size_t v) {
    return static_cast<std::uint64_t>(u) * n + v;
  };
  // A directed edge (u,v) asks for the triangle on the left of u->v. A queued
  // request may be satisfied by a triangle created for another edge in the
  // meantime, so coverage is checked again when the request is popped.
  std::unordered_set<std::uint64_t> covered;
  std::deque<std::pair<std::size_t, std::size_t>> frontier;
  const auto request = [&](std::size_t u, std::size_t v) {
    if (!covered.count(key(u, v))) frontier.emplace_back(u, v);
  };

  std::vector<std::array<std::size_t, 3>> simplices;
  frontier.emplace_back(i0, i1);
  while (!frontier.empty()) {
    const auto [a, b] = frontier.front();
    frontier.pop_front();
    if (covered.count(key(a, b))) continue;

    std::size_t best = n;
    for (std::size_t c = 0; c < n; ++c) {
      if (c == a || c == b) continue;
      if (detail::orient(pts[a], pts[b], pts[c]) <= 0.0) continue;
      if (best == n || detail::in_circle_strict(pts[a], pts[b], pts[best], pts[c])) best = c;
    }
    covered.insert(key(a, b));
    if (best == n) continue;  // hull edge: nothing on the left

    simplices.push_back({a, b, best});
    covered.insert(key(b, best));
    covered.insert(key(best, a));
    request(best, b);
    request(a, best);
    if (simplices.size() > 2 * n) throw Error("triangulation failed to terminate");
  }

  DelaunayGraph graph(n, std::move(simplices));
  for (std::size_t i = 0; i < n; ++i) {
    if (graph.neighbors(i).empty()) {
      throw Error("triangulation did not include every point; input may be degenerate");
    }
  }
  return graph;
}

/// Componentwise mean of the positions selected by the neighbor set.
inline Point barycenter(const std::vector<Point>& positions,
                        const std::vector<std::size_t>& neighbor_set) {
  if (neighbor_set.empty()) throw Error("barycenter of an empty neighbor set");
  double sx = 0.0, sy = 0.0;
  for (std::size_t i : neighbor_set) {
    if (i >= positions.size()) throw Error("neighbor index out of range");
    sx += positions[i].x;
    sy += positions[i].y;
  }
  const double inv = 1.0 / static_cast<double>(neighbor_set.size());
  return {sx * inv, sy * inv};
}

}  // namespace antgen
