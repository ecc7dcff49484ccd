#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "antgen/core.hpp"
#include "test_support.hpp"

using namespace antgen;

TEST_CASE("window constructor enforces ordering and finiteness") {
  CHECK_THROWS_AS(Window(1.0, 1.0, 0.0, 1.0), Error);
  CHECK_THROWS_AS(Window(2.0, 1.0, 0.0, 1.0), Error);
  CHECK_THROWS_AS(Window(0.0, 1.0, 5.0, 5.0), Error);
  CHECK_THROWS_AS(Window(0.0, std::numeric_limits<double>::infinity(), 0.0, 1.0), Error);
  const Window w(0.0, 2.0, -1.0, 3.0);
  CHECK(w.area() == Catch::Approx(8.0));
  CHECK(w.diameter() == Catch::Approx(std::hypot(2.0, 4.0)));
}

TEST_CASE("pattern constructor validates points") {
  const Window w(0.0, 1.0, 0.0, 1.0);
  CHECK_THROWS_AS(PointPattern(w, {{2.0, 0.5}}), Error);
  CHECK_THROWS_AS(PointPattern(w, {{std::nan(""), 0.5}}), Error);
  // boundary points are inside
  CHECK_NOTHROW(PointPattern(w, {{0.0, 0.0}, {1.0, 1.0}}));
}

TEST_CASE("count_in on empty and singleton patterns") {
  const Window w(0.0, 1.0, 0.0, 1.0);
  CHECK(count_in(PointPattern(w), w) == 0);
  const PointPattern single(w, {{0.5, 0.5}});
  CHECK(count_in(single, w) == 1);
  // region may extend beyond the pattern window
  CHECK(count_in(single, Window(-5.0, 5.0, -5.0, 5.0)) == 1);
}

TEST_CASE("count_in matches brute-force enumeration on a diagonal") {
  const Window w(0.0, 10.0, 0.0, 10.0);
  std::vector<Point> pts;
  for (int i = 0; i < 5; ++i) pts.push_back({2.0 * i + 1.0, 2.0 * i + 1.0});
  const PointPattern pattern(w, pts);
  const Window region(0.0, 5.0, 0.0, 5.0);
  std::size_t expected = 0;
  for (const Point& p : pts) {
    if (p.x >= 0.0 && p.x <= 5.0 && p.y >= 0.0 && p.y <= 5.0) ++expected;
  }
  CHECK(count_in(pattern, region) == expected);
  CHECK(expected == 2);
}

TEST_CASE("count_in is boundary inclusive") {
  const Window w(0.0, 4.0, 0.0, 4.0);
  const PointPattern pattern(w, {{2.0, 0.0}, {0.0, 2.0}, {2.0, 2.0}});
  CHECK(count_in(pattern, Window(0.0, 2.0, 0.0, 2.0)) == 3);
}

TEST_CASE("count_in is additive over a disjoint partition") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 8.0);
  const Window w(0.0, 8.0, 0.0, 8.0);
  std::vector<Point> pts;
  for (int i = 0; i < 200; ++i) pts.push_back({u(rng), u(rng)});
  const PointPattern pattern(w, pts);
  // Half-open partition emulated with nextafter so shared edges are not
  // double counted.
  const double mid = 4.0;
  const double lo = std::nextafter(mid, 8.0);
  const std::size_t total =
      count_in(pattern, Window(0.0, mid, 0.0, mid)) + count_in(pattern, Window(lo, 8.0, 0.0, mid)) +
      count_in(pattern, Window(0.0, mid, lo, 8.0)) + count_in(pattern, Window(lo, 8.0, lo, 8.0));
  CHECK(total == pattern.size());
}

TEST_CASE("pairwise distances basics") {
  const Window w(-5.0, 5.0, -5.0, 5.0);
  const DistanceMatrix single = pairwise_distances(PointPattern(w, {{1.0, 1.0}}));
  CHECK(single.size() == 1);
  CHECK(single(0, 0) == 0.0);

  const DistanceMatrix triangle = pairwise_distances(PointPattern(w, {{0.0, 0.0}, {3.0, 4.0}}));
  CHECK(triangle(0, 1) == Catch::Approx(5.0));
  CHECK(triangle(1, 0) == Catch::Approx(5.0));

  CHECK_THROWS_AS(pairwise_distances(PointPattern(w)), Error);
}

TEST_CASE("pairwise distances match per-pair recomputation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> pts;
  for (int i = 0; i < 10; ++i) pts.push_back({u(rng), u(rng)});
  const PointPattern pattern(Window(0.0, 1.0, 0.0, 1.0), pts);
  const DistanceMatrix m = pairwise_distances(pattern);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      CHECK(m(i, j) == std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y));
    }
  }
}

TEST_CASE("pairwise distances satisfy the triangle inequality") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> pts;
  for (int i = 0; i < 8; ++i) pts.push_back({u(rng), u(rng)});
  const DistanceMatrix m = pairwise_distances(PointPattern(Window(0.0, 1.0, 0.0, 1.0), pts));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      for (std::size_t k = 0; k < pts.size(); ++k) {
        CHECK(m(i, j) <= m(i, k) + m(k, j) + 1e-12);
      }
    }
  }
}

TEST_CASE("duplicate detection uses exact equality") {
  const Window w(0.0, 1.0, 0.0, 1.0);
  CHECK_FALSE(has_duplicates(PointPattern(w, {{0.1, 0.2}, {0.1, 0.2000000001}})));
  CHECK(has_duplicates(PointPattern(w, {{0.1, 0.2}, {0.3, 0.4}, {0.1, 0.2}})));
  CHECK_FALSE(has_duplicates(PointPattern(w)));
}

TEST_CASE("labeled pattern validates label length") {
  const Window w(0.0, 1.0, 0.0, 1.0);
  const PointPattern p(w, {{0.1, 0.1}, {0.9, 0.9}});
  CHECK_THROWS_AS(LabeledPattern(p, {PointLabel::free}), Error);
  const LabeledPattern ok(p, {PointLabel::free, PointLabel::fixed});
  CHECK(ok.count(PointLabel::fixed) == 1);
}
