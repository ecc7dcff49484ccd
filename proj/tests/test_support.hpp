#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles here
// deliberately avoid the library's own computation paths: dense linear solves
// go through Eigen, integrals through fresh midpoint quadrature, geometry
// checks through direct enumeration.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "antgen/antgen.hpp"

namespace support {

// ---------------------------------------------------------------- statistics

inline double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// ---------------------------------------------------------------- quadrature

// Midpoint rule over a rectangle; independent of the library's quadrature.
inline double integrate2d(const std::function<double(double, double)>& f, const antgen::Window& w,
                          int nx, int ny) {
  const double hx = w.width() / nx;
  const double hy = w.height() / ny;
  double total = 0.0;
  for (int i = 0; i < nx; ++i) {
    const double x = w.a() + (i + 0.5) * hx;
    for (int j = 0; j < ny; ++j) {
      const double y = w.c() + (j + 0.5) * hy;
      total += f(x, y);
    }
  }
  return total * hx * hy;
}

// ------------------------------------------------------------- dense solves

// Direct solution of the grid Laplace problem harmonic_extension solves:
// non-fixed interior nodes take the mean of their 4 neighbors, non-fixed
// outer-ring nodes are zero, fixed nodes keep their input values.
inline std::vector<double> dense_laplace_solve(const antgen::IntensityField& field) {
  const int m = field.resolution();
  const auto idx = [m](int i, int j) { return static_cast<std::size_t>(i) * m + j; };
  std::vector<double> out(static_cast<std::size_t>(m) * m, 0.0);
  std::vector<int> unknown_id(out.size(), -1);
  std::vector<std::pair<int, int>> unknowns;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (field.fixed_at(i, j)) {
        out[idx(i, j)] = field.at(i, j);
      } else if (i > 0 && i < m - 1 && j > 0 && j < m - 1) {
        unknown_id[idx(i, j)] = static_cast<int>(unknowns.size());
        unknowns.emplace_back(i, j);
      }
    }
  }
  const int n = static_cast<int>(unknowns.size());
  if (n == 0) return out;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k) {
    const auto [i, j] = unknowns[k];
    a(k, k) = 4.0;
    const std::array<std::pair<int, int>, 4> nbrs{{{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}}};
    for (const auto& [ni, nj] : nbrs) {
      const int id = unknown_id[idx(ni, nj)];
      if (id >= 0) {
        a(k, id) -= 1.0;
      } else {
        rhs(k) += out[idx(ni, nj)];
      }
    }
  }
  const Eigen::VectorXd x = a.partialPivLu().solve(rhs);
  for (int k = 0; k < n; ++k) {
    const auto [i, j] = unknowns[k];
    out[idx(i, j)] = x(k);
  }
  return out;
}

// Direct solution of the zero-noise deformation limit: each free point sits at
// the barycenter of its graph neighbors, fixed points act as anchors.
inline std::vector<antgen::Point> graph_laplacian_solve(const antgen::LabeledPattern& labeled,
                                                        const antgen::DelaunayGraph& graph) {
  const std::size_t n = labeled.size();
  const auto& labels = labeled.labels();
  std::vector<int> free_id(n, -1);
  std::vector<std::size_t> free_nodes;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] == antgen::PointLabel::free) {
      free_id[i] = static_cast<int>(free_nodes.size());
      free_nodes.push_back(i);
    }
  }
  std::vector<antgen::Point> out = labeled.pattern().points();
  const int nf = static_cast<int>(free_nodes.size());
  if (nf == 0) return out;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nf, nf);
  Eigen::VectorXd bx = Eigen::VectorXd::Zero(nf);
  Eigen::VectorXd by = Eigen::VectorXd::Zero(nf);
  for (int k = 0; k < nf; ++k) {
    const std::size_t i = free_nodes[k];
    const auto& nbrs = graph.neighbors(i);
    a(k, k) = static_cast<double>(nbrs.size());
    for (std::size_t j : nbrs) {
      if (free_id[j] >= 0) {
        a(k, free_id[j]) -= 1.0;
      } else {
        bx(k) += out[j].x;
        by(k) += out[j].y;
      }
    }
  }
  const auto lu = a.partialPivLu();
  const Eigen::VectorXd sx = lu.solve(bx);
  const Eigen::VectorXd sy = lu.solve(by);
  for (int k = 0; k < nf; ++k) out[free_nodes[k]] = {sx(k), sy(k)};
  return out;
}

// ------------------------------------------------------------------ geometry

struct Circumcircle {
  double cx, cy, r2;
  bool valid;
};

inline Circumcircle circumcircle(const antgen::Point& a, const antgen::Point& b,
                                 const antgen::Point& c) {
  const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
  if (d == 0.0) return {0, 0, 0, false};
  const double a2 = a.x * a.x + a.y * a.y;
  const double b2 = b.x * b.x + b.y * b.y;
  const double c2 = c.x * c.x + c.y * c.y;
  const double ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
  const double uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
  const double dx = a.x - ux, dy = a.y - uy;
  return {ux, uy, dx * dx + dy * dy, true};
}

// Brute-force empty-circumcircle check of every simplex against every other
// point, with the tolerance 1e-10 * squared circumradius.
inline bool delaunay_empty_circumcircles(const antgen::PointPattern& pattern,
                                         const antgen::DelaunayGraph& graph) {
  const auto& pts = pattern.points();
  for (const auto& s : graph.simplices()) {
    const Circumcircle cc = circumcircle(pts[s[0]], pts[s[1]], pts[s[2]]);
    if (!cc.valid) return false;
    for (std::size_t p = 0; p < pts.size(); ++p) {
      if (p == s[0] || p == s[1] || p == s[2]) continue;
      const double dx = pts[p].x - cc.cx, dy = pts[p].y - cc.cy;
      if (cc.r2 - (dx * dx + dy * dy) > 1e-10 * cc.r2) return false;
    }
  }
  return true;
}

// Convex hull vertex count by monotone chain (collinear points excluded).
inline std::size_t convex_hull_size(std::vector<antgen::Point> pts) {
  std::sort(pts.begin(), pts.end(), [](const antgen::Point& p, const antgen::Point& q) {
    return p.x < q.x || (p.x == q.x && p.y < q.y);
  });
  const auto cross = [](const antgen::Point& o, const antgen::Point& a, const antgen::Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  std::vector<antgen::Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  return k - 1;
}

// ------------------------------------------------------------------ fixtures

// Intensity field built by sampling an analytic function on the grid, every
// node fixed. Useful as a "true" intensity for simulation and thinning tests.
inline antgen::IntensityField field_from(const std::function<double(double, double)>& f,
                                         const antgen::Window& box, int m) {
  std::vector<double> values(static_cast<std::size_t>(m) * m, 0.0);
  std::vector<std::uint8_t> fixed(values.size(), 1);
  const double hx = box.width() / (m - 1);
  const double hy = box.height() / (m - 1);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      values[static_cast<std::size_t>(i) * m + j] = f(box.a() + i * hx, box.c() + j * hy);
    }
  }
  return antgen::IntensityField(box, m, std::move(values), std::move(fixed));
}

// Gaussian-bump "city" intensity over [0,3]^2: a dense core on a nonzero
// base, ~500 expected points. Base rate 30 keeps homogenization alive.
inline double city_intensity(double x, double y) {
  const double dx = x - 1.5, dy = y - 1.5;
  return 30.0 + 130.0 * std::exp(-(dx * dx + dy * dy) / (2.0 * 0.55 * 0.55));
}

inline antgen::Window city_window() { return antgen::Window(0.0, 3.0, 0.0, 3.0); }

inline antgen::PointPattern sample_city(antgen::Seed seed) {
  const antgen::IntensityField f = field_from(city_intensity, city_window(), 96);
  return antgen::simulate_inhomogeneous_reject(f, f.max_value(), seed);
}

// Two-bump intensity over [0,4]^2 for bandwidth-selection studies.
inline double two_bump_intensity(double x, double y) {
  const double d1 = (x - 1.2) * (x - 1.2) + (y - 1.2) * (y - 1.2);
  const double d2 = (x - 2.9) * (x - 2.9) + (y - 2.8) * (y - 2.8);
  return 5.0 + 90.0 * std::exp(-d1 / (2.0 * 0.45 * 0.45)) +
         60.0 * std::exp(-d2 / (2.0 * 0.65 * 0.65));
}

inline antgen::Window two_bump_window() { return antgen::Window(0.0, 4.0, 0.0, 4.0); }

// ----------------------------------------------------------------- CLI runs

inline std::filesystem::path cli_path() {
#ifdef ANTGEN_CLI_PATH
  return ANTGEN_CLI_PATH;
#else
  const char* env = std::getenv("ANTGEN_BIN");
  if (!env) throw std::runtime_error("ANTGEN_BIN not set");
  return env;
#endif
}

struct CliResult {
  int exit_code;
  std::string out;
  std::string err;
};

inline CliResult run_cli(const std::string& args, const std::filesystem::path& workdir) {
  const std::filesystem::path out_file = workdir / "stdout.txt";
  const std::filesystem::path err_file = workdir / "stderr.txt";
  const std::string cmd = "cd '" + workdir.string() + "' && '" + cli_path().string() + "' " +
                          args + " >'" + out_file.string() + "' 2>'" + err_file.string() + "'";
  const int status = std::system(cmd.c_str());
  const auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  int code = -1;
  if (status != -1 && WIFEXITED(status)) code = WEXITSTATUS(status);
  return {code, slurp(out_file), slurp(err_file)};
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("antgen_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// -------------------------------------------------------------- XML checking

// Minimal well-formedness check: tags balance, attributes quoted, single root.
inline bool xml_well_formed(const std::string& text) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  bool seen_root = false;
  while (i < text.size()) {
    if (text[i] != '<') {
      ++i;
      continue;
    }
    const std::size_t end = text.find('>', i);
    if (end == std::string::npos) return false;
    std::string tag = text.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;  // declaration or comment
    if (tag[0] == '/') {
      const std::string name = tag.substr(1);
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
      continue;
    }
    const bool self_closing = tag.back() == '/';
    if (self_closing) tag.pop_back();
    const std::size_t space = tag.find_first_of(" \t\n");
    const std::string name = tag.substr(0, space);
    if (name.empty()) return false;
    // attribute quoting: equals signs must be followed by a quoted value
    for (std::size_t k = 0; k + 1 < tag.size(); ++k) {
      if (tag[k] == '=' && tag[k + 1] != '"') return false;
    }
    if (stack.empty()) {
      if (seen_root) return false;  // a document has a single root element
      seen_root = true;
    }
    if (!self_closing) stack.push_back(name);
  }
  return stack.empty() && seen_root;
}

}  // namespace support
