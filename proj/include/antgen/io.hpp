#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "antgen/core.hpp"
#include "antgen/deform.hpp"
#include "antgen/intensity.hpp"
#include "antgen/stats.hpp"
#include "antgen/triangulate.hpp"

namespace antgen {

/// Renders a double with 17 significant digits; parsing the result recovers
/// the exact bit pattern.
inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Writes content to path via a temporary file plus rename, so readers never
/// observe a partial file.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + tmp.string());
    out << content;
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot move " + tmp.string() + " to " + path.string());
}

/// FNV-1a over the file bytes, as 16 hex digits; used for input digests.
inline std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  std::uint64_t h = 14695981039346656037ull;
  char chunk[4096];
  while (in.read(chunk, sizeof chunk) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(chunk[i]);
      h *= 1099511628211ull;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

inline double parse_real(std::string_view field, std::size_t row, std::size_t col) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw Error("row " + std::to_string(row) + ", column " + std::to_string(col) +
                ": cannot parse real value '" + std::string(field) + "'");
  }
  return v;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace detail

struct PatternFileData {
  PointPattern pattern;
  std::optional<std::vector<PointLabel>> labels;
};

/// Reads an `x,y[,label]` CSV. Without an explicit window, the tight bounding
/// box inflated by 1% of each extent per side is used; with one, rows outside
/// it are rejected by row number.
inline PatternFileData read_pattern_file(const std::filesystem::path& path,
                                         const std::optional<Window>& window = std::nullopt) {
  const std::vector<std::string> lines = detail::read_lines(path);
  if (lines.empty()) throw Error(path.string() + ": empty file");

  const auto header = detail::split_csv(lines[0]);
  bool labeled = false;
  if (header.size() == 2 && header[0] == "x" && header[1] == "y") {
    labeled = false;
  } else if (header.size() == 3 && header[0] == "x" && header[1] == "y" && header[2] == "label") {
    labeled = true;
  } else {
    throw Error(path.string() + ": row 1: expected header 'x,y' or 'x,y,label'");
  }

  std::vector<Point> points;
  std::vector<PointLabel> labels;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::string_view raw = detail::trim(lines[r]);
    if (raw.empty()) continue;
    const auto fields = detail::split_csv(lines[r]);
    const std::size_t expected = labeled ? 3 : 2;
    if (fields.size() != expected) {
      throw Error(path.string() + ": row " + std::to_string(r + 1) + ": expected " +
                  std::to_string(expected) + " columns, found " + std::to_string(fields.size()));
    }
    const double x = detail::parse_real(fields[0], r + 1, 1);
    const double y = detail::parse_real(fields[1], r + 1, 2);
    points.push_back({x, y});
    if (labeled) {
      if (fields[2] == "free") {
        labels.push_back(PointLabel::free);
      } else if (fields[2] == "fixed") {
        labels.push_back(PointLabel::fixed);
      } else {
        throw Error(path.string() + ": row " + std::to_string(r + 1) +
                    ": label must be 'free' or 'fixed'");
      }
    }
  }
  if (points.empty()) throw Error(path.string() + ": no points");

  Window w = [&] {
    if (window) {
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (!window->contains(points[i])) {
          throw Error(path.string() + ": row " + std::to_string(i + 2) +
                      ": point lies outside the window");
        }
      }
      return *window;
    }
    double lo_x = points[0].x, hi_x = points[0].x;
    double lo_y = points[0].y, hi_y = points[0].y;
    for (const Point& p : points) {
      lo_x = std::min(lo_x, p.x);
      hi_x = std::max(hi_x, p.x);
      lo_y = std::min(lo_y, p.y);
      hi_y = std::max(hi_y, p.y);
    }
    if (!(hi_x > lo_x) || !(hi_y > lo_y)) {
      throw Error(path.string() + ": degenerate bounding box; supply an explicit window");
    }
    const double mx = 0.01 * (hi_x - lo_x);
    const double my = 0.01 * (hi_y - lo_y);
    return Window(lo_x - mx, hi_x + mx, lo_y - my, hi_y + my);
  }();

  PatternFileData out{PointPattern(w, std::move(points)), std::nullopt};
  if (labeled) out.labels = std::move(labels);
  return out;
}

inline PointPattern read_pattern(const std::filesystem::path& path,
                                 const std::optional<Window>& window = std::nullopt) {
  return read_pattern_file(path, window).pattern;
}

inline void write_pattern(const PointPattern& pattern, const std::filesystem::path& path) {
  std::string out = "x,y\n";
  for (const Point& p : pattern.points()) {
    out += format_real(p.x) + "," + format_real(p.y) + "\n";
  }
  atomic_write(path, out);
}

inline void write_pattern(const LabeledPattern& labeled, const std::filesystem::path& path) {
  std::string out = "x,y,label\n";
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    const Point& p = labeled.pattern().points()[i];
    out += format_real(p.x) + "," + format_real(p.y) + "," +
           (labeled.labels()[i] == PointLabel::fixed ? "fixed" : "free") + "\n";
  }
  atomic_write(path, out);
}

/// Field CSV: one row per node, row-major in (i,j).
inline void write_field(const IntensityField& field, const std::filesystem::path& path) {
  std::string out = "i,j,x,y,value,fixed\n";
  const int m = field.resolution();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const Point p = field.node(i, j);
      out += std::to_string(i) + "," + std::to_string(j) + "," + format_real(p.x) + "," +
             format_real(p.y) + "," + format_real(field.at(i, j)) + "," +
             (field.fixed_at(i, j) ? "1" : "0") + "\n";
    }
  }
  atomic_write(path, out);
}

inline IntensityField read_field(const std::filesystem::path& path) {
  const std::vector<std::string> lines = detail::read_lines(path);
  if (lines.empty()) throw Error(path.string() + ": empty file");
  if (detail::trim(lines[0]) != "i,j,x,y,value,fixed") {
    throw Error(path.string() + ": row 1: expected header 'i,j,x,y,value,fixed'");
  }
  struct Row {
    int i, j;
    double x, y, value;
    bool fixed;
  };
  std::vector<Row> rows;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (detail::trim(lines[r]).empty()) continue;
    const auto f = detail::split_csv(lines[r]);
    if (f.size() != 6) {
      throw Error(path.string() + ": row " + std::to_string(r + 1) + ": expected 6 columns");
    }
    Row row;
    row.i = static_cast<int>(detail::parse_real(f[0], r + 1, 1));
    row.j = static_cast<int>(detail::parse_real(f[1], r + 1, 2));
    row.x = detail::parse_real(f[2], r + 1, 3);
    row.y = detail::parse_real(f[3], r + 1, 4);
    row.value = detail::parse_real(f[4], r + 1, 5);
    row.fixed = detail::parse_real(f[5], r + 1, 6) != 0.0;
    rows.push_back(row);
  }
  if (rows.empty()) throw Error(path.string() + ": no field nodes");
  int m = 0;
  for (const Row& row : rows) m = std::max({m, row.i + 1, row.j + 1});
  if (static_cast<std::size_t>(m) * m != rows.size()) {
    throw Error(path.string() + ": node rows do not form a complete square grid");
  }
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  std::vector<double> values(rows.size(), 0.0);
  std::vector<std::uint8_t> fixed(rows.size(), 0);
  for (const Row& row : rows) {
    if (row.i < 0 || row.i >= m || row.j < 0 || row.j >= m) {
      throw Error(path.string() + ": node index out of range");
    }
    if (row.i == 0 && row.j == 0) {
      a = row.x;
      c = row.y;
    }
    if (row.i == m - 1 && row.j == m - 1) {
      b = row.x;
      d = row.y;
    }
    values[static_cast<std::size_t>(row.i) * m + row.j] = row.value;
    fixed[static_cast<std::size_t>(row.i) * m + row.j] = row.fixed ? 1 : 0;
  }
  return IntensityField(Window(a, b, c, d), m, std::move(values), std::move(fixed));
}

/// Graph CSV: one undirected edge per row with i < j.
inline void write_graph(const DelaunayGraph& graph, const std::filesystem::path& path) {
  std::string out = "i,j\n";
  for (const auto& [i, j] : graph.edges()) {
    out += std::to_string(i) + "," + std::to_string(j) + "\n";
  }
  atomic_write(path, out);
}

inline void write_k(const KFunction& k, const std::filesystem::path& path) {
  std::string out = "t,value\n";
  for (std::size_t i = 0; i < k.t.size(); ++i) {
    out += format_real(k.t[i]) + "," + format_real(k.values[i]) + "\n";
  }
  atomic_write(path, out);
}

inline void write_envelope(const Envelope& env, const std::filesystem::path& path) {
  std::string out = "t,lower,upper\n";
  for (std::size_t i = 0; i < env.t.size(); ++i) {
    out += format_real(env.t[i]) + "," + format_real(env.lower[i]) + "," +
           format_real(env.upper[i]) + "\n";
  }
  atomic_write(path, out);
}

inline void write_risk(const RiskCurve& curve, const std::filesystem::path& path) {
  std::string out = "bandwidth,risk\n";
  for (std::size_t i = 0; i < curve.bandwidths.size(); ++i) {
    out += format_real(curve.bandwidths[i]) + "," + format_real(curve.risks[i]) + "\n";
  }
  atomic_write(path, out);
}

inline const char* to_string(CsrVerdict v) {
  switch (v) {
    case CsrVerdict::consistent: return "consistent";
    case CsrVerdict::clustering: return "clustering";
    case CsrVerdict::repulsion: return "repulsion";
  }
  return "consistent";
}

inline const char* to_string(ExitDirection e) {
  switch (e) {
    case ExitDirection::inside: return "inside";
    case ExitDirection::above: return "above";
    case ExitDirection::below: return "below";
  }
  return "inside";
}

inline const char* to_string(NoiseMode m) {
  return m == NoiseMode::constant ? "constant" : "sqrt_intensity";
}

inline void write_report(const CsrReport& report, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["verdict"] = to_string(report.verdict);
  doc["homogenized_rate"] = report.homogenized_rate;
  doc["n_after_thinning"] = report.n_after_thinning;
  doc["n_sims"] = report.band.n_sims;
  doc["t"] = report.observed.t;
  doc["observed"] = report.observed.values;
  doc["lower"] = report.band.lower;
  doc["upper"] = report.band.upper;
  std::vector<std::string> exits;
  exits.reserve(report.exit_direction.size());
  for (ExitDirection e : report.exit_direction) exits.emplace_back(to_string(e));
  doc["exit_direction"] = exits;
  atomic_write(path, doc.dump(2) + "\n");
}

inline void write_diagnostics(const SyntheticDiagnostics& diag,
                              const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["sweeps_used"] = diag.sweeps_used;
  doc["converged"] = diag.converged;
  doc["n_free"] = diag.n_free;
  doc["n_fixed"] = diag.n_fixed;
  doc["bandwidth"] = diag.bandwidth;
  doc["epsilon_mode"] = to_string(diag.epsilon_mode);
  doc["seed"] = diag.seed;
  doc["clamped_moves"] = diag.clamped_moves;
  atomic_write(path, doc.dump(2) + "\n");
}

}  // namespace antgen
