#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "antgen/core.hpp"
#include "antgen/intensity.hpp"
#include "antgen/rng.hpp"
#include "antgen/simulate.hpp"
#include "antgen/triangulate.hpp"

namespace antgen {

enum class NoiseMode : std::uint8_t { constant, sqrt_intensity };

/// Gaussian scatter applied at each relocation, as a per-coordinate standard
/// deviation. Either a constant, or scale * sqrt(intensity at the point);
/// the square root carries units of density^(1/2), so a scale knob is
/// provided rather than an invented rescaling.
class NoiseSpec {
 public:
  static NoiseSpec constant(double epsilon) {
    if (!std::isfinite(epsilon) || epsilon < 0.0) {
      throw Error("noise level must be nonnegative and finite");
    }
    NoiseSpec s;
    s.mode_ = NoiseMode::constant;
    s.value_ = epsilon;
    return s;
  }

  static NoiseSpec sqrt_intensity(IntensityField field, double scale = 1.0) {
    NoiseSpec s = sqrt_intensity_deferred(scale);
    s.field_ = std::move(field);
    return s;
  }

  /// sqrt mode with the reference field supplied later (the generation
  /// pipeline substitutes its own extended field).
  static NoiseSpec sqrt_intensity_deferred(double scale = 1.0) {
    if (!std::isfinite(scale) || scale < 0.0) throw Error("noise scale must be nonnegative");
    NoiseSpec s;
    s.mode_ = NoiseMode::sqrt_intensity;
    s.value_ = scale;
    return s;
  }

  NoiseMode mode() const { return mode_; }
  bool has_field() const { return field_.has_value(); }

  NoiseSpec with_field(IntensityField field) const {
    NoiseSpec s = *this;
    s.field_ = std::move(field);
    return s;
  }

  /// Standard deviation at a point. Queries outside the reference field's box
  /// are clamped onto it.
  double at(const Point& p) const {
    if (mode_ == NoiseMode::constant) return value_;
    if (!field_) throw Error("sqrt-intensity noise has no reference field");
    const Point q = field_->box().clamp(p);
    return value_ * std::sqrt(field_->evaluate(q));
  }

 private:
  NoiseSpec() = default;
  NoiseMode mode_ = NoiseMode::constant;
  double value_ = 0.0;
  std::optional<IntensityField> field_;
};

struct DeformConfig {
  double k = 3.0;          // convergence multiplier on epsilon
  long max_sweeps = 1000;  // hard stop; the noisy criterion need not trigger
  NoiseSpec noise = NoiseSpec::constant(0.0);
  Seed seed = 0;

  void validate() const {
    if (!std::isfinite(k) || !(k > 0.0)) throw Error("convergence multiplier k must be positive");
    if (max_sweeps < 1) throw Error("max_sweeps must be at least 1");
  }
};

struct DeformResult {
  PointPattern pattern;
  long sweeps_used = 0;
  bool converged = false;
  std::size_t clamped_moves = 0;        // relocations pulled back onto the box
  std::vector<double> sweep_energy;     // sum over edges of squared length, per sweep
};

namespace detail {
// Movement threshold floor when k*epsilon vanishes, relative to the box
// diameter; keeps the zero-noise fixed point detectable.
constexpr double kZeroNoiseTolFactor = 1e-11;
}  // namespace detail

/// Iterative harmonic deformation: free points are swept in ascending index
/// order, each relocated to the barycenter of its current neighbors plus
/// isotropic Gaussian noise with standard deviation epsilon(barycenter).
/// Fixed points never move. A sweep in which every free point moves at most
/// k * epsilon(its previous position) ends the iteration; otherwise it stops
/// at max_sweeps with converged = false. The adjacency is taken as given and
/// never recomputed from the moving points.
inline DeformResult harmonic_deform(const LabeledPattern& labeled, const DelaunayGraph& graph,
                                    const DeformConfig& config) {
  config.validate();
  const std::size_t n = labeled.size();
  if (graph.n() != n) throw Error("graph size does not match the pattern");
  if (labeled.count(PointLabel::fixed) == 0) {
    throw Error("unanchored deformation collapses: at least one fixed point is required");
  }
  const auto& labels = labeled.labels();
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] == PointLabel::free && graph.neighbors(i).empty()) {
      throw Error("free point " + std::to_string(i) + " has no neighbors");
    }
  }

  const Window& box = labeled.pattern().window();
  const double zero_tol = detail::kZeroNoiseTolFactor * box.diameter();
  std::vector<Point> pos = labeled.pattern().points();
  Rng rng(config.seed);
  std::normal_distribution<double> std_normal(0.0, 1.0);

  const auto edge_energy = [&]() {
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j : graph.neighbors(i)) {
        if (i < j) e += squared_distance(pos[i], pos[j]);
      }
    }
    return e;
  };

  DeformResult result{labeled.pattern(), 0, false, 0, {}};
  for (long sweep = 0; sweep < config.max_sweeps; ++sweep) {
    bool settled = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] != PointLabel::free) continue;
      const Point old = pos[i];
      Point mu = barycenter(pos, graph.neighbors(i));
      const double eps_mu = config.noise.at(mu);
      // Noise draws are consumed even when epsilon is zero.
      const double z1 = std_normal(rng);
      const double z2 = std_normal(rng);
      Point moved{mu.x + eps_mu * z1, mu.y + eps_mu * z2};
      const Point clamped = box.clamp(moved);
      if (!(clamped == moved)) ++result.clamped_moves;
      pos[i] = clamped;
      const double threshold = std::max(config.k * config.noise.at(old), zero_tol);
      if (distance(pos[i], old) > threshold) settled = false;
    }
    result.sweep_energy.push_back(edge_energy());
    result.sweeps_used = sweep + 1;
    if (settled) {
      result.converged = true;
      break;
    }
  }

  result.pattern = PointPattern(box, std::move(pos));
  return result;
}

struct SyntheticDiagnostics {
  long sweeps_used = 0;
  bool converged = false;
  std::size_t n_free = 0;
  std::size_t n_fixed = 0;
  std::size_t clamped_moves = 0;
  double bandwidth = 0.0;
  NoiseMode epsilon_mode = NoiseMode::constant;
  Seed seed = 0;
  std::optional<IntensityField> extended_field;
  std::optional<RiskCurve> risk_curve;          // present when bandwidth was selected
  std::optional<LabeledPattern> unclipped;      // deformed points over the whole box
};

struct SyntheticResult {
  PointPattern pattern;  // free points after deformation, clipped to the data window
  SyntheticDiagnostics diagnostics;
};

/// Bandwidth argument for the generation pipeline: a value, or automatic
/// leave-one-out selection over the default candidate grid.
struct BandwidthSpec {
  std::optional<double> value;  // nullopt selects automatically

  static BandwidthSpec automatic() { return {}; }
  static BandwidthSpec fixed(double b) { return {b}; }
};

namespace detail {

[[noreturn]] inline void rethrow_stage(const char* stage, const std::exception& e) {
  throw Error(std::string("generate_synthetic[") + stage + "]: " + e.what());
}

}  // namespace detail

/// Full synthetic-generation pipeline: fit the kernel intensity on the data
/// window S, extend it harmonically over an inflated box B with zero outer
/// boundary, simulate a Poisson process from the extended intensity over B
/// (points in B\S become fixed anchors, points in S are free), triangulate
/// the union once, run the harmonic deformation with noise, and return the
/// free points clipped back to S.
inline SyntheticResult generate_synthetic(const PointPattern& real_pattern, double box_inflation,
                                          int grid_m, const BandwidthSpec& bandwidth,
                                          const DeformConfig& config) {
  config.validate();
  if (real_pattern.empty()) throw Error("generate_synthetic needs a nonempty pattern");
  if (!std::isfinite(box_inflation) || !(box_inflation > 0.0)) {
    throw Error("box inflation must be positive");
  }

  const Window s = real_pattern.window();
  const Window box = s.inflated(box_inflation * s.diameter());

  SyntheticDiagnostics diag;
  diag.seed = config.seed;
  diag.epsilon_mode = config.noise.mode();

  double b = 0.0;
  try {
    if (bandwidth.value) {
      b = *bandwidth.value;
    } else {
      BandwidthSelection sel = select_bandwidth(real_pattern, default_bandwidth_candidates(s));
      b = sel.bandwidth;
      diag.risk_curve = std::move(sel.curve);
    }
  } catch (const Error& e) {
    detail::rethrow_stage("bandwidth", e);
  }
  diag.bandwidth = b;

  IntensityField field = [&] {
    try {
      const IntensityField raw = fit_field(real_pattern, KernelConfig(b), box, grid_m);
      return harmonic_extension(raw).field;
    } catch (const Error& e) {
      detail::rethrow_stage("extend", e);
    }
  }();

  const PointPattern simulated = [&] {
    try {
      return simulate_inhomogeneous_reject(field, field.max_value(),
                                           derive_seed(config.seed, "generate.simulate"));
    } catch (const Error& e) {
      detail::rethrow_stage("simulate", e);
    }
  }();

  std::vector<Point> points;
  std::vector<PointLabel> labels;
  for (const Point& p : simulated.points()) {  // free points first, in draw order
    if (s.contains(p)) {
      points.push_back(p);
      labels.push_back(PointLabel::free);
    }
  }
  diag.n_free = points.size();
  for (const Point& p : simulated.points()) {
    if (!s.contains(p)) {
      points.push_back(p);
      labels.push_back(PointLabel::fixed);
    }
  }
  diag.n_fixed = points.size() - diag.n_free;
  diag.extended_field = field;

  DeformConfig deform_config = config;
  deform_config.seed = derive_seed(config.seed, "generate.deform");
  if (deform_config.noise.mode() == NoiseMode::sqrt_intensity &&
      !deform_config.noise.has_field()) {
    deform_config.noise = deform_config.noise.with_field(field);
  }

  if (diag.n_free == 0) {
    // Nothing to deform; an empty synthetic pattern is a valid outcome.
    diag.converged = true;
    return {PointPattern(s), std::move(diag)};
  }

  const LabeledPattern labeled(PointPattern(box, std::move(points)), std::move(labels));
  const DelaunayGraph graph = [&] {
    try {
      return triangulate(labeled.pattern());
    } catch (const Error& e) {
      detail::rethrow_stage("triangulate", e);
    }
  }();

  const DeformResult deformed = [&] {
    try {
      return harmonic_deform(labeled, graph, deform_config);
    } catch (const Error& e) {
      detail::rethrow_stage("deform", e);
    }
  }();

  diag.sweeps_used = deformed.sweeps_used;
  diag.converged = deformed.converged;
  diag.clamped_moves = deformed.clamped_moves;
  diag.unclipped = LabeledPattern(deformed.pattern, labeled.labels());

  std::vector<Point> clipped;
  for (std::size_t i = 0; i < diag.n_free; ++i) {
    const Point& p = deformed.pattern.points()[i];
    if (s.contains(p)) clipped.push_back(p);
  }
  return {PointPattern(s, std::move(clipped)), std::move(diag)};
}

}  // namespace antgen
