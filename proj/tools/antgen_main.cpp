// antgen: command-line front end for the spatial point-process toolkit.
// Subcommands cover intensity estimation, Poisson simulation, the
// CSR/Poisson hypothesis test, and synthetic pattern generation. Every
// command writes a run manifest next to its primary output; `replay`
// re-executes a manifest and reproduces the outputs byte for byte.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "antgen/antgen.hpp"

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<antgen::Window> parse_window(const std::string& spec) {
  if (spec.empty()) return std::nullopt;
  std::vector<double> v;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = spec.find(',', start);
    const std::string field = spec.substr(start, comma - start);
    try {
      v.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw UsageError("cannot parse --window component '" + field + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (v.size() != 4) throw UsageError("--window expects a,b,c,d");
  try {
    return antgen::Window(v[0], v[1], v[2], v[3]);
  } catch (const antgen::Error& e) {
    throw UsageError(e.what());
  }
}

// "auto" or a positive real.
std::optional<double> parse_bandwidth(const std::string& spec) {
  if (spec == "auto") return std::nullopt;
  double v = 0.0;
  try {
    v = std::stod(spec);
  } catch (const std::exception&) {
    throw UsageError("--bandwidth expects 'auto' or a positive real");
  }
  if (!(v > 0.0)) throw UsageError("--bandwidth must be positive");
  return v;
}

// "const:<v>" or "sqrt".
antgen::NoiseSpec parse_epsilon(const std::string& spec, double scale) {
  if (spec == "sqrt") return antgen::NoiseSpec::sqrt_intensity_deferred(scale);
  if (spec.rfind("const:", 0) == 0) {
    double v = 0.0;
    try {
      v = std::stod(spec.substr(6));
    } catch (const std::exception&) {
      throw UsageError("cannot parse --epsilon value '" + spec + "'");
    }
    if (v < 0.0) throw UsageError("--epsilon constant must be nonnegative");
    return antgen::NoiseSpec::constant(v);
  }
  throw UsageError("--epsilon expects const:<value> or sqrt");
}

void write_manifest(const std::string& command, const json& flags,
                    const std::vector<std::string>& input_paths,
                    const std::vector<std::string>& output_paths,
                    const std::filesystem::path& primary_output) {
  json doc;
  doc["tool"] = "antgen";
  doc["version"] = antgen::kVersion;
  doc["command"] = command;
  doc["flags"] = flags;
  json inputs = json::object();
  for (const auto& p : input_paths) inputs[p] = antgen::file_digest(p);
  doc["inputs"] = inputs;
  doc["outputs"] = output_paths;
  antgen::atomic_write(primary_output.string() + ".manifest.json", doc.dump(2) + "\n");
}

// ---------------------------------------------------------------- estimate

struct EstimateOpts {
  std::string input;
  std::string bandwidth = "auto";
  int grid_m = 64;
  std::string out_field = "field.csv";
  std::string out_risk;
  std::string plot;
};

void run_estimate(const EstimateOpts& o) {
  if (o.grid_m < 2) throw UsageError("--grid-m must be at least 2");
  const antgen::PointPattern pattern = antgen::read_pattern(o.input);

  double b = 0.0;
  std::optional<antgen::RiskCurve> curve;
  if (const auto fixed = parse_bandwidth(o.bandwidth)) {
    b = *fixed;
  } else {
    antgen::BandwidthSelection sel = antgen::select_bandwidth(
        pattern, antgen::default_bandwidth_candidates(pattern.window()));
    b = sel.bandwidth;
    curve = std::move(sel.curve);
  }

  const antgen::IntensityField field =
      antgen::fit_field(pattern, antgen::KernelConfig(b), pattern.window(), o.grid_m);
  antgen::write_field(field, o.out_field);
  std::vector<std::string> outputs{o.out_field};
  if (!o.out_risk.empty()) {
    if (!curve) {
      antgen::BandwidthSelection sel = antgen::select_bandwidth(
          pattern, antgen::default_bandwidth_candidates(pattern.window()));
      curve = std::move(sel.curve);
    }
    antgen::write_risk(*curve, o.out_risk);
    outputs.push_back(o.out_risk);
  }
  if (!o.plot.empty()) {
    antgen::plot_field_svg(field, o.plot);
    outputs.push_back(o.plot);
  }

  json flags{{"input", o.input},     {"bandwidth", o.bandwidth}, {"grid-m", o.grid_m},
             {"out-field", o.out_field}, {"out-risk", o.out_risk},   {"plot", o.plot}};
  write_manifest("estimate", flags, {o.input}, outputs, o.out_field);
  std::cout << "estimate: bandwidth " << antgen::format_real(b) << ", field " << o.out_field
            << "\n";
}

EstimateOpts estimate_opts_from_json(const json& flags) {
  EstimateOpts o;
  o.input = flags.at("input").get<std::string>();
  o.bandwidth = flags.at("bandwidth").get<std::string>();
  o.grid_m = flags.at("grid-m").get<int>();
  o.out_field = flags.at("out-field").get<std::string>();
  o.out_risk = flags.at("out-risk").get<std::string>();
  o.plot = flags.at("plot").get<std::string>();
  return o;
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
  std::string mode;
  double rate = -1.0;
  std::string field;
  std::string window;
  int m_sim = 100;
  double lmax = -1.0;
  antgen::Seed seed = 1;
  std::string out = "pattern.csv";
};

void run_simulate(const SimulateOpts& o) {
  antgen::PointPattern result = [&] {
    if (o.mode == "homog") {
      if (o.rate < 0.0) throw UsageError("--mode homog requires --rate >= 0");
      const auto w = parse_window(o.window);
      if (!w) throw UsageError("--mode homog requires --window a,b,c,d");
      return antgen::simulate_homogeneous(o.rate, *w, o.seed);
    }
    if (o.mode == "grid" || o.mode == "reject") {
      if (o.field.empty()) throw UsageError("--mode " + o.mode + " requires --field");
      const antgen::IntensityField field = antgen::read_field(o.field);
      if (o.mode == "grid") {
        if (o.m_sim < 1) throw UsageError("--m-sim must be at least 1");
        return antgen::simulate_inhomogeneous_grid(field, o.m_sim, o.seed);
      }
      if (o.lmax < 0.0) throw UsageError("--mode reject requires --lmax");
      return antgen::simulate_inhomogeneous_reject(field, o.lmax, o.seed);
    }
    throw UsageError("--mode must be homog, grid, or reject");
  }();

  antgen::write_pattern(result, o.out);
  json flags{{"mode", o.mode},   {"rate", o.rate}, {"field", o.field}, {"window", o.window},
             {"m-sim", o.m_sim}, {"lmax", o.lmax}, {"seed", o.seed},   {"out", o.out}};
  std::vector<std::string> inputs;
  if (!o.field.empty()) inputs.push_back(o.field);
  write_manifest("simulate", flags, inputs, {o.out}, o.out);
  std::cout << "simulate: " << result.size() << " points -> " << o.out << "\n";
}

SimulateOpts simulate_opts_from_json(const json& flags) {
  SimulateOpts o;
  o.mode = flags.at("mode").get<std::string>();
  o.rate = flags.at("rate").get<double>();
  o.field = flags.at("field").get<std::string>();
  o.window = flags.at("window").get<std::string>();
  o.m_sim = flags.at("m-sim").get<int>();
  o.lmax = flags.at("lmax").get<double>();
  o.seed = flags.at("seed").get<antgen::Seed>();
  o.out = flags.at("out").get<std::string>();
  return o;
}

// ---------------------------------------------------------------- test-csr

struct TestCsrOpts {
  std::string input;
  std::string field;
  std::string bandwidth = "auto";
  int grid_m = 64;
  int sims = 100;
  antgen::Seed seed = 1;
  std::string out_report = "csr_report.json";
  std::string plot;
};

void run_test_csr(const TestCsrOpts& o) {
  if (o.sims < 2) throw UsageError("--sims must be at least 2");
  if (o.grid_m < 2) throw UsageError("--grid-m must be at least 2");
  const antgen::PointPattern pattern = antgen::read_pattern(o.input);

  const antgen::IntensityField field = [&] {
    if (!o.field.empty()) return antgen::read_field(o.field);
    double b = 0.0;
    if (const auto fixed = parse_bandwidth(o.bandwidth)) {
      b = *fixed;
    } else {
      b = antgen::select_bandwidth(pattern,
                                   antgen::default_bandwidth_candidates(pattern.window()))
              .bandwidth;
    }
    return antgen::fit_field(pattern, antgen::KernelConfig(b), pattern.window(), o.grid_m);
  }();

  const std::vector<double> t_grid = antgen::default_t_grid(pattern.window());
  const antgen::CsrReport report = antgen::csr_test(pattern, field, o.sims, t_grid, o.seed);
  antgen::write_report(report, o.out_report);
  std::vector<std::string> outputs{o.out_report};
  if (!o.plot.empty()) {
    antgen::plot_k_svg(report.observed, report.band, o.plot);
    outputs.push_back(o.plot);
  }

  json flags{{"input", o.input}, {"field", o.field},   {"bandwidth", o.bandwidth},
             {"grid-m", o.grid_m}, {"sims", o.sims},   {"seed", o.seed},
             {"out-report", o.out_report}, {"plot", o.plot}};
  std::vector<std::string> inputs{o.input};
  if (!o.field.empty()) inputs.push_back(o.field);
  write_manifest("test-csr", flags, inputs, outputs, o.out_report);
  std::cout << "test-csr: verdict " << antgen::to_string(report.verdict) << " ("
            << report.n_after_thinning << " points after homogenization) -> " << o.out_report
            << "\n";
}

TestCsrOpts test_csr_opts_from_json(const json& flags) {
  TestCsrOpts o;
  o.input = flags.at("input").get<std::string>();
  o.field = flags.at("field").get<std::string>();
  o.bandwidth = flags.at("bandwidth").get<std::string>();
  o.grid_m = flags.at("grid-m").get<int>();
  o.sims = flags.at("sims").get<int>();
  o.seed = flags.at("seed").get<antgen::Seed>();
  o.out_report = flags.at("out-report").get<std::string>();
  o.plot = flags.at("plot").get<std::string>();
  return o;
}

// ---------------------------------------------------------------- generate

struct GenerateOpts {
  std::string input;
  double inflation = 0.25;
  int grid_m = 64;
  std::string epsilon = "sqrt";
  double epsilon_scale = 1.0;
  double k = 3.0;
  long max_sweeps = 1000;
  antgen::Seed seed = 1;
  std::string out = "synthetic.csv";
  std::string out_diagnostics;
  std::string plot;
};

void run_generate(const GenerateOpts& o) {
  if (!(o.k > 0.0)) throw UsageError("--k must be positive");
  if (o.max_sweeps < 1) throw UsageError("--max-sweeps must be at least 1");
  if (!(o.inflation > 0.0)) throw UsageError("--inflation must be positive");
  if (o.grid_m < 2) throw UsageError("--grid-m must be at least 2");
  const antgen::PointPattern pattern = antgen::read_pattern(o.input);

  antgen::DeformConfig config;
  config.k = o.k;
  config.max_sweeps = o.max_sweeps;
  config.noise = parse_epsilon(o.epsilon, o.epsilon_scale);
  config.seed = o.seed;

  const antgen::SyntheticResult result = antgen::generate_synthetic(
      pattern, o.inflation, o.grid_m, antgen::BandwidthSpec::automatic(), config);

  antgen::write_pattern(result.pattern, o.out);
  std::vector<std::string> outputs{o.out};
  if (!o.out_diagnostics.empty()) {
    antgen::write_diagnostics(result.diagnostics, o.out_diagnostics);
    outputs.push_back(o.out_diagnostics);
  }
  if (!o.plot.empty()) {
    if (result.diagnostics.unclipped) {
      antgen::plot_pattern_svg(*result.diagnostics.unclipped, o.plot);
    } else {
      antgen::plot_pattern_svg(result.pattern, o.plot);
    }
    outputs.push_back(o.plot);
  }

  json flags{{"input", o.input},
             {"inflation", o.inflation},
             {"grid-m", o.grid_m},
             {"epsilon", o.epsilon},
             {"epsilon-scale", o.epsilon_scale},
             {"k", o.k},
             {"max-sweeps", o.max_sweeps},
             {"seed", o.seed},
             {"out", o.out},
             {"out-diagnostics", o.out_diagnostics},
             {"plot", o.plot}};
  write_manifest("generate", flags, {o.input}, outputs, o.out);
  std::cout << "generate: " << result.pattern.size() << " synthetic points ("
            << (result.diagnostics.converged ? "converged" : "sweep cap") << " after "
            << result.diagnostics.sweeps_used << " sweeps) -> " << o.out << "\n";
}

GenerateOpts generate_opts_from_json(const json& flags) {
  GenerateOpts o;
  o.input = flags.at("input").get<std::string>();
  o.inflation = flags.at("inflation").get<double>();
  o.grid_m = flags.at("grid-m").get<int>();
  o.epsilon = flags.at("epsilon").get<std::string>();
  o.epsilon_scale = flags.at("epsilon-scale").get<double>();
  o.k = flags.at("k").get<double>();
  o.max_sweeps = flags.at("max-sweeps").get<long>();
  o.seed = flags.at("seed").get<antgen::Seed>();
  o.out = flags.at("out").get<std::string>();
  o.out_diagnostics = flags.at("out-diagnostics").get<std::string>();
  o.plot = flags.at("plot").get<std::string>();
  return o;
}

// ------------------------------------------------------------------ replay

void run_replay(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw antgen::Error("cannot open manifest: " + manifest_path);
  json doc = json::parse(in, nullptr, true);
  if (doc.value("tool", "") != "antgen") throw antgen::Error("not an antgen manifest");
  for (const auto& [path, digest] : doc.at("inputs").items()) {
    const std::string current = antgen::file_digest(path);
    if (current != digest.get<std::string>()) {
      throw antgen::Error("input " + path + " changed since the manifest was written");
    }
  }
  const std::string command = doc.at("command").get<std::string>();
  const json& flags = doc.at("flags");
  if (command == "estimate") {
    run_estimate(estimate_opts_from_json(flags));
  } else if (command == "simulate") {
    run_simulate(simulate_opts_from_json(flags));
  } else if (command == "test-csr") {
    run_test_csr(test_csr_opts_from_json(flags));
  } else if (command == "generate") {
    run_generate(generate_opts_from_json(flags));
  } else {
    throw antgen::Error("manifest has unknown command '" + command + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"antgen: spatial point-process toolkit (CSR testing and synthetic antennas)"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("antgen ") + antgen::kVersion);

  EstimateOpts est;
  CLI::App* estimate = app.add_subcommand("estimate", "Kernel intensity estimation");
  estimate->add_option("--input", est.input, "Pattern CSV (x,y)")->required();
  estimate->add_option("--bandwidth", est.bandwidth, "Bandwidth value or 'auto'");
  estimate->add_option("--grid-m", est.grid_m, "Field nodes per side");
  estimate->add_option("--out-field", est.out_field, "Field CSV output");
  estimate->add_option("--out-risk", est.out_risk, "Risk curve CSV output");
  estimate->add_option("--plot", est.plot, "Field heat map SVG");

  SimulateOpts sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Poisson process simulation");
  simulate->add_option("--mode", sim.mode, "homog | grid | reject")->required();
  simulate->add_option("--rate", sim.rate, "Intensity for homog mode");
  simulate->add_option("--field", sim.field, "Field CSV for grid/reject modes");
  simulate->add_option("--window", sim.window, "a,b,c,d for homog mode");
  simulate->add_option("--m-sim", sim.m_sim, "Cells per side for grid mode");
  simulate->add_option("--lmax", sim.lmax, "Dominating rate for reject mode");
  simulate->add_option("--seed", sim.seed, "RNG seed");
  simulate->add_option("--out", sim.out, "Pattern CSV output");

  TestCsrOpts csr;
  CLI::App* test_csr = app.add_subcommand("test-csr", "CSR/Poisson hypothesis test");
  test_csr->add_option("--input", csr.input, "Pattern CSV")->required();
  test_csr->add_option("--field", csr.field, "Intensity field CSV (skips estimation)");
  test_csr->add_option("--bandwidth", csr.bandwidth, "Bandwidth value or 'auto'");
  test_csr->add_option("--grid-m", csr.grid_m, "Field nodes per side when estimating");
  test_csr->add_option("--sims", csr.sims, "Envelope ensemble size");
  test_csr->add_option("--seed", csr.seed, "RNG seed");
  test_csr->add_option("--out-report", csr.out_report, "Report JSON output");
  test_csr->add_option("--plot", csr.plot, "K-with-envelope SVG");

  GenerateOpts gen;
  CLI::App* generate = app.add_subcommand("generate", "Synthetic pattern generation");
  generate->add_option("--input", gen.input, "Pattern CSV of real locations")->required();
  generate->add_option("--inflation", gen.inflation, "Box margin as a fraction of the diameter");
  generate->add_option("--grid-m", gen.grid_m, "Extension grid nodes per side");
  generate->add_option("--epsilon", gen.epsilon, "const:<value> or sqrt");
  generate->add_option("--epsilon-scale", gen.epsilon_scale, "Multiplier on sqrt-intensity noise");
  generate->add_option("--k", gen.k, "Convergence multiplier");
  generate->add_option("--max-sweeps", gen.max_sweeps, "Sweep cap");
  generate->add_option("--seed", gen.seed, "RNG seed");
  generate->add_option("--out", gen.out, "Synthetic pattern CSV output");
  generate->add_option("--out-diagnostics", gen.out_diagnostics, "Diagnostics JSON output");
  generate->add_option("--plot", gen.plot, "Deformed pattern SVG");

  std::string manifest_path;
  CLI::App* replay = app.add_subcommand("replay", "Re-run a recorded manifest");
  replay->add_option("--manifest", manifest_path, "RunManifest JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }

  try {
    if (estimate->parsed()) run_estimate(est);
    if (simulate->parsed()) run_simulate(sim);
    if (test_csr->parsed()) run_test_csr(csr);
    if (generate->parsed()) run_generate(gen);
    if (replay->parsed()) run_replay(manifest_path);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
