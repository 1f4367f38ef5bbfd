#include "lsverify/cli.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace lsv {

namespace {

// ---------------------------------------------------------------------------
// File and JSON plumbing
// ---------------------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(Errc::IoError, "failed reading " + path);
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) throw Error(Errc::IoError, "failed writing " + path);
}

Json load_json(const std::string& path) {
  Json j = Json::parse(read_file(path), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw Error(Errc::SchemaError, path + ": malformed JSON");
  return j;
}

// Configuration document {"domain": ..., "thick_set": ..., "quadrature": ...},
// each entry optional; callers demand the ones they need.
struct ConfigDoc {
  std::optional<Domain> domain;
  std::optional<ThickSet> omega;
  QuadratureSpec spec;
};

ConfigDoc load_config_doc(const std::string& path) {
  const Json j = load_json(path);
  if (!j.is_object()) throw Error(Errc::SchemaError, "$: expected an object");
  reject_unknown_keys(j, {"domain", "thick_set", "quadrature"}, "$");
  ConfigDoc doc;
  if (j.contains("domain")) doc.domain = domain_from_json(j["domain"], "$.domain");
  if (j.contains("thick_set"))
    doc.omega = thickset_from_json(j["thick_set"], "$.thick_set");
  if (j.contains("quadrature"))
    doc.spec = quadrature_from_json(j["quadrature"], "$.quadrature");
  return doc;
}

// Optional per-model scalar flags assembled into the canonical JSON form so
// that the model schema (names, required parameters) is enforced in one place.
BernsteinModel model_from_flags(const std::string& name, std::optional<double> s,
                                std::optional<double> sigma_min,
                                std::optional<double> delta) {
  Json j{{"type", name}};
  if (s) j["s"] = *s;
  if (sigma_min) j["sigma_min"] = *sigma_min;
  if (delta) j["delta"] = *delta;
  return model_from_json(j, "model");
}

void emit_json(const Json& j, std::ostream& out, const std::string& out_path) {
  out << j.dump() << '\n';
  if (!out_path.empty()) write_file(out_path, j.dump(2) + "\n");
}

Box window_from_values(const std::vector<double>& values) {
  if (values.empty() || values.size() % 2 != 0)
    throw Error(Errc::SchemaError,
                "--window expects lo,hi pairs (one pair per axis)");
  Vec corner, sides;
  for (std::size_t j = 0; j + 1 < values.size(); j += 2) {
    if (!(values[j] < values[j + 1]))
      throw Error(Errc::SchemaError, "--window bounds must satisfy lo < hi");
    corner.push_back(values[j]);
    sides.push_back(values[j + 1] - values[j]);
  }
  return Box{std::move(corner), std::move(sides)};
}

// ---------------------------------------------------------------------------
// Subcommand argument bundles
// ---------------------------------------------------------------------------

struct CoveringArgs {
  std::string domain_path;
  double rho = 0.0;
  std::vector<double> window;
  std::string out_path;
  bool validate = false;
};

struct ThicknessArgs {
  std::string config_path;
  double rho = 0.0;
  std::string out_path;
};

struct ConstantArgs {
  double kappa = 1.0;
  int d = 1;
  std::vector<double> l;
  double gamma = 1.0;
  double eta = 1.0;
  double rho = 1.0;
  std::string model = "pure-laplacian";
  double lambda = 0.0;
  std::optional<double> s, sigma_min, delta;
  std::string out_path;
};

struct BernsteinArgs {
  std::string function_path;
  std::string model = "pure-laplacian";
  double lambda = 0.0;
  int m_max = 8;
  std::optional<double> s, sigma_min, delta;
  std::string out_path;
};

struct LsTestArgs {
  std::string config_path;
  int trials = 100;
  std::uint64_t seed = 0;
  int m_max = 8;
  std::string out_path;
};

struct OptimalityArgs {
  int alpha = 2;
  double gamma = 0.0;
  bool skip_fourier = false;
  std::string out_path;
};

struct RemezArgs {
  int random = 0;
  std::uint64_t seed = 0;
  std::string poly_path;
  std::string set_path;
  int grid = 4096;
  std::string out_path;
};

// ---------------------------------------------------------------------------
// Subcommand handlers
// ---------------------------------------------------------------------------

int run_covering(const CoveringArgs& args, std::ostream& out) {
  const ConfigDoc doc = load_config_doc(args.domain_path);
  if (!doc.domain)
    throw Error(Errc::SchemaError, "$.domain: required for the covering command");
  std::optional<Box> window;
  if (!args.window.empty()) window = window_from_values(args.window);

  const Covering cov = build_covering(*doc.domain, args.rho, window);
  write_file(args.out_path, covering_to_json(cov).dump(2) + "\n");

  out << "covering: " << cov.elements.size() << " elements, kappa=" << cov.kappa
      << ", rho=" << cov.rho << ", eta=" << cov.eta;
  if (!args.validate) {
    out << " -> " << args.out_path << '\n';
    return kExitPass;
  }
  const CoveringReport report = validate_covering(cov, *doc.domain, window, doc.spec);
  out << ", validate " << (report.pass ? "pass" : "FAIL")
      << " (uncovered=" << format_g17(report.uncovered_fraction)
      << ", max_overlap=" << format_g17(report.max_overlap_measured) << ") -> "
      << args.out_path << '\n';
  return report.pass ? kExitPass : kExitViolation;
}

int run_thickness(const ThicknessArgs& args, std::ostream& out) {
  const ConfigDoc doc = load_config_doc(args.config_path);
  if (!doc.domain) throw Error(Errc::SchemaError, "$.domain: required");
  if (!doc.omega) throw Error(Errc::SchemaError, "$.thick_set: required");

  const ThicknessResult t = thickness_of(*doc.domain, *doc.omega, args.rho, doc.spec);
  Json j{{"gamma", t.gamma},
         {"rho", t.rho},
         {"thick", t.thick},
         {"exact", t.exact},
         {"witness_x", t.witness_x}};
  emit_json(j, out, args.out_path);
  return t.thick ? kExitPass : kExitViolation;
}

int run_constant(const ConstantArgs& args, std::ostream& out) {
  if (!(args.gamma > 0.0 && args.gamma <= 1.0))
    throw Error(Errc::SchemaError, "gamma must lie in (0,1]");
  if (static_cast<int>(args.l.size()) != args.d)
    throw Error(Errc::SchemaError, "--l must list exactly d side lengths");

  const BernsteinModel model = resolve_model(
      model_from_flags(args.model, args.s, args.sigma_min, args.delta), args.l);
  const double log_h_value = log_h(model, args.l, args.lambda);

  LSConstantInput input;
  input.kappa = args.kappa;
  input.d = args.d;
  input.l = args.l;
  input.gamma = args.gamma;
  input.eta = args.eta;
  input.rho = args.rho;
  input.log_h = log_h_value;
  const LSConstantResult result = theorem_constant(input);

  Json j{{"log_base", result.log_base},
         {"exponent", result.exponent},
         {"log_value", result.log_value},
         {"log_h", log_h_value}};
  if (result.value) j["value"] = *result.value;
  emit_json(j, out, args.out_path);
  return kExitPass;
}

int run_bernstein(const BernsteinArgs& args, std::ostream& out) {
  if (args.m_max < 0) throw Error(Errc::SchemaError, "--m-max must be >= 0");
  const SpectralFunction f = spectral_from_json(load_json(args.function_path), "$");
  const BernsteinModel model =
      model_from_flags(args.model, args.s, args.sigma_min, args.delta);
  if (const auto* h = std::get_if<HarmonicOscillator>(&model); h && !h->delta)
    throw Error(Errc::SchemaError,
                "harmonic-oscillator needs an explicit --delta here (no covering "
                "side lengths to derive the canonical choice from)");

  const QuadratureSpec spec;
  const double total = norm_sq(f);
  const double log_total = std::log(total);

  Json rows = Json::array();
  bool all_hold = true;
  for (int m = 0; m <= args.m_max; ++m) {
    const BernsteinSumResult sum = bernstein_sum(f, m, std::nullopt, spec);
    const CbValue cb = c_b(model, m, args.lambda);
    const double log_bound = cb.log_value - std::lgamma(m + 1.0) + log_total;
    const bool holds = std::log(sum.value) <= log_bound + std::log1p(1e-6);
    all_hold = all_hold && holds;

    Json row{{"m", m}, {"sum", sum.value}, {"holds", holds}};
    if (std::isfinite(log_bound)) row["log_bound"] = log_bound;
    if (sum.spectral_value) row["spectral_value"] = *sum.spectral_value;
    rows.push_back(row);
  }

  Json j{{"lambda", args.lambda},
         {"m_max", args.m_max},
         {"norm_sq", total},
         {"rows", rows}};
  if (!args.out_path.empty()) write_file(args.out_path, j.dump(2) + "\n");
  out << "bernstein-verify: m<=" << args.m_max << ' '
      << (all_hold ? "all hold" : "VIOLATION") << ", norm_sq=" << format_g17(total)
      << '\n';
  return all_hold ? kExitPass : kExitViolation;
}

int run_ls_test(const LsTestArgs& args, std::ostream& out) {
  LsExperimentInput input = parse_ls_test_config(load_json(args.config_path), "$");
  input.trials = args.trials;
  input.seed = args.seed;
  input.m_max = args.m_max;

  const ExperimentReport report = ls_empirical(input);
  write_file(args.out_path, experiment_csv(report));

  out << "ls-test: trials=" << report.rows.size() << ", pass_count="
      << report.pass_count << ", min_slack_log=" << format_g17(report.min_slack_log)
      << ", gamma=" << format_g17(report.gamma)
      << ", const_log=" << format_g17(report.const_log) << " -> " << args.out_path
      << '\n';
  return report.pass ? kExitPass : kExitViolation;
}

int run_optimality(const OptimalityArgs& args, std::ostream& out) {
  if (args.alpha < 2)
    throw Error(Errc::SchemaError, "alpha must be an integer >= 2");
  if (!(args.gamma > 0.0 && args.gamma < 1.0))
    throw Error(Errc::SchemaError, "gamma must lie in (0,1)");

  const QuadratureSpec spec;
  const OptimalityResult r =
      optimality_example(args.alpha, args.gamma, spec, !args.skip_fourier);

  Json j{{"alpha", r.alpha},
         {"gamma", r.gamma},
         {"norm_sq_omega", r.norm_sq_omega},
         {"norm_sq_full", r.norm_sq_full},
         {"bound", r.bound},
         {"bound_holds", r.bound_holds},
         {"norm_at_least_one", r.norm_at_least_one}};
  if (r.fourier_leak) {
    j["fourier_leak"] = *r.fourier_leak;
    j["fourier_ok"] = r.fourier_ok;
  }
  emit_json(j, out, args.out_path);

  const bool pass =
      r.bound_holds && r.norm_at_least_one && (!r.fourier_leak || r.fourier_ok);
  return pass ? kExitPass : kExitViolation;
}

Json remez_to_json(const RemezResult& r) {
  Json j{{"lhs", r.lhs},
         {"rhs_log", r.rhs_log},
         {"m_phi", r.m_phi},
         {"measure_e", r.measure_e},
         {"holds", r.holds}};
  if (std::isfinite(r.rhs)) j["rhs"] = r.rhs;
  return j;
}

int run_remez(const RemezArgs& args, std::ostream& out) {
  const bool file_mode = !args.poly_path.empty() || !args.set_path.empty();
  if (args.random > 0 && file_mode)
    throw Error(Errc::SchemaError, "--random and --poly/--set are mutually exclusive");
  if (args.random <= 0 && !file_mode)
    throw Error(Errc::SchemaError, "either --random N or --poly/--set is required");

  if (file_mode) {
    if (args.poly_path.empty() || args.set_path.empty())
      throw Error(Errc::SchemaError, "--poly and --set must be given together");

    const Json pj = load_json(args.poly_path);
    if (!pj.is_object()) throw Error(Errc::SchemaError, "$: expected an object");
    reject_unknown_keys(pj, {"coeffs"}, "$");
    const Json& cj = require_field(pj, "coeffs", "$");
    if (!cj.is_array() || cj.empty())
      throw Error(Errc::SchemaError, "$.coeffs: expected a nonempty array");
    std::vector<Cplx> coeffs;
    for (std::size_t i = 0; i < cj.size(); ++i) {
      const std::string at = "$.coeffs[" + std::to_string(i) + "]";
      const Json& entry = cj[i];
      if (!entry.is_array() || entry.size() != 2)
        throw Error(Errc::SchemaError, at + ": expected [re, im]");
      coeffs.emplace_back(number_field(entry[0], at + "[0]"),
                          number_field(entry[1], at + "[1]"));
    }

    const Json sj = load_json(args.set_path);
    if (!sj.is_object()) throw Error(Errc::SchemaError, "$: expected an object");
    reject_unknown_keys(sj, {"intervals"}, "$");
    const Json& ij = require_field(sj, "intervals", "$");
    if (!ij.is_array() || ij.empty())
      throw Error(Errc::SchemaError, "$.intervals: expected a nonempty array");
    std::vector<std::array<double, 2>> set_e;
    for (std::size_t i = 0; i < ij.size(); ++i) {
      const std::string at = "$.intervals[" + std::to_string(i) + "]";
      const Json& entry = ij[i];
      if (!entry.is_array() || entry.size() != 2)
        throw Error(Errc::SchemaError, at + ": expected [a, b]");
      set_e.push_back({number_field(entry[0], at + "[0]"),
                       number_field(entry[1], at + "[1]")});
    }

    const RemezResult r = remez_check(coeffs, set_e, args.grid);
    emit_json(remez_to_json(r), out, args.out_path);
    return r.holds ? kExitPass : kExitViolation;
  }

  Rng rng(args.seed);
  int held = 0;
  double min_slack = kInf;
  for (int i = 0; i < args.random; ++i) {
    const int degree = 1 + static_cast<int>(rng.uniform() * 10.0);
    std::vector<Cplx> coeffs;
    for (int k = 0; k <= degree; ++k) coeffs.push_back(rng.complex_normal());
    if (std::abs(coeffs[0]) < 1e-8) coeffs[0] = Cplx(1.0, 0.0);
    for (std::size_t k = coeffs.size(); k-- > 0;) coeffs[k] /= coeffs[0];
    const double a = 0.4 * rng.uniform();
    const double b = 0.52 + 0.35 * rng.uniform();
    const RemezResult r =
        remez_check(coeffs, {{a, a + 0.12}, {b, b + 0.12}}, args.grid);
    if (r.holds) ++held;
    min_slack = std::min(min_slack, r.rhs_log - std::log(r.lhs));
  }
  out << "remez: " << held << '/' << args.random
      << " random instances hold, min_log_slack=" << format_g17(min_slack) << '\n';
  return held == args.random ? kExitPass : kExitViolation;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration parsing and dispatch
// ---------------------------------------------------------------------------

LsExperimentInput parse_ls_test_config(const Json& j, const std::string& path) {
  if (!j.is_object()) throw Error(Errc::SchemaError, path + ": expected an object");
  reject_unknown_keys(
      j, {"domain", "thick_set", "bc", "model", "lambda", "rho", "quadrature"}, path);

  LsExperimentInput input;
  input.domain = domain_from_json(require_field(j, "domain", path), path + ".domain");
  input.omega =
      thickset_from_json(require_field(j, "thick_set", path), path + ".thick_set");

  const std::string bc_path = path + ".bc";
  const std::string bc = string_field(require_field(j, "bc", path), bc_path);
  if (bc == "dirichlet") {
    input.bc = BoundaryCondition::Dirichlet;
  } else if (bc == "neumann") {
    input.bc = BoundaryCondition::Neumann;
  } else {
    throw Error(Errc::SchemaError,
                bc_path + ": expected \"dirichlet\" or \"neumann\"");
  }

  input.model = model_from_json(require_field(j, "model", path), path + ".model");
  input.lambda = number_field(require_field(j, "lambda", path), path + ".lambda");
  if (!(input.lambda >= 0.0))
    throw Error(Errc::SchemaError, path + ".lambda: must be nonnegative");
  input.rho = number_field(require_field(j, "rho", path), path + ".rho");
  if (!(input.rho > 0.0))
    throw Error(Errc::SchemaError, path + ".rho: must be positive");
  if (j.contains("quadrature"))
    input.spec = quadrature_from_json(j["quadrature"], path + ".quadrature");
  return input;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"numerical verification of spectral inequalities on thick sets"};
  app.name("lsverify");
  app.require_subcommand(1);

  CoveringArgs covering_args;
  CLI::App* covering_cmd =
      app.add_subcommand("covering", "build the reference covering of a domain");
  covering_cmd
      ->add_option("--domain", covering_args.domain_path,
                   "JSON config file with a \"domain\" entry")
      ->required();
  covering_cmd->add_option("--rho", covering_args.rho, "inscribed cube side")
      ->required();
  covering_cmd
      ->add_option("--window", covering_args.window,
                   "lo,hi per axis (required for unbounded domains)")
      ->delimiter(',');
  covering_cmd->add_option("--out", covering_args.out_path, "output covering JSON")
      ->required();
  covering_cmd->add_flag("--validate", covering_args.validate,
                         "run coverage/overlap/eta validation");

  ThicknessArgs thickness_args;
  CLI::App* thickness_cmd = app.add_subcommand(
      "thickness", "measure the density of a thick set at scale rho");
  thickness_cmd
      ->add_option("--config", thickness_args.config_path,
                   "JSON config file with \"domain\" and \"thick_set\"")
      ->required();
  thickness_cmd->add_option("--rho", thickness_args.rho, "cube side")->required();
  thickness_cmd->add_option("--out", thickness_args.out_path, "output JSON");

  ConstantArgs constant_args;
  CLI::App* constant_cmd =
      app.add_subcommand("constant", "evaluate the spectral-inequality constant");
  constant_cmd->add_option("--kappa", constant_args.kappa, "covering overlap bound")
      ->required();
  constant_cmd->add_option("--d", constant_args.d, "dimension")->required();
  constant_cmd->add_option("--l", constant_args.l, "covering side lengths l1,l2,...")
      ->delimiter(',')
      ->required();
  constant_cmd->add_option("--gamma", constant_args.gamma, "thickness density")
      ->required();
  constant_cmd->add_option("--eta", constant_args.eta, "covering eccentricity")
      ->required();
  constant_cmd->add_option("--rho", constant_args.rho, "covering scale")->required();
  constant_cmd->add_option("--model", constant_args.model, "Bernstein model name");
  constant_cmd->add_option("--lambda", constant_args.lambda, "spectral threshold")
      ->required();
  constant_cmd->add_option("--s", constant_args.s, "fractional power");
  constant_cmd->add_option("--sigma-min", constant_args.sigma_min,
                           "smallest diffusion coefficient");
  constant_cmd->add_option("--delta", constant_args.delta,
                           "harmonic-oscillator parameter");
  constant_cmd->add_option("--out", constant_args.out_path, "output JSON");

  BernsteinArgs bernstein_args;
  CLI::App* bernstein_cmd = app.add_subcommand(
      "bernstein-verify", "check the Bernstein sums of a spectral function");
  bernstein_cmd
      ->add_option("--function", bernstein_args.function_path,
                   "spectral function JSON file")
      ->required();
  bernstein_cmd->add_option("--model", bernstein_args.model, "Bernstein model name");
  bernstein_cmd->add_option("--lambda", bernstein_args.lambda, "spectral threshold")
      ->required();
  bernstein_cmd->add_option("--m-max", bernstein_args.m_max, "largest order");
  bernstein_cmd->add_option("--s", bernstein_args.s, "fractional power");
  bernstein_cmd->add_option("--sigma-min", bernstein_args.sigma_min,
                            "smallest diffusion coefficient");
  bernstein_cmd->add_option("--delta", bernstein_args.delta,
                            "harmonic-oscillator parameter");
  bernstein_cmd->add_option("--out", bernstein_args.out_path, "output JSON");

  LsTestArgs ls_test_args;
  CLI::App* ls_test_cmd =
      app.add_subcommand("ls-test", "run the spectral-inequality experiment");
  ls_test_cmd->add_option("--config", ls_test_args.config_path, "experiment JSON")
      ->required();
  ls_test_cmd->add_option("--trials", ls_test_args.trials, "number of trials");
  ls_test_cmd->add_option("--seed", ls_test_args.seed, "base seed");
  ls_test_cmd->add_option("--m-max", ls_test_args.m_max,
                          "orders for the goodness classification");
  ls_test_cmd->add_option("--out", ls_test_args.out_path, "output CSV")->required();

  OptimalityArgs optimality_args;
  CLI::App* optimality_cmd = app.add_subcommand(
      "optimality", "evaluate the band-limited optimality example");
  optimality_cmd->add_option("--alpha", optimality_args.alpha, "power, integer >= 2")
      ->required();
  optimality_cmd->add_option("--gamma", optimality_args.gamma, "density in (0,1)")
      ->required();
  optimality_cmd->add_flag("--skip-fourier", optimality_args.skip_fourier,
                           "skip the Fourier support check");
  optimality_cmd->add_option("--out", optimality_args.out_path, "output JSON");

  RemezArgs remez_args;
  CLI::App* remez_cmd =
      app.add_subcommand("remez", "run the polynomial growth check");
  remez_cmd->add_option("--random", remez_args.random, "number of random instances");
  remez_cmd->add_option("--seed", remez_args.seed, "seed for --random");
  remez_cmd->add_option("--poly", remez_args.poly_path,
                        "polynomial JSON {\"coeffs\": [[re,im],...]}");
  remez_cmd->add_option("--set", remez_args.set_path,
                        "set JSON {\"intervals\": [[a,b],...]}");
  remez_cmd->add_option("--grid", remez_args.grid, "grid resolution");
  remez_cmd->add_option("--out", remez_args.out_path, "output JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (covering_cmd->parsed()) return run_covering(covering_args, out);
    if (thickness_cmd->parsed()) return run_thickness(thickness_args, out);
    if (constant_cmd->parsed()) return run_constant(constant_args, out);
    if (bernstein_cmd->parsed()) return run_bernstein(bernstein_args, out);
    if (ls_test_cmd->parsed()) return run_ls_test(ls_test_args, out);
    if (optimality_cmd->parsed()) return run_optimality(optimality_args, out);
    if (remez_cmd->parsed()) return run_remez(remez_args, out);
    err << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace lsv
