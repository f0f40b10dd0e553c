// anosov_lab: command line front end for the rigidity pipeline.
//
// Every subcommand reads a JSON experiment config (--config); scalar flags
// override single fields. Relative output directories are resolved against
// $ANOSOV_OUTPUT_ROOT when it is set.

#include "anosov/io.hpp"
#include "anosov/parallel.hpp"
#include "anosov/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <random>

using namespace anosov;
using nlohmann::json;

namespace {

struct Overrides {
  std::string config_path;
  std::string matrix;
  std::optional<int> N;
  std::optional<double> epsilon;
  std::optional<int> n_max;
  std::optional<std::uint64_t> seed;
  std::string output;
};

void add_config_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "experiment config (JSON)");
  cmd->add_option("--matrix", o.matrix, "integer matrix as JSON rows, overrides the config");
  cmd->add_option("--N", o.N, "conjugacy grid resolution");
  cmd->add_option("--epsilon", o.epsilon, "perturbation size");
  cmd->add_option("--n-max", o.n_max, "largest period examined");
  cmd->add_option("--seed", o.seed, "sampling seed");
  cmd->add_option("--output", o.output, "output directory");
}

ExperimentConfig load(const Overrides& o) {
  ExperimentConfig c;
  if (!o.config_path.empty()) {
    c = config_from_json(io::read_text(o.config_path));
  } else if (o.matrix.empty()) {
    throw Error(ErrorCode::InvalidConfig, "either --config or --matrix is required");
  }
  if (!o.matrix.empty()) c.matrix = io::integer_matrix_from_json(o.matrix);
  if (o.N) c.N = *o.N;
  if (o.epsilon) c.epsilon = *o.epsilon;
  if (o.n_max) c.n_max = *o.n_max;
  if (o.seed) c.seed = *o.seed;
  if (!o.output.empty()) c.output_dir = o.output;
  // Revalidate after overrides.
  return config_from_json(config_to_json(c));
}

std::filesystem::path output_dir(const ExperimentConfig& c) {
  std::filesystem::path p(c.output_dir);
  if (p.is_relative())
    if (const char* root = std::getenv("ANOSOV_OUTPUT_ROOT")) p = std::filesystem::path(root) / p;
  std::filesystem::create_directories(p);
  return p;
}

struct Setup {
  LatticeAutomorphism L;
  Normalization norm;
  Splitting split;
  std::shared_ptr<TorusMap> f;
};

// Runs the stages a subcommand depends on; failures exit with the stage code.
struct StageFailure {
  Stage stage;
  Error error;
};

template <typename F>
auto in_stage(Stage s, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    throw StageFailure{s, e};
  }
}

Setup setup(const ExperimentConfig& c) {
  LatticeAutomorphism raw =
      in_stage(Stage::Normalize, [&] { return LatticeAutomorphism(c.matrix); });
  Normalization n = in_stage(Stage::Normalize, [&] { return normalize_spectrum(raw); });
  Splitting sp = in_stage(Stage::Normalize, [&] { return splitting(n.matrix); });
  auto f = in_stage(Stage::Perturb, [&] { return build_map(c, n.matrix); });
  return {raw, n, sp, f};
}

ConjugacyResult solve(const ExperimentConfig& c, const Setup& s) {
  return in_stage(Stage::Conjugacy, [&] {
    ConjugacyOptions o;
    o.N = c.N;
    o.tol = c.conjugacy_tol;
    o.max_sweeps = c.max_sweeps;
    o.seed = c.seed;
    return solve_conjugacy(*s.f, s.split, o);
  });
}

json vec(const Vec3& v) { return {v[0], v[1], v[2]}; }

int cmd_spectrum(const ExperimentConfig& c) {
  const Setup s = setup(c);
  const SpectrumReport raw = spectrum(s.L);
  json ev = json::array();
  for (const auto& z : raw.eigenvalues) ev.push_back({z.real(), z.imag()});
  const DiophantineCertificate cert = diophantine_constant(s.split.beta(), 200);
  const CriticalRegularity kr = critical_regularity(s.split.lambda2, s.split.lambda3);
  const json out{{"eigenvalues", ev},
                 {"determinant", s.L.determinant()},
                 {"real_spectrum", raw.real_spectrum},
                 {"normalization_power", s.norm.power},
                 {"normalized_matrix", json::parse(io::matrix_to_json(s.norm.matrix))},
                 {"lambda", {s.split.lambda1, s.split.lambda2, s.split.lambda3}},
                 {"e_s", vec(s.split.e_s)},
                 {"e_wu", vec(s.split.e_wu)},
                 {"e_uu", vec(s.split.e_uu)},
                 {"certificate", json::parse(io::certificate_to_json(cert))},
                 {"kappa", kr.kappa},
                 {"ratio", kr.ratio}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_perturb_check(const ExperimentConfig& c, int cone_grid) {
  const Setup s = setup(c);
  const ConeReport r = in_stage(Stage::Perturb, [&] {
    return verify_fine_splitting(*s.f, s.split, cone_grid);
  });
  const json out{{"c1_distance", sampled_c1_distance(*s.f, 8)},
                 {"cone_grid", r.grid_n},
                 {"aperture", r.aperture},
                 {"invariance_margin", r.invariance_margin},
                 {"lambda_s", r.lambda_s},
                 {"lambda_wu", {r.lambda_wu_min, r.lambda_wu_max}},
                 {"lambda_uu", r.lambda_uu},
                 {"contraction", r.contraction},
                 {"C", r.constant_C}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_conjugacy(const ExperimentConfig& c) {
  const Setup s = setup(c);
  const ConjugacyResult h = solve(c, s);
  const auto dir = output_dir(c);
  io::write_conjugacy(h, dir, "conjugacy", c.conjugacy_tol);
  io::CsvWriter log(dir / "conjugacy_residuals.csv", {"sweep", "residual"});
  for (std::size_t i = 0; i < h.residual_log.size(); ++i) log.row({double(i + 1), h.residual_log[i]});
  std::cout << io::read_text(dir / "conjugacy.json");
  return 0;
}

int cmd_periodic(const ExperimentConfig& c) {
  const Setup s = setup(c);
  const int n_max = c.n_max > 0 ? c.n_max : period_cap(s.norm.matrix, c.period_count_cap);
  const ObstructionReport rep = in_stage(Stage::Periodic, [&] {
    return obstruction_report(*s.f, s.split, n_max, c.obstruction_tol);
  });
  PipelineReport pr;
  pr.obstruction = rep.entries;
  const auto dir = output_dir(c);
  io::CsvWriter csv(dir / "obstruction.csv", {"period", "x", "y", "z", "mu1", "mu2", "mu3",
                                              "expected1", "expected2", "expected3", "deviation"});
  for (const auto& e : rep.entries)
    csv.row({double(e.orbit.period), e.orbit.point[0], e.orbit.point[1], e.orbit.point[2],
             e.orbit.multipliers[0].real(), e.orbit.multipliers[1].real(),
             e.orbit.multipliers[2].real(), e.expected[0], e.expected[1], e.expected[2],
             e.deviation});
  json counts = json::array();
  for (int n = 1; n <= n_max; ++n) counts.push_back(periodic_point_count(s.norm.matrix, n));
  const json out{{"n_max", n_max},
                 {"orbits", rep.entries.size()},
                 {"periodic_point_counts", counts},
                 {"max_deviation", rep.max_deviation},
                 {"tolerance", rep.tolerance},
                 {"verdict", rep.verdict}};
  io::write_text(dir / "periodic.json", out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_cohomology(const ExperimentConfig& c, const std::string& input, double floor) {
  const Setup s = setup(c);
  const FourierSeries a = io::fourier_from_json(io::read_text(input));
  Eigen::VectorXd beta(2);
  beta << s.split.beta()[0], s.split.beta()[1];
  const TranslationSolution sol =
      in_stage(Stage::Cohomology, [&] { return solve_translation_cohomology(a, beta, floor); });
  const auto dir = output_dir(c);
  io::write_text(dir / "phi.json", io::fourier_to_json(sol.phi) + "\n");
  io::CsvWriter csv(dir / "divisor_profile.csv", {"p1", "p2", "divisor", "distance", "amplification"});
  for (const auto& e : sol.profile.entries)
    csv.row({double(e.p[0]), double(e.p[1]), e.divisor, e.distance, e.amplification});
  json out{{"modes", sol.phi.size()},
           {"min_divisor", sol.profile.min_divisor},
           {"residual", translation_residual(sol.phi, a, beta).max_abs()}};
  try {
    const RegularityLoss loss = regularity_loss_estimate(a, sol.phi);
    out["decay_a"] = loss.decay_a;
    out["decay_phi"] = loss.decay_phi;
    out["loss"] = loss.loss;
  } catch (const Error& e) {
    out["loss"] = nullptr;
    out["loss_error"] = std::string(to_string(e.code()));
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_trace(const ExperimentConfig& c, const std::vector<double>& point, const std::string& tag,
              double radius) {
  const Setup s = setup(c);
  const Bundle b = parse_bundle(tag);
  const LeafCurve leaf = in_stage(Stage::Foliations, [&] {
    return grow_leaf(*s.f, s.split, Vec3(point[0], point[1], point[2]), b, radius);
  });
  const auto dir = output_dir(c);
  const auto path = dir / ("leaf_" + tag + ".csv");
  io::write_polyline(path, leaf.points, leaf.arclength);
  std::cout << path.string() << "\n";
  return 0;
}

int cmd_rebuild(const ExperimentConfig& c) {
  const Setup s = setup(c);
  const ConjugacyResult h = solve(c, s);
  ReconstructionOptions ro;
  ro.M = c.M;
  ro.band = c.band;
  ro.radius = c.leaf_radius;
  const Reconstruction rec =
      in_stage(Stage::Reconstruction, [&] { return reconstruct_phi(*s.f, h, s.split, c.x0, ro); });
  const auto dir = output_dir(c);
  io::write_polyline(dir / "leaf_grown.csv", rec.grown.points, rec.grown.arclength);
  io::write_polyline(dir / "leaf_rebuilt.csv", rec.rebuilt, rec.params);
  io::write_text(dir / "phi_bar.json", io::fourier_to_json(rec.phi_bar) + "\n");
  io::CsvWriter samples(dir / "return_samples.csv", {"x", "y", "R_x", "R_y", "T_x", "T_y", "A", "a"});
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < c.held_out; ++i) {
    const Vec2 x(U(rng), U(rng));
    ReturnMapSample r = return_map_R(*s.f, h, s.split, x);
    r.a = compute_a(*s.f, h, s.split, x).value;
    samples.row({r.x[0], r.x[1], r.R[0], r.R[1], r.T[0], r.T[1], r.A, r.a});
  }
  const json out{{"hausdorff", rec.hausdorff},
                 {"phi_mean", rec.phi_mean},
                 {"min_divisor", rec.profile.min_divisor},
                 {"translation_residual", rec.translation_residual}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_pipeline(const ExperimentConfig& c) {
  const PipelineReport rep = run_pipeline(c);
  const auto dir = output_dir(c);
  emit_plot_data(rep, dir);
  io::write_text(dir / "config.json", config_to_json(c));
  for (const auto& st : rep.stages) {
    std::cout << to_string(st.stage) << ": " << st.status;
    if (!st.error_code.empty()) std::cout << " [" << st.error_code << "] " << st.message;
    std::cout << "\n";
    for (const auto& [k, v] : st.metrics) std::cout << "  " << k << " = " << io::number(v) << "\n";
  }
  return rep.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for local rigidity of hyperbolic 3-torus automorphisms"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker cap (0: hardware concurrency)");

  Overrides o;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "spectrum, normalization and splitting of L");
  add_config_flags(spectrum_cmd, o);

  auto* perturb = app.add_subcommand("perturb", "perturbation checks");
  perturb->require_subcommand(1);
  auto* check = perturb->add_subcommand("check", "C1 size and cone-field verification");
  add_config_flags(check, o);
  int cone_grid = 8;
  check->add_option("--grid", cone_grid, "cone check grid per axis");

  auto* conj = app.add_subcommand("conjugacy", "conjugacy solver");
  conj->require_subcommand(1);
  auto* conj_solve = conj->add_subcommand("solve", "solve h o L = f o h on the grid");
  add_config_flags(conj_solve, o);

  auto* periodic = app.add_subcommand("periodic", "periodic data");
  periodic->require_subcommand(1);
  auto* periodic_report = periodic->add_subcommand("report", "multiplier obstruction report");
  add_config_flags(periodic_report, o);

  auto* coh = app.add_subcommand("cohomology", "translation cohomological equation");
  coh->require_subcommand(1);
  auto* coh_solve = coh->add_subcommand("solve", "solve phi o T - phi = a");
  add_config_flags(coh_solve, o);
  std::string coh_input;
  double coh_floor = 1e-12;
  coh_solve->add_option("--input", coh_input, "right-hand side as Fourier series JSON")->required();
  coh_solve->add_option("--floor", coh_floor, "small-divisor floor");

  auto* fol = app.add_subcommand("foliation", "invariant foliations");
  fol->require_subcommand(1);
  auto* trace = fol->add_subcommand("trace", "grow a leaf through a point");
  add_config_flags(trace, o);
  std::vector<double> point{0.1, 0.2, 0.3};
  std::string bundle = "uu";
  double radius = 1.0;
  trace->add_option("--point", point, "base point x y z")->expected(3);
  trace->add_option("--bundle", bundle, "s, wu or uu")->check(CLI::IsMember({"s", "wu", "uu"}));
  trace->add_option("--radius", radius, "arclength on each side");
  auto* rebuild = fol->add_subcommand("rebuild-wu", "rebuild a weak unstable leaf from phi");
  add_config_flags(rebuild, o);

  auto* pipe = app.add_subcommand("pipeline", "full pipeline");
  pipe->require_subcommand(1);
  auto* pipe_run = pipe->add_subcommand("run", "run every stage and emit plot data");
  add_config_flags(pipe_run, o);

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) set_thread_count(threads);

  try {
    const ExperimentConfig c = load(o);
    if (spectrum_cmd->parsed()) return cmd_spectrum(c);
    if (check->parsed()) return cmd_perturb_check(c, cone_grid);
    if (conj_solve->parsed()) return cmd_conjugacy(c);
    if (periodic_report->parsed()) return cmd_periodic(c);
    if (coh_solve->parsed()) return cmd_cohomology(c, coh_input, coh_floor);
    if (trace->parsed()) return cmd_trace(c, point, bundle, radius);
    if (rebuild->parsed()) return cmd_rebuild(c);
    if (pipe_run->parsed()) return cmd_pipeline(c);
  } catch (const StageFailure& f) {
    std::cerr << "stage " << to_string(f.stage) << " failed [" << to_string(f.error.code())
              << "]: " << f.error.detail() << "\n";
    return exit_code(f.stage);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.detail() << "\n";
    return kConfigExitCode;
  }
  return kConfigExitCode;
}
