#include "anosov/pipeline.hpp"

#include "anosov/density.hpp"
#include "anosov/io.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <random>

namespace anosov {

using nlohmann::json;

std::string_view to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::None: return "none";
    case PerturbationKind::Additive: return "additive";
    case PerturbationKind::Conjugated: return "conjugated";
  }
  return "none";
}

PerturbationKind parse_perturbation_kind(std::string_view s) {
  if (s == "none") return PerturbationKind::None;
  if (s == "additive") return PerturbationKind::Additive;
  if (s == "conjugated") return PerturbationKind::Conjugated;
  throw Error(ErrorCode::InvalidConfig, "unknown perturbation kind '" + std::string(s) + "'");
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Normalize: return "normalize";
    case Stage::Perturb: return "perturb";
    case Stage::Conjugacy: return "conjugacy";
    case Stage::Periodic: return "periodic";
    case Stage::Foliations: return "foliations";
    case Stage::ReturnMaps: return "return_maps";
    case Stage::Cohomology: return "cohomology";
    case Stage::Reconstruction: return "wu_reconstruction";
  }
  return "unknown";
}

std::string config_to_json(const ExperimentConfig& c) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) rows.push_back({c.matrix(i, 0), c.matrix(i, 1), c.matrix(i, 2)});
  const json modes = json::parse(io::field_to_json(TrigPolynomialField(c.modes)));
  json j{{"matrix", rows},
         {"perturbation",
          {{"kind", std::string(to_string(c.kind))}, {"epsilon", c.epsilon}, {"modes", modes}}},
         {"N", c.N},
         {"conjugacy_tol", c.conjugacy_tol},
         {"max_sweeps", c.max_sweeps},
         {"obstruction_tol", c.obstruction_tol},
         {"n_max", c.n_max},
         {"period_count_cap", c.period_count_cap},
         {"cone_grid", c.cone_grid},
         {"band", c.band},
         {"M", c.M},
         {"leaf_radius", c.leaf_radius},
         {"held_out", c.held_out},
         {"x0", {c.x0[0], c.x0[1]}},
         {"output_dir", c.output_dir},
         {"seed", c.seed}};
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
  }
  ExperimentConfig c;
  try {
    c.matrix = io::integer_matrix_from_json(j.at("matrix").dump());
    if (j.contains("perturbation")) {
      const json& p = j.at("perturbation");
      c.kind = parse_perturbation_kind(p.value("kind", "none"));
      c.epsilon = p.value("epsilon", 0.0);
      if (p.contains("modes")) c.modes = io::field_from_json(p.at("modes").dump()).terms();
    }
    c.N = j.value("N", c.N);
    c.conjugacy_tol = j.value("conjugacy_tol", c.conjugacy_tol);
    c.max_sweeps = j.value("max_sweeps", c.max_sweeps);
    c.obstruction_tol = j.value("obstruction_tol", c.obstruction_tol);
    c.n_max = j.value("n_max", c.n_max);
    c.period_count_cap = j.value("period_count_cap", c.period_count_cap);
    c.cone_grid = j.value("cone_grid", c.cone_grid);
    c.band = j.value("band", c.band);
    c.M = j.value("M", c.M);
    c.leaf_radius = j.value("leaf_radius", c.leaf_radius);
    c.held_out = j.value("held_out", c.held_out);
    if (j.contains("x0")) {
      const auto x0 = j.at("x0").get<std::array<double, 2>>();
      c.x0 = Vec2(x0[0], x0[1]);
    }
    c.output_dir = j.value("output_dir", c.output_dir);
    c.seed = j.value("seed", c.seed);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
  }
  if (c.N < 4 || (c.N & (c.N - 1)) != 0)
    throw Error(ErrorCode::InvalidConfig, "N must be a power of two >= 4");
  if (c.M < 8 || c.band < 1 || 2 * c.band >= c.M)
    throw Error(ErrorCode::InvalidConfig, "need M >= 8 and 2 band < M");
  if (c.kind != PerturbationKind::None && c.modes.empty())
    throw Error(ErrorCode::InvalidConfig, "perturbation kind needs at least one mode");
  return c;
}

const StageRecord* PipelineReport::stage(Stage s) const {
  for (const auto& r : stages)
    if (r.stage == s) return &r;
  return nullptr;
}

double PipelineReport::metric(Stage s, const std::string& name) const {
  if (const StageRecord* r = stage(s))
    for (const auto& [k, v] : r->metrics)
      if (k == name) return v;
  return std::numeric_limits<double>::quiet_NaN();
}

std::shared_ptr<TorusMap> build_map(const ExperimentConfig& config, const LatticeAutomorphism& L) {
  const TrigPolynomialField field = TrigPolynomialField(config.modes).scaled(config.epsilon);
  switch (config.kind) {
    case PerturbationKind::None:
      return std::make_shared<PerturbedMap>(L, TrigPolynomialField{});
    case PerturbationKind::Additive:
      return std::make_shared<PerturbedMap>(L, field);
    case PerturbationKind::Conjugated:
      return make_conjugated_perturbation(L, field);
  }
  return nullptr;
}

namespace {

double max_angle_defect(const TorusMap& f, const Splitting& split, Bundle b,
                        const std::vector<Vec3>& pts) {
  double worst = 0.0;
  for (const Vec3& x : pts) {
    const Vec3 e = direction_at(f, split, x, b);
    const Vec3 img = (f.differential(x) * e).normalized();
    const Vec3 at = direction_at(f, split, f.evaluate(x), b);
    worst = std::max(worst, img.cross(at).norm());
  }
  return worst;
}

}  // namespace

PipelineReport run_pipeline(const ExperimentConfig& config) {
  PipelineReport rep;
  for (int s = int(Stage::Normalize); s <= int(Stage::Reconstruction); ++s) {
    StageRecord r;
    r.stage = Stage(s);
    rep.stages.push_back(std::move(r));
  }

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);

  std::optional<LatticeAutomorphism> L;
  std::optional<Splitting> split;
  std::shared_ptr<TorusMap> f;
  std::optional<ConjugacyResult> h;
  std::optional<ObstructionReport> obstruction;

  auto run = [&](Stage s, auto&& body) {
    StageRecord& rec = rep.stages[std::size_t(int(s) - 1)];
    if (rep.failed) return;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body(rec.metrics);
      rec.status = "ok";
    } catch (const Error& e) {
      rec.status = "error";
      rec.error_code = std::string(to_string(e.code()));
      rec.message = e.detail();
      rep.failed = s;
    } catch (const std::exception& e) {
      rec.status = "error";
      rec.error_code = "Internal";
      rec.message = e.what();
      rep.failed = s;
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  run(Stage::Normalize, [&](auto& m) {
    const LatticeAutomorphism raw(config.matrix);
    const Normalization n = normalize_spectrum(raw);
    L = n.matrix;
    split = splitting(*L);
    const DiophantineCertificate cert = diophantine_constant(split->beta(), 200);
    const CriticalRegularity kr = critical_regularity(split->lambda2, split->lambda3);
    m.push_back({"power", double(n.power)});
    m.push_back({"lambda1", split->lambda1});
    m.push_back({"lambda2", split->lambda2});
    m.push_back({"lambda3", split->lambda3});
    m.push_back({"beta1", split->beta()[0]});
    m.push_back({"beta2", split->beta()[1]});
    m.push_back({"diophantine_c", cert.constant_c});
    m.push_back({"kappa", double(kr.kappa)});
  });

  run(Stage::Perturb, [&](auto& m) {
    f = build_map(config, *L);
    m.push_back({"c1_distance", sampled_c1_distance(*f, 8)});
    const ConeReport cones = verify_fine_splitting(*f, *split, config.cone_grid);
    m.push_back({"cone_margin", cones.invariance_margin});
    m.push_back({"lambda_s", cones.lambda_s});
    m.push_back({"lambda_wu_min", cones.lambda_wu_min});
    m.push_back({"lambda_wu_max", cones.lambda_wu_max});
    m.push_back({"lambda_uu", cones.lambda_uu});
  });

  run(Stage::Conjugacy, [&](auto& m) {
    ConjugacyOptions opts;
    opts.N = config.N;
    opts.tol = config.conjugacy_tol;
    opts.max_sweeps = config.max_sweeps;
    opts.seed = config.seed;
    h = solve_conjugacy(*f, *split, opts);
    m.push_back({"residual", h->residual});
    m.push_back({"offgrid_residual", h->offgrid_residual});
    m.push_back({"inverse_error", h->inverse_error});
    m.push_back({"iterations", double(h->iterations)});
    if (config.kind == PerturbationKind::Conjugated) {
      const auto& phi = static_cast<const ConjugatedMap&>(*f).phi();
      double err = 0.0;
      for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j)
          for (int k = 0; k < 16; ++k) {
            const Vec3 x((i + 0.5) / 16, (j + 0.5) / 16, (k + 0.5) / 16);
            err = std::max(err, (h->h(x) - phi(x)).norm());
          }
      m.push_back({"h_minus_phi", err});
    }
  });

  run(Stage::Periodic, [&](auto& m) {
    const int n_max =
        config.n_max > 0 ? config.n_max : period_cap(*L, config.period_count_cap);
    obstruction = obstruction_report(*f, *split, n_max, config.obstruction_tol);
    rep.obstruction = obstruction->entries;
    m.push_back({"n_max", double(n_max)});
    m.push_back({"orbits", double(obstruction->entries.size())});
    m.push_back({"max_deviation", obstruction->max_deviation});
    m.push_back({"verdict", obstruction->verdict ? 1.0 : 0.0});
  });

  run(Stage::Foliations, [&](auto& m) {
    std::vector<Vec3> pts(6);
    for (auto& p : pts) p = Vec3(U(rng), U(rng), U(rng));
    double equiv = 0.0;
    for (Bundle b : {Bundle::Stable, Bundle::WeakUnstable, Bundle::StrongUnstable})
      equiv = std::max(equiv, max_angle_defect(*f, *split, b, pts));
    m.push_back({"direction_equivariance", equiv});

    double dens = 0.0;
    for (Bundle b : {Bundle::StrongUnstable, Bundle::Stable}) {
      const LeafCurve leaf = grow_leaf(*f, *split, pts[0], b, 0.5);
      const Vec3 y = leaf.at(0.37);
      dens = std::max(dens, density_cocycle_residual(*f, *split, b, pts[0], y));
    }
    m.push_back({"density_cocycle", dens});

    const DecayReport ds = verify_foliation_preservation(*h, *f, *split, pts[1], Bundle::Stable);
    const DecayReport du =
        verify_foliation_preservation(*h, *f, *split, pts[1], Bundle::StrongUnstable);
    m.push_back({"stable_decay_rate", ds.rate});
    m.push_back({"uu_decay_rate", du.rate});

    // Regularity of h at the fixed point 0 along the weak and strong directions.
    const auto map = [&](const Vec3& x) { return x + refined_displacement(*h, *f, *split, x); };
    const auto scales = log_scales(1e-5, 1e-2, 10);
    for (Bundle b : {Bundle::WeakUnstable, Bundle::StrongUnstable}) {
      ProbeRecord pr{std::string("h_along_") + std::string(to_string(b)),
                     regularity_probe(map, Vec3::Zero(), split->direction(b), scales)};
      m.push_back({"holder_" + std::string(to_string(b)), pr.fit.exponent});
      rep.probes.push_back(std::move(pr));
    }
  });

  run(Stage::ReturnMaps, [&](auto& m) {
    double mean_A = 0.0, conj_err = 0.0;
    const int n = std::max(1, config.held_out);
    for (int i = 0; i < n; ++i) {
      const Vec2 Y(U(rng), U(rng));
      const Vec2 x = quotient_map(*h, *f, *split, Y);
      const ReturnMapSample s = return_map_R(*f, *h, *split, x);
      mean_A += s.A / n;
      const Vec2 shifted = quotient_map(*h, *f, *split, wrap(Vec2(Y + split->beta())));
      conj_err = std::max(conj_err, torus_distance(shifted, s.R));
    }
    m.push_back({"mean_A", mean_A});
    m.push_back({"linear_A", split->uu_unit_length()});
    m.push_back({"return_conjugation_residual", conj_err});
    const EquidistanceReport eq = check_equidistance(*f, *h, *split, config.x0);
    m.push_back({"equidistance_residual", eq.residual});
  });

  run(Stage::Cohomology, [&](auto& m) {
    const LivsicReport lv = livsic_orbit_sums(*f, *split, *obstruction);
    double normalized = 0.0;
    for (const auto& e : lv.entries)
      normalized = std::max(normalized, std::abs(e.orbit_sum) / e.period);
    m.push_back({"livsic_max_per_period", normalized});
    m.push_back({"livsic_vanishes", normalized < 1e-6 ? 1.0 : 0.0});
    m.push_back({"livsic_consistent",
                 (normalized < 1e-6) == obstruction->verdict ? 1.0 : 0.0});
    if (obstruction->verdict) {
      const CoboundaryReport cb = verify_anosov_coboundary(
          *f, [&](const Vec3& y) { return uu_inverse_jacobian(*h, *f, *split, y); },
          [&](const Vec3& y) { return uu_jacobian_cocycle(*f, *split, y); }, 3);
      m.push_back({"coboundary_residual", cb.residual});
    }
  });

  run(Stage::Reconstruction, [&](auto& m) {
    ReconstructionOptions ro;
    ro.M = config.M;
    ro.band = config.band;
    ro.radius = config.leaf_radius;
    Reconstruction rec = reconstruct_phi(*f, *h, *split, config.x0, ro);
    m.push_back({"hausdorff", rec.hausdorff});
    m.push_back({"translation_residual", rec.translation_residual});
    m.push_back({"min_divisor", rec.profile.min_divisor});
    const HeldOutResiduals ho =
        held_out_residuals(*f, *h, *split, rec, config.held_out, config.seed + 1);
    m.push_back({"return_conjugation_held_out", ho.conjugation});
    m.push_back({"cohomological_held_out", ho.cohomological});
    try {
      const RegularityLoss loss = regularity_loss_estimate(rec.a_bar, rec.phi_bar);
      m.push_back({"regularity_loss", loss.loss});
    } catch (const Error&) {
      // Too few nonzero shells (e.g. the linear case): no loss to measure.
      m.push_back({"regularity_loss", std::numeric_limits<double>::quiet_NaN()});
    }
    const Vec2 w(rec.w_L[0], rec.w_L[1]);
    for (int i = 0; i <= 20; ++i) {
      const double r = -0.5 + 0.05 * i;
      const Vec2 x = quotient_map(*h, *f, *split, wrap(Vec2(rec.Y0 + r * w)));
      WProfileSample ps{r, return_map_R(*f, *h, *split, x)};
      ps.sample.a = compute_a(*f, *h, *split, x).value;
      const Vec2 Yx = quotient_inverse(*h, *split, x);
      ps.sample.phi_bar = rec.phi_bar_at(Yx);
      ps.sample.phi = ps.sample.phi_bar;
      ps.sample.a_bar = rec.a_bar.evaluate(Eigen::Vector2d(Yx));
      rep.profile.push_back(ps);
    }
    rep.reconstruction = std::move(rec);
  });

  return rep;
}

void emit_plot_data(const PipelineReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json stages = json::array();
  io::CsvWriter csv(dir / "stages.csv", {"stage", "status", "error_code", "metric", "value"});
  io::CsvWriter timings(dir / "timings.csv", {"stage", "seconds"});
  for (const StageRecord& s : report.stages) {
    json metrics = json::object();
    const std::string name(to_string(s.stage));
    for (const auto& [k, v] : s.metrics) {
      metrics[k] = v;
      csv.row(std::vector<std::string>{name, s.status, s.error_code, k, io::number(v)});
    }
    if (s.metrics.empty()) csv.row(std::vector<std::string>{name, s.status, s.error_code, "", ""});
    stages.push_back({{"stage", name},
                      {"status", s.status},
                      {"error_code", s.error_code},
                      {"message", s.message},
                      {"metrics", metrics}});
    timings.row(std::vector<std::string>{name, io::number(s.seconds)});
  }
  const json summary{{"exit_code", report.exit_code()},
                     {"failed_stage", report.failed ? std::string(to_string(*report.failed)) : ""},
                     {"stages", stages}};
  io::write_text(dir / "report.json", summary.dump(2) + "\n");

  io::CsvWriter obs(dir / "obstruction.csv",
                    {"period", "x", "y", "z", "mu1", "mu2", "mu3", "expected1", "expected2",
                     "expected3", "deviation"});
  for (const auto& e : report.obstruction) {
    const auto& o = e.orbit;
    obs.row({double(o.period), o.point[0], o.point[1], o.point[2], o.multipliers[0].real(),
             o.multipliers[1].real(), o.multipliers[2].real(), e.expected[0], e.expected[1],
             e.expected[2], e.deviation});
  }

  io::CsvWriter holder(dir / "holder_fit.csv", {"label", "scale", "increment", "exponent"});
  for (const auto& p : report.probes)
    for (std::size_t i = 0; i < p.fit.scales.size(); ++i)
      holder.row(std::vector<std::string>{p.label, io::number(p.fit.scales[i]),
                                          io::number(p.fit.increments[i]),
                                          io::number(p.fit.exponent)});

  io::CsvWriter prof(dir / "w_profile.csv",
                     {"r", "x", "y", "R_x", "R_y", "T_x", "T_y", "A", "a", "phi"});
  for (const auto& p : report.profile) {
    const auto& s = p.sample;
    prof.row({p.r, s.x[0], s.x[1], s.R[0], s.R[1], s.T[0], s.T[1], s.A, s.a, s.phi});
  }

  io::CsvWriter fourier(dir / "phi_fourier.csv", {"p1", "p2", "abs_a", "abs_phi", "divisor"});
  FourierSeries phi_bar(2);
  std::vector<Vec3> grown, rebuilt;
  std::vector<double> grown_s, rebuilt_r;
  if (const auto& rec = report.reconstruction) {
    for (const auto& e : rec->profile.entries)
      fourier.row({double(e.p[0]), double(e.p[1]), std::abs(rec->a_bar.get(e.p)),
                   std::abs(rec->phi_bar.get(e.p)), e.divisor});
    phi_bar = rec->phi_bar;
    grown = rec->grown.points;
    grown_s = rec->grown.arclength;
    rebuilt = rec->rebuilt;
    rebuilt_r = rec->params;
  }
  io::write_text(dir / "phi_bar.json", io::fourier_to_json(phi_bar) + "\n");
  io::write_polyline(dir / "leaf_grown.csv", grown, grown_s);
  io::write_polyline(dir / "leaf_rebuilt.csv", rebuilt, rebuilt_r);
}

}  // namespace anosov
