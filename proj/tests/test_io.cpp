#include "support.hpp"

#include <anosov/io.hpp>

#include <gtest/gtest.h>

#include <fstream>

namespace anosov {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(ANOSOV_TEST_SCRATCH) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(Io, NumbersRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 3.5320888862379554}) EXPECT_EQ(std::stod(io::number(v)), v);
}

TEST(Io, MatrixAndFieldRoundTrip) {
  const auto L = testing::normalized();
  EXPECT_EQ(io::matrix_from_json(io::matrix_to_json(L)), L);
  const TrigPolynomialField u({TrigTerm{{1, 0, -2}, Vec3(0.1, 1.0 / 3.0, -0.7), 0.25},
                               TrigTerm{{0, 3, 1}, Vec3(1e-9, 0, 2), 0.0}});
  EXPECT_EQ(io::field_from_json(io::field_to_json(u)), u);
}

TEST(Io, MatrixRejectsBadShape) {
  try {
    io::matrix_from_json("[[1, 0], [0, 1]]");
    FAIL() << "expected InvalidConfig";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
  }
}

TEST(Io, FourierRoundTrip) {
  FourierSeries f = FourierSeries::cosine({2, -3}, 0.3, 0.1);
  f.add({1, 1}, {1e-7, -2.0 / 7.0});
  const FourierSeries g = io::fourier_from_json(io::fourier_to_json(f));
  EXPECT_EQ(g.coefficients(), f.coefficients());
  EXPECT_EQ(g.dimension(), 2);
}

TEST(Io, ConjugacyRoundTrip) {
  const auto f = testing::conjugated_map();
  ConjugacyOptions o;
  o.N = 8;
  o.tol = 1e-6;
  const ConjugacyResult h = solve_conjugacy(*f, splitting(testing::normalized()), o);
  const fs::path dir = scratch("conjugacy");
  io::write_conjugacy(h, dir, "h", o.tol);
  EXPECT_EQ(fs::file_size(dir / "h.bin"), 2u * 3u * 8u * 8u * 8u * sizeof(double));
  const ConjugacyResult r = io::read_conjugacy(dir, "h");
  EXPECT_EQ(r.displacement.values(), h.displacement.values());
  EXPECT_EQ(r.inverse_displacement.values(), h.inverse_displacement.values());
  EXPECT_EQ(r.residual, h.residual);
}

TEST(Io, CsvRowWidthIsChecked) {
  io::CsvWriter w(scratch("csv") / "t.csv", {"a", "b"});
  w.row(std::vector<double>{1.0, 2.0});
  EXPECT_THROW(w.row(std::vector<double>{1.0}), Error);
}

TEST(Config, RoundTripAndValidation) {
  const ExperimentConfig c = testing::load_config("conjugated.json");
  EXPECT_EQ(c.kind, PerturbationKind::Conjugated);
  EXPECT_EQ(c.epsilon, 0.01);
  EXPECT_EQ(c.N, 64);
  ASSERT_EQ(c.modes.size(), 1u);
  EXPECT_EQ(config_from_json(config_to_json(c)), c);

  ExperimentConfig bad = c;
  bad.N = 48;
  EXPECT_THROW(config_from_json(config_to_json(bad)), Error);
  bad = c;
  bad.band = 40;  // 2 band must stay below M = 72
  EXPECT_THROW(config_from_json(config_to_json(bad)), Error);
  bad = c;
  bad.modes.clear();
  EXPECT_THROW(config_from_json(config_to_json(bad)), Error);
  EXPECT_THROW(config_from_json("{\"matrix\": 3}"), Error);
}

TEST(Pipeline, EmptyReportWritesHeaders) {
  const fs::path dir = scratch("empty");
  emit_plot_data(PipelineReport{}, dir);
  for (const char* name : {"stages.csv", "timings.csv", "obstruction.csv", "holder_fit.csv",
                           "w_profile.csv", "phi_fourier.csv", "leaf_grown.csv",
                           "leaf_rebuilt.csv"}) {
    const auto lines = lines_of(dir / name);
    EXPECT_EQ(lines.size(), 1u) << name;
  }
  EXPECT_TRUE(fs::exists(dir / "report.json"));
}

TEST(Pipeline, LinearRunIsCleanAndDeterministic) {
  ExperimentConfig c = testing::load_config("linear.json");
  const PipelineReport a = run_pipeline(c);
  EXPECT_EQ(a.exit_code(), 0);
  for (const auto& s : a.stages) EXPECT_EQ(s.status, "ok") << to_string(s.stage);
  EXPECT_EQ(a.metric(Stage::Normalize, "power"), -2.0);
  EXPECT_EQ(a.metric(Stage::Periodic, "orbits"), 9029.0);
  EXPECT_EQ(a.metric(Stage::Periodic, "verdict"), 1.0);
  EXPECT_LT(a.metric(Stage::Reconstruction, "hausdorff"), 1e-12);
  EXPECT_TRUE(std::isnan(a.metric(Stage::Normalize, "no_such_metric")));

  const fs::path d1 = scratch("run1"), d2 = scratch("run2");
  emit_plot_data(a, d1);
  emit_plot_data(run_pipeline(c), d2);
  for (const auto& entry : fs::directory_iterator(d1)) {
    const auto name = entry.path().filename();
    if (name == "timings.csv") continue;
    EXPECT_EQ(io::read_text(entry.path()), io::read_text(d2 / name)) << name;
  }
}

TEST(Pipeline, FailingStageSetsExitCode) {
  ExperimentConfig c = testing::load_config("linear.json");
  c.kind = PerturbationKind::Additive;
  c.epsilon = 0.4;
  c.modes = {TrigTerm{{0, 0, 1}, Vec3(0, 0, 1), 0.0}};
  const PipelineReport r = run_pipeline(c);
  ASSERT_TRUE(r.failed.has_value());
  EXPECT_EQ(*r.failed, Stage::Perturb);
  EXPECT_EQ(r.exit_code(), 3);
  EXPECT_EQ(r.stage(Stage::Perturb)->error_code, "ConeViolation");
  EXPECT_EQ(r.stage(Stage::Reconstruction)->status, "skipped");
}

TEST(Pipeline, NonUnimodularMatrixFailsInNormalize) {
  const ExperimentConfig c =
      config_from_json(R"({"matrix": [[2, 0, 0], [0, 1, 0], [0, 0, 1]]})");
  const PipelineReport r = run_pipeline(c);
  ASSERT_TRUE(r.failed.has_value());
  EXPECT_EQ(*r.failed, Stage::Normalize);
  EXPECT_EQ(r.exit_code(), 2);
  EXPECT_EQ(r.stage(Stage::Normalize)->error_code, "NotUnimodular");
}

}  // namespace
}  // namespace anosov
