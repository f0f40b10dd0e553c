#pragma once

#include "anosov/cohomology.hpp"
#include "anosov/cones.hpp"
#include "anosov/return_maps.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace anosov {

enum class PerturbationKind { None, Additive, Conjugated };

std::string_view to_string(PerturbationKind k);
PerturbationKind parse_perturbation_kind(std::string_view s);  // "none", "additive", "conjugated"

struct ExperimentConfig {
  IMat3 matrix = IMat3::Zero();
  PerturbationKind kind = PerturbationKind::None;
  std::vector<TrigTerm> modes;  // f = L + eps u, or phi = id + eps psi
  double epsilon = 0.0;
  int N = 64;
  double conjugacy_tol = 1e-8;
  int max_sweeps = 500;
  double obstruction_tol = 1e-6;
  int n_max = 0;                   // 0: largest n with |det(L^n - I)| <= period_count_cap
  std::int64_t period_count_cap = 100000;
  int cone_grid = 8;
  int band = 32;
  int M = 72;
  double leaf_radius = 1.0;
  int held_out = 16;
  Vec2 x0 = Vec2(0.3, 0.6);
  std::string output_dir = "out";
  std::uint64_t seed = 1;

  bool operator==(const ExperimentConfig&) const = default;
};

std::string config_to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const std::string& text);

/// Stage order; the numeric tag + 1 is the process exit code on failure.
enum class Stage {
  Normalize = 1,
  Perturb,
  Conjugacy,
  Periodic,
  Foliations,
  ReturnMaps,
  Cohomology,
  Reconstruction,
};

std::string_view to_string(Stage s);
inline int exit_code(Stage s) { return int(s) + 1; }
inline constexpr int kConfigExitCode = 1;

struct StageRecord {
  Stage stage = Stage::Normalize;
  std::string status = "skipped";  // ok | error | skipped
  std::string error_code;
  std::string message;
  double seconds = 0.0;
  std::vector<std::pair<std::string, double>> metrics;
};

struct ProbeRecord {
  std::string label;
  HolderFit fit;
};

struct WProfileSample {
  double r = 0.0;
  ReturnMapSample sample;
};

struct PipelineReport {
  std::vector<StageRecord> stages;
  std::optional<Stage> failed;
  std::vector<ObstructionEntry> obstruction;
  std::vector<ProbeRecord> probes;
  std::vector<WProfileSample> profile;
  std::optional<Reconstruction> reconstruction;

  int exit_code() const { return failed ? anosov::exit_code(*failed) : 0; }
  const StageRecord* stage(Stage s) const;
  /// Metric value or NaN.
  double metric(Stage s, const std::string& name) const;
};

/// Runs every stage in dependency order; a failing stage is recorded with its
/// error code and the remaining stages are marked skipped.
PipelineReport run_pipeline(const ExperimentConfig& config);

/// Writes the per-figure CSV/JSON bundle into dir. Wall-clock times go to
/// timings.csv only, so every other file is reproducible byte for byte.
void emit_plot_data(const PipelineReport& report, const std::filesystem::path& dir);

/// Map built from a config (stage Perturb without the cone check).
std::shared_ptr<TorusMap> build_map(const ExperimentConfig& config, const LatticeAutomorphism& L);

}  // namespace anosov
