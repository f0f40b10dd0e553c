#include <anosov/conjugacy.hpp>
#include <anosov/fourier.hpp>
#include <anosov/periodic.hpp>

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace anosov;

const LatticeAutomorphism& base() {
  static const auto L = LatticeAutomorphism::from_rows({{{3, 0, 1}, {-1, 3, 0}, {0, -1, 0}}});
  return L;
}

const Splitting& split() {
  static const Splitting sp = splitting(base());
  return sp;
}

std::shared_ptr<TorusMap> conjugated() {
  return make_conjugated_perturbation(
      base(), TrigPolynomialField::single_mode({1, 0, 1}, Vec3(0.006, -0.0048, 0.0064)));
}

void BM_ConjugacySolve(benchmark::State& state) {
  const auto f = conjugated();
  ConjugacyOptions o;
  o.N = int(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_conjugacy(*f, split(), o).residual);
  state.SetComplexityN(state.range(0) * state.range(0) * state.range(0));
}
BENCHMARK(BM_ConjugacySolve)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_DirectionAt(benchmark::State& state) {
  const auto f = conjugated();
  const Bundle b = Bundle(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (auto _ : state) {
    const Vec3 x(U(rng), U(rng), U(rng));
    benchmark::DoNotOptimize(direction_at(*f, split(), x, b));
  }
  state.SetLabel(std::string(to_string(b)));
}
BENCHMARK(BM_DirectionAt)->DenseRange(0, 2);

void BM_TranslationSolve(benchmark::State& state) {
  const int band = int(state.range(0));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  FourierSeries a(2);
  for (int p1 = 0; p1 <= band; ++p1)
    for (int p2 = -band; p2 <= band; ++p2) {
      if (p1 * p1 + p2 * p2 > band * band || (p1 == 0 && p2 <= 0)) continue;
      const std::complex<double> c(g(rng), g(rng));
      a.set({p1, p2}, c);
      a.set({-p1, -p2}, std::conj(c));
    }
  const Eigen::Vector2d beta(split().beta()[0], split().beta()[1]);
  for (auto _ : state) benchmark::DoNotOptimize(solve_translation_cohomology(a, beta).profile.min_divisor);
  state.counters["modes"] = double(a.size());
}
BENCHMARK(BM_TranslationSolve)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_PeriodicRefine(benchmark::State& state) {
  const auto f = conjugated();
  const auto orbits = linear_orbits(base(), 3);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& o = orbits[i++ % orbits.size()];
    benchmark::DoNotOptimize(refine_periodic_point(*f, o.representative.point(), 3, o.word));
  }
}
BENCHMARK(BM_PeriodicRefine);

}  // namespace

BENCHMARK_MAIN();
