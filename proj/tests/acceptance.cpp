// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.
#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

namespace anosov {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  ExperimentConfig config;
  LatticeAutomorphism L = testing::normalized();
  Splitting split;
  std::shared_ptr<TorusMap> f;
  ConjugacyResult h;
  ObstructionReport periodic;
};

Context prepare(const std::string& config_name) {
  Context c{testing::load_config(config_name)};
  c.L = normalize_spectrum(LatticeAutomorphism(c.config.matrix)).matrix;
  c.split = splitting(c.L);
  c.f = build_map(c.config, c.L);
  ConjugacyOptions o;
  o.N = c.config.N;
  o.tol = c.config.conjugacy_tol;
  o.max_sweeps = c.config.max_sweeps;
  c.h = solve_conjugacy(*c.f, c.split, o);
  c.periodic = obstruction_report(*c.f, c.split, period_cap(c.L, c.config.period_count_cap),
                                  c.config.obstruction_tol);
  return c;
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

HolderFit probe_h(const Context& c, Bundle b) {
  const auto map = [&](const Vec3& x) { return x + refined_displacement(c.h, *c.f, c.split, x); };
  return regularity_probe(map, Vec3::Zero(), c.split.direction(b), log_scales(1e-5, 1e-2, 10));
}

Outcome a1(const Context& conj) {
  const auto& phi = static_cast<const ConjugatedMap&>(*conj.f).phi();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double err = 0.0;
  for (int i = 0; i < 4000; ++i) {
    const Vec3 x(U(rng), U(rng), U(rng));
    err = std::max(err, (conj.h.h(x) - phi(x)).lpNorm<Eigen::Infinity>());
  }
  return {conj.h.residual < 1e-6 && err < 1e-4,
          fmt("residual %.3g (< 1e-6), sup|h - phi| %.3g (< 1e-4), %d sweeps", conj.h.residual, err,
              conj.h.iterations)};
}

Outcome a2() {
  const Vec2 b = splitting(testing::normalized()).beta();
  const Eigen::Vector2d beta(b[0], b[1]);
  std::mt19937_64 rng(202);
  std::normal_distribution<double> g;
  double worst = 0.0;
  int modes = 0;
  for (int trial = 0; trial < 3; ++trial) {
    FourierSeries a(2);
    for (int p1 = 0; p1 <= 64; ++p1)
      for (int p2 = -64; p2 <= 64; ++p2) {
        if (p1 * p1 + p2 * p2 > 64 * 64 || (p1 == 0 && p2 <= 0)) continue;
        const std::complex<double> c(g(rng), g(rng));
        a.set({p1, p2}, c);
        a.set({-p1, -p2}, std::conj(c));
      }
    modes = int(a.size());
    const TranslationSolution sol = solve_translation_cohomology(a, beta);
    for (const auto& [p, c] : a.coefficients()) {
      const double th = kTwoPi * (p[0] * beta[0] + p[1] * beta[1]);
      const std::complex<double> mult(std::cos(th) - 1.0, std::sin(th));
      worst = std::max(worst, std::abs(sol.phi.get(p) * mult - c));
    }
  }
  double closed = 0.0;
  for (const Frequency p : {Frequency{1, 0}, Frequency{6, -7}, Frequency{-40, 23}}) {
    const TranslationSolution sol = solve_translation_cohomology(FourierSeries::cosine(p), beta);
    const double th = kTwoPi * (p[0] * beta[0] + p[1] * beta[1]);
    for (double x1 : {0.0, 0.3, 0.71})
      for (double x2 : {0.0, 0.55}) {
        const double u = kTwoPi * (p[0] * x1 + p[1] * x2);
        const double expected = std::sin(u - 0.5 * th) / (2.0 * std::sin(0.5 * th));
        closed = std::max(closed, std::abs(sol.phi.evaluate(Eigen::Vector2d(x1, x2)) - expected) /
                                      std::max(1.0, std::abs(expected)));
      }
  }
  return {worst < 1e-12 && closed < 1e-12,
          fmt("max coefficient residual %.3g over %d modes (< 1e-12), closed form %.3g", worst,
              modes, closed)};
}

Outcome a3() {
  const Vec2 beta = splitting(testing::normalized()).beta();
  double prev = std::numeric_limits<double>::infinity();
  bool positive = true, monotone = true;
  for (int P = 1; P <= 200; ++P) {
    const double c = diophantine_constant(beta, P).constant_c;
    positive = positive && c > 0.0;
    monotone = monotone && c <= prev;
    prev = c;
  }
  // Exhaustive scan in extended precision.
  long double best = 1e300L;
  for (int p1 = -200; p1 <= 200; ++p1)
    for (int p2 = -200; p2 <= 200; ++p2) {
      const long r2 = long(p1) * p1 + long(p2) * p2;
      if (r2 == 0 || r2 > 40000) continue;
      const long double s = (long double)beta[0] * p1 + (long double)beta[1] * p2;
      best = std::min(best, r2 * std::fabs(s - std::nearbyint(s)));
    }
  const bool agrees = std::abs(double(best) - prev) < 1e-12;
  return {positive && monotone && agrees,
          fmt("c(200) = %.12g, scan %.12g, positive %d, non-increasing %d", prev, double(best),
              positive, monotone)};
}

Outcome a4() {
  bool ok = true;
  std::ostringstream os;
  for (int n = 1; n <= 6; ++n) {
    IMat3 P = IMat3::Identity();
    for (int i = 0; i < n; ++i) P = (P * testing::normalized().entries()).eval();
    P -= IMat3::Identity();
    const std::int64_t det = std::abs(
        P(0, 0) * P(1, 1) * P(2, 2) + P(0, 1) * P(1, 2) * P(2, 0) + P(0, 2) * P(1, 0) * P(2, 1) -
        P(0, 2) * P(1, 1) * P(2, 0) - P(0, 1) * P(1, 0) * P(2, 2) - P(0, 0) * P(1, 2) * P(2, 1));
    const std::size_t count = enumerate_linear_periodic(testing::normalized(), n).size();
    ok = ok && std::int64_t(count) == det;
    os << (n > 1 ? " " : "") << count;
  }
  const std::size_t fixed = enumerate_linear_periodic(testing::companion(), 1).size();
  ok = ok && fixed == 1;
  return {ok, "counts n=1..6: " + os.str() + "; companion fixed points " + std::to_string(fixed)};
}

Outcome a5() {
  const Splitting sp = splitting(testing::normalized());
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> U(0.0, 1.0), T(-0.5, 0.5);
  const PerturbedMap lin(testing::normalized(), {});
  bool linear_unit = true;
  for (int i = 0; i < 100; ++i) {
    const Bundle b = std::array{Bundle::Stable, Bundle::WeakUnstable, Bundle::StrongUnstable}[i % 3];
    const Vec3 x(U(rng), U(rng), U(rng));
    linear_unit = linear_unit &&
                  dynamical_density(lin, sp, b, x, x + T(rng) * sp.direction(b)).rho == 1.0;
  }
  double identity = 0.0, cocycle = 0.0;
  int pairs = 0;
  for (const auto& f : {testing::conjugated_map(0.01), testing::additive_map(0.01)}) {
    for (int i = 0; i < 100; ++i) {
      const Bundle b = i % 2 ? Bundle::Stable : Bundle::StrongUnstable;
      const Vec3 x(U(rng), U(rng), U(rng));
      const Vec3 y = LeafChart(*f, sp, x, b).point(T(rng));
      identity = std::max(identity, std::abs(dynamical_density(*f, sp, b, x, x).rho - 1.0));
      cocycle = std::max(cocycle, density_cocycle_residual(*f, sp, b, x, y));
      ++pairs;
    }
  }
  return {linear_unit && identity == 0.0 && cocycle < 1e-8,
          fmt("rho == 1 for L: %d; |rho_x(x) - 1| %.3g; cocycle residual %.3g over %d pairs "
              "(< 1e-8)",
              linear_unit, identity, cocycle, pairs)};
}

Outcome a6(const Context& conj) {
  const Reconstruction rec = reconstruct_phi(*conj.f, conj.h, conj.split, conj.config.x0);
  const HeldOutResiduals ho =
      held_out_residuals(*conj.f, conj.h, conj.split, rec, conj.config.held_out, 606);
  const EquidistanceReport eq = check_equidistance(*conj.f, conj.h, conj.split, Vec2(0.71, 0.18));
  const bool ok = rec.hausdorff < 1e-3 && ho.conjugation < 1e-3 && eq.residual < 1e-3 &&
                  ho.cohomological < 1e-3;
  return {ok, fmt("Hausdorff %.3g, return conjugation %.3g, equidistance %.3g, cohomological %.3g "
                  "(all < 1e-3, %d held-out samples)",
                  rec.hausdorff, ho.conjugation, eq.residual, ho.cohomological, ho.samples)};
}

double max_deviation_at_period(const ObstructionReport& r, int n) {
  double d = 0.0;
  for (const auto& e : r.entries)
    if (e.orbit.period == n) d = std::max(d, e.deviation);
  return d;
}

Outcome a7(const Context& conj, const Context& detuned) {
  const double wu = probe_h(conj, Bundle::WeakUnstable).exponent;
  const double d_wu = probe_h(detuned, Bundle::WeakUnstable).exponent;
  const double d_uu = probe_h(detuned, Bundle::StrongUnstable).exponent;
  const double dev1 = max_deviation_at_period(detuned.periodic, 1);
  const bool ok = wu >= 0.95 && !detuned.periodic.verdict && dev1 >= 1e-3 &&
                  std::min(d_wu, d_uu) <= 0.9;
  return {ok, fmt("matched data: wu exponent %.4f (>= 0.95); detuned: period-1 deviation %.3g, "
                  "exponents wu %.4f uu %.4f (some <= 0.9)",
                  wu, dev1, d_wu, d_uu)};
}

Outcome a8(const std::vector<const Context*>& cases) {
  bool ok = true;
  std::ostringstream os;
  for (const Context* c : cases) {
    const LivsicReport lv = livsic_orbit_sums(*c->f, c->split, c->periodic);
    double per = 0.0;
    for (const auto& e : lv.entries) per = std::max(per, std::abs(e.orbit_sum) / e.period);
    const bool small = per < 1e-6;
    ok = ok && small == c->periodic.verdict;
    os << (os.tellp() > 0 ? "; " : "") << to_string(c->config.kind) << ": verdict "
       << c->periodic.verdict << ", max |sum|/n " << fmt("%.3g", per) << " over "
       << lv.entries.size() << " orbits";
  }
  return {ok, os.str()};
}

}  // namespace
}  // namespace anosov

int main() {
  using namespace anosov;
  using clock = std::chrono::steady_clock;
  int failures = 0;
  const auto report = [&](const char* id, const char* title, const std::function<Outcome()>& run) {
    const auto t0 = clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const Error& e) {
      o = {false, std::string("error ") + std::string(to_string(e.code())) + ": " + e.detail()};
    }
    const double s = std::chrono::duration<double>(clock::now() - t0).count();
    std::printf("%s %s %s: %s [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", title, o.detail.c_str(), s);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  };

  const auto t0 = clock::now();
  const Context linear = prepare("linear.json");
  const Context conj = prepare("conjugated.json");
  const Context detuned = prepare("detuned.json");
  std::printf("setup: conjugacies and periodic orbits for 3 maps [%.1fs]\n",
              std::chrono::duration<double>(clock::now() - t0).count());

  report("A1", "conjugacy recovery", [&] { return a1(conj); });
  report("A2", "translation cohomology exactness", [] { return a2(); });
  report("A3", "Diophantine certificate", [] { return a3(); });
  report("A4", "periodic counts", [] { return a4(); });
  report("A5", "density identities", [] { return a5(); });
  report("A6", "weak unstable reconstruction", [&] { return a6(conj); });
  report("A7", "rigidity contrast", [&] { return a7(conj, detuned); });
  report("A8", "Livsic consistency", [&] { return a8({&linear, &conj, &detuned}); });
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
