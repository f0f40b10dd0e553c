#include "anosov/fourier.hpp"

#include "anosov/errors.hpp"

#include <fftw3.h>

#include <mutex>
#include <sstream>

namespace anosov {

namespace {
std::mutex g_fftw_planner;

std::string format_frequency(const Frequency& p) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ")";
  return os.str();
}

Frequency negated(const Frequency& p) {
  Frequency q(p);
  for (auto& v : q) v = -v;
  return q;
}

double dot(const Frequency& p, const Eigen::VectorXd& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * x[Eigen::Index(i)];
  return s;
}

}  // namespace

double frequency_norm(const Frequency& p) {
  double s = 0.0;
  for (int v : p) s += double(v) * v;
  return std::sqrt(s);
}

void FourierSeries::set(const Frequency& p, std::complex<double> c) {
  if (int(p.size()) != dim_) throw Error(ErrorCode::InvalidConfig, "frequency dimension mismatch");
  coeffs_[p] = c;
}

void FourierSeries::add(const Frequency& p, std::complex<double> c) {
  if (int(p.size()) != dim_) throw Error(ErrorCode::InvalidConfig, "frequency dimension mismatch");
  coeffs_[p] += c;
}

std::complex<double> FourierSeries::get(const Frequency& p) const {
  auto it = coeffs_.find(p);
  return it == coeffs_.end() ? std::complex<double>(0.0) : it->second;
}

bool FourierSeries::is_real(double tol) const {
  for (const auto& [p, c] : coeffs_)
    if (std::abs(get(negated(p)) - std::conj(c)) > tol) return false;
  return true;
}

std::complex<double> FourierSeries::evaluate_complex(const Eigen::VectorXd& x) const {
  std::complex<double> s = 0.0;
  for (const auto& [p, c] : coeffs_) s += c * std::polar(1.0, kTwoPi * dot(p, x));
  return s;
}

FourierSeries FourierSeries::derivative(const Eigen::VectorXd& v) const {
  FourierSeries d(dim_);
  for (const auto& [p, c] : coeffs_) {
    const double k = kTwoPi * dot(p, v);
    if (k != 0.0) d.coeffs_[p] = c * std::complex<double>(0.0, k);
  }
  return d;
}

FourierSeries FourierSeries::translated(const Eigen::VectorXd& shift) const {
  FourierSeries t(dim_);
  for (const auto& [p, c] : coeffs_) t.coeffs_[p] = c * std::polar(1.0, kTwoPi * dot(p, shift));
  return t;
}

FourierSeries FourierSeries::operator-(const FourierSeries& o) const {
  FourierSeries r = *this;
  for (const auto& [p, c] : o.coeffs_) r.coeffs_[p] -= c;
  return r;
}

FourierSeries FourierSeries::scaled(double s) const {
  FourierSeries r = *this;
  for (auto& [p, c] : r.coeffs_) c *= s;
  return r;
}

double FourierSeries::max_abs() const {
  double m = 0.0;
  for (const auto& [p, c] : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

FourierSeries FourierSeries::from_grid(const ScalarGrid2& samples, int band) {
  const int M = samples.resolution();
  std::vector<fftw_complex> in(std::size_t(M) * M), out(std::size_t(M) * M);
  fftw_plan plan;
  {
    std::lock_guard lock(g_fftw_planner);
    plan = fftw_plan_dft_2d(M, M, in.data(), out.data(), FFTW_FORWARD, FFTW_ESTIMATE);
  }
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      in[std::size_t(i) * M + j][0] = samples.at({i, j});
      in[std::size_t(i) * M + j][1] = 0.0;
    }
  fftw_execute(plan);
  {
    std::lock_guard lock(g_fftw_planner);
    fftw_destroy_plan(plan);
  }
  FourierSeries fs(2);
  const double norm = 1.0 / (double(M) * M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      const int p1 = i <= M / 2 ? i : i - M;
      const int p2 = j <= M / 2 ? j : j - M;
      if (2 * std::abs(p1) >= M || 2 * std::abs(p2) >= M) continue;
      if (double(p1) * p1 + double(p2) * p2 > double(band) * band) continue;
      const auto& z = out[std::size_t(i) * M + j];
      fs.coeffs_[{p1, p2}] = std::complex<double>(z[0], z[1]) * norm;
    }
  return fs;
}

FourierSeries FourierSeries::cosine(const Frequency& p, double amplitude, double phase) {
  FourierSeries fs(int(p.size()));
  const auto c = 0.5 * amplitude * std::polar(1.0, phase);
  if (frequency_norm(p) == 0.0) {
    fs.coeffs_[p] = amplitude * std::cos(phase);
    return fs;
  }
  fs.coeffs_[p] = c;
  fs.coeffs_[negated(p)] = std::conj(c);
  return fs;
}

TranslationSolution solve_translation_cohomology(const FourierSeries& a,
                                                 const Eigen::VectorXd& beta,
                                                 double divisor_floor, double mean_tol) {
  if (beta.size() != a.dimension())
    throw Error(ErrorCode::InvalidConfig, "translation and series dimensions differ");
  if (std::abs(a.mean()) > mean_tol) {
    std::ostringstream os;
    os << "mean " << std::abs(a.mean()) << " of the right-hand side is not zero";
    throw Error(ErrorCode::NonzeroMean, os.str());
  }
  TranslationSolution sol{FourierSeries(a.dimension()), {}};
  sol.profile.min_divisor = std::numeric_limits<double>::infinity();
  for (const auto& [p, c] : a.coefficients()) {
    if (frequency_norm(p) == 0.0) continue;
    const double theta = dot(p, beta);
    const std::complex<double> d = std::polar(1.0, kTwoPi * theta) - 1.0;
    const double dist = distance_to_integer(theta);
    // |e^{2 pi i theta} - 1| = 2 sin(pi dist) keeps full relative accuracy.
    const double mod = 2.0 * std::sin(std::numbers::pi * dist);
    if (mod < divisor_floor) {
      throw Error(ErrorCode::SmallDivisorFloor,
                  "divisor " + std::to_string(mod) + " at p = " + format_frequency(p));
    }
    const std::complex<double> phi = c / d;
    sol.phi.set(p, phi);
    DivisorEntry e{p, mod, dist, std::abs(c) > 0 ? std::abs(phi) / std::abs(c) : 1.0 / mod};
    if (mod < sol.profile.min_divisor) {
      sol.profile.min_divisor = mod;
      sol.profile.argmin = p;
    }
    sol.profile.entries.push_back(std::move(e));
  }
  return sol;
}

FourierSeries translation_residual(const FourierSeries& phi, const FourierSeries& a,
                                   const Eigen::VectorXd& beta) {
  return (phi.translated(beta) - phi) - a;
}

RegularityLoss regularity_loss_estimate(const FourierSeries& a, const FourierSeries& phi) {
  auto envelope = [](const FourierSeries& s) {
    std::map<int, double> shell_max;
    for (const auto& [p, c] : s.coefficients()) {
      const double n = frequency_norm(p);
      if (n == 0.0 || std::abs(c) == 0.0) continue;
      const int k = int(std::floor(std::log2(n)));
      shell_max[k] = std::max(shell_max[k], std::abs(c));
    }
    return shell_max;
  };
  auto fit = [](const std::map<int, double>& env) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(env.size());
    for (const auto& [k, m] : env) {
      const double lx = std::log(std::pow(2.0, k + 0.5));
      const double ly = std::log(m);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  const auto ea = envelope(a), ep = envelope(phi);
  if (ea.size() < 3 || ep.size() < 3)
    throw Error(ErrorCode::DegenerateFit, "need coefficients in at least three dyadic shells");
  RegularityLoss r;
  r.decay_a = fit(ea);
  r.decay_phi = fit(ep);
  r.loss = r.decay_a - r.decay_phi;
  r.shells = int(std::min(ea.size(), ep.size()));
  return r;
}

}  // namespace anosov
