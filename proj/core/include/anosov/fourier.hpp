#pragma once

#include "anosov/grid.hpp"

#include <complex>
#include <map>
#include <vector>

namespace anosov {

using Frequency = std::vector<int>;

/// Finitely supported coefficients on Z^m; f(x) = sum_p c_p e^{2 pi i <p, x>}.
class FourierSeries {
 public:
  explicit FourierSeries(int dimension = 2) : dim_(dimension) {}

  int dimension() const { return dim_; }
  std::size_t size() const { return coeffs_.size(); }
  const std::map<Frequency, std::complex<double>>& coefficients() const { return coeffs_; }

  void set(const Frequency& p, std::complex<double> c);
  void add(const Frequency& p, std::complex<double> c);
  std::complex<double> get(const Frequency& p) const;
  std::complex<double> mean() const { return get(Frequency(std::size_t(dim_), 0)); }

  /// Coefficient at -p is the conjugate of the one at p, to tol.
  bool is_real(double tol = 1e-14) const;

  std::complex<double> evaluate_complex(const Eigen::VectorXd& x) const;
  double evaluate(const Eigen::VectorXd& x) const { return evaluate_complex(x).real(); }

  /// Directional derivative along v.
  FourierSeries derivative(const Eigen::VectorXd& v) const;
  /// x -> f(x + shift).
  FourierSeries translated(const Eigen::VectorXd& shift) const;
  FourierSeries operator-(const FourierSeries& o) const;
  FourierSeries scaled(double s) const;

  /// Largest coefficient modulus.
  double max_abs() const;

  /// Coefficients of periodic samples on an M x M grid (FFT), keeping
  /// Euclidean |p| <= band and |p_i| < M/2.
  static FourierSeries from_grid(const ScalarGrid2& samples, int band);

  /// a single real mode amplitude * cos(2 pi <p, x> + phase).
  static FourierSeries cosine(const Frequency& p, double amplitude = 1.0, double phase = 0.0);

 private:
  int dim_;
  std::map<Frequency, std::complex<double>> coeffs_;
};

double frequency_norm(const Frequency& p);

struct DivisorEntry {
  Frequency p;
  double divisor = 0.0;      // |e^{2 pi i <beta, p>} - 1|
  double distance = 0.0;     // dist(<beta, p>, Z)
  double amplification = 0.0; // |phi_p| / |a_p|
};

struct DivisorProfile {
  std::vector<DivisorEntry> entries;
  double min_divisor = 0.0;
  Frequency argmin;
};

struct TranslationSolution {
  FourierSeries phi;
  DivisorProfile profile;
};

/// Zero-mean solution of phi(x + beta) - phi(x) = a(x).
TranslationSolution solve_translation_cohomology(const FourierSeries& a,
                                                 const Eigen::VectorXd& beta,
                                                 double divisor_floor = 1e-12,
                                                 double mean_tol = 1e-12);

/// Coefficients of phi o T - phi - a.
FourierSeries translation_residual(const FourierSeries& phi, const FourierSeries& a,
                                   const Eigen::VectorXd& beta);

struct RegularityLoss {
  double decay_a = 0.0;    // s in |a_p| ~ |p|^{-s}
  double decay_phi = 0.0;  // s' in |phi_p| ~ |p|^{-s'}
  double loss = 0.0;       // s - s'
  int shells = 0;
};

/// Fits the dyadic-shell envelopes of both coefficient sequences.
RegularityLoss regularity_loss_estimate(const FourierSeries& a, const FourierSeries& phi);

}  // namespace anosov
