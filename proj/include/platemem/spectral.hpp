// SPDX-License-Identifier: Apache-2.0
//
// Spectrum of the generator pencil and energy-norm resolvent scans along the
// imaginary axis.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

#include "platemem/discretization.hpp"

namespace platemem {

inline constexpr double kSpectralRelTol = 1e-8;
inline constexpr double kCollisionShift = 1e-9;
inline constexpr double kSingularShiftDistance = 1e-12;

struct SpectrumResult {
  int mode = 0;
  std::vector<std::complex<double>> eigenvalues;  // sorted by imaginary, then real part
  double spectral_abscissa = 0.0;  // max Re
  double imag_axis_gap = 0.0;      // min |Re|
  bool zero_in_resolvent = false;  // min |lambda| > tolerance
  double max_modulus = 0.0;
  double min_modulus = 0.0;
  double tolerance = 0.0;          // kSpectralRelTol * max_modulus
};

/// B = F M^{-1} A F^{-1} with G = F^T F: the generator in G-orthonormal
/// coordinates.  Its Euclidean geometry is the energy geometry of the pencil.
Eigen::MatrixXd energy_orthonormal_generator(const ModePencil& pencil);

SpectrumResult eigenvalues(const ModePencil& pencil);

/// Evaluates s(lambda) = ||(i lambda - A)^{-1}||_G repeatedly using one Schur
/// decomposition of the orthonormalized generator.
class ResolventEvaluator {
 public:
  explicit ResolventEvaluator(const ModePencil& pencil);

  /// Throws std::domain_error when i*lambda is (numerically) an eigenvalue.
  double norm(double lambda) const;

  /// sup ||(i lambda - A)^{-1} f|| / ||A f||, the normalization of the
  /// polynomial resolvent bound against the graph norm.
  double graph_normalized_norm(double lambda) const;

  /// Distance from i*lambda to the nearest eigenvalue.
  double distance_to_spectrum(double lambda) const;

  const std::vector<std::complex<double>>& eigenvalues() const noexcept { return eigenvalues_; }

 private:
  double largest_singular_value(double lambda, bool graph) const;

  Eigen::MatrixXcd schur_t_;
  std::vector<std::complex<double>> eigenvalues_;
};

double resolvent_norm(const ModePencil& pencil, double lambda);

struct ResolventScan {
  std::vector<double> lambdas;
  std::vector<double> norms;
  std::vector<double> graph_norms;
  std::vector<int> dominant_modes;  // mode attaining each norm
  double sup_norm = 0.0;
  double sup_lambda = 0.0;
  int sup_mode = 0;
  // log-log least squares slope of the scan's local maxima over the upper
  // half of the range (empirical polynomial growth exponent) and its r^2.
  double growth_exponent = 0.0;
  double growth_r_squared = 0.0;
  double graph_growth_exponent = 0.0;
  int resonance_samples = 0;
  int perturbed_samples = 0;
};

/// n_samples equispaced shifts on [lambda_min, lambda_max], merged with the
/// imaginary parts of the eigenvalues inside the range.  The resonant shifts
/// sit on the peaks of s, which equispaced samples would step over once the
/// eigenvalues approach the axis.
ResolventScan resolvent_scan(const ModePencil& pencil, double lambda_min, double lambda_max, int n_samples);

/// Scan of the operator restricted to the given Fourier modes: the generator
/// is block diagonal in the mode, so s is the maximum over the blocks.
ResolventScan resolvent_scan(std::span<const ModePencil> pencils, double lambda_min, double lambda_max,
                             int n_samples);

/// Same, from evaluators built beforehand (the pencils need not stay alive).
ResolventScan resolvent_scan(const std::vector<ResolventEvaluator>& evaluators, const std::vector<int>& modes,
                             double lambda_min, double lambda_max, int n_samples);

/// Membrane frequencies of modes n > mode_max exceed sqrt(beta2/rho2) n /
/// r_interface (every zero j_{n,1} of J_n is larger than n), so a scan over
/// modes 0..mode_max is complete below this frequency.
double mode_truncation_frequency(const PhysicalParams& p, const AnnulusGeometry& g, int mode_max);

/// Half the membrane Nyquist frequency, sqrt(beta2/rho2) n_mem / r_interface.
/// Eigenvalues above it are grid modes rather than approximations of the
/// continuous spectrum.
double resolved_frequency(const PhysicalParams& p, const RadialGrid& grid);

/// max Re over the eigenvalues with |Im| <= cutoff.
double resolved_abscissa(const SpectrumResult& spectrum, double cutoff);

struct Resolution {
  int n_plate = 64;
  int n_mem = 64;
};

struct ModeAbscissa {
  int mode = 0;
  double abscissa = 0.0;
  double resolved = 0.0;  // over |Im| <= resolved_frequency
};

struct AbscissaLevel {
  Resolution resolution;
  int mode_min = 0;
  int mode_max = 0;
  double resolved_cutoff = 0.0;
  std::vector<ModeAbscissa> modes;
  double global = 0.0;
  double global_resolved = 0.0;
  int argmax_mode = 0;
};

/// Abscissae at the requested resolution and modes, and again with both the
/// resolution and the mode count doubled.
struct AbscissaSweep {
  AbscissaLevel coarse;
  AbscissaLevel fine;

  /// |coarse| / |fine| of the resolved global abscissa.
  double shrink_ratio() const;
};

AbscissaSweep spectral_abscissa_sweep(const PhysicalParams& p, const AnnulusGeometry& g, Resolution resolution,
                                      int mode_max, int mode_min = 0);

/// Least squares line y = a + b x; returns {a, b, r^2}.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};
LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace platemem
