// SPDX-License-Identifier: Apache-2.0

#include "platemem/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace platemem {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using cplx = std::complex<double>;

std::vector<cplx> sorted(std::vector<cplx> v) {
  std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
    if (a.imag() != b.imag()) return a.imag() < b.imag();
    return a.real() < b.real();
  });
  return v;
}

}  // namespace

MatrixXd energy_orthonormal_generator(const ModePencil& pencil) {
  Eigen::LLT<MatrixXd> llt(pencil.G);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("energy_orthonormal_generator: G is not positive definite");
  const auto L = llt.matrixL();
  // L^{-1} H L^{-T} = L^T M^{-1} A L^{-T}
  const MatrixXd X = L.solve(pencil.H);
  return L.solve(X.transpose()).transpose();
}

SpectrumResult eigenvalues(const ModePencil& pencil) {
  const MatrixXd B = energy_orthonormal_generator(pencil);
  Eigen::EigenSolver<MatrixXd> solver(B, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigensolver failed for mode " << pencil.mode << " (dimension " << B.rows() << ", ||B|| = " << B.norm()
       << ")";
    throw std::runtime_error(os.str());
  }
  SpectrumResult out;
  out.mode = pencil.mode;
  const auto& ev = solver.eigenvalues();
  out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  out.eigenvalues = sorted(std::move(out.eigenvalues));

  out.spectral_abscissa = -std::numeric_limits<double>::infinity();
  out.imag_axis_gap = std::numeric_limits<double>::infinity();
  out.min_modulus = std::numeric_limits<double>::infinity();
  for (const auto& l : out.eigenvalues) {
    out.spectral_abscissa = std::max(out.spectral_abscissa, l.real());
    out.imag_axis_gap = std::min(out.imag_axis_gap, std::abs(l.real()));
    out.max_modulus = std::max(out.max_modulus, std::abs(l));
    out.min_modulus = std::min(out.min_modulus, std::abs(l));
  }
  out.tolerance = kSpectralRelTol * out.max_modulus;
  out.zero_in_resolvent = out.min_modulus > out.tolerance;
  return out;
}

ResolventEvaluator::ResolventEvaluator(const ModePencil& pencil) {
  const MatrixXd B = energy_orthonormal_generator(pencil);
  Eigen::ComplexSchur<MatrixXcd> schur(B.cast<cplx>(), /*computeU=*/false);
  if (schur.info() != Eigen::Success) throw std::runtime_error("ResolventEvaluator: Schur decomposition failed");
  schur_t_ = schur.matrixT();
  eigenvalues_.resize(static_cast<std::size_t>(schur_t_.rows()));
  for (Index i = 0; i < schur_t_.rows(); ++i) eigenvalues_[static_cast<std::size_t>(i)] = schur_t_(i, i);
}

double ResolventEvaluator::distance_to_spectrum(double lambda) const {
  const cplx z(0.0, lambda);
  double d = std::numeric_limits<double>::infinity();
  for (const auto& l : eigenvalues_) d = std::min(d, std::abs(z - l));
  return d;
}

// Largest singular value of (i lambda - T)^{-1} (times T^{-1} for the graph
// normalization).  Both factors are triangular, so every Lanczos step costs
// O(n^2).  Falls back to a full SVD if the iteration stalls.
double ResolventEvaluator::largest_singular_value(double lambda, bool graph) const {
  if (distance_to_spectrum(lambda) <= kSingularShiftDistance) {
    std::ostringstream os;
    os << "resolvent: i*" << lambda << " is an eigenvalue of the generator";
    throw std::domain_error(os.str());
  }
  const Index n = schur_t_.rows();
  MatrixXcd Z = -schur_t_;
  Z.diagonal().array() += cplx(0.0, lambda);
  const auto Zu = Z.triangularView<Eigen::Upper>();
  const auto Tu = schur_t_.triangularView<Eigen::Upper>();

  auto apply = [&](const VectorXcd& x) -> VectorXcd {
    VectorXcd y = graph ? VectorXcd(Tu.solve(x)) : x;
    return Zu.solve(y);
  };
  auto apply_adjoint = [&](const VectorXcd& y) -> VectorXcd {
    VectorXcd x = Zu.adjoint().solve(y);
    return graph ? VectorXcd(Tu.adjoint().solve(x)) : x;
  };

  // Lanczos on the Hermitian operator K^* K with full reorthogonalization;
  // the largest Ritz value converges to sigma_max^2 in a few dozen steps.
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> dist;
  const Index max_steps = std::min<Index>(n, 160);
  MatrixXcd Q(n, max_steps);
  std::vector<double> alpha, beta;
  VectorXcd q(n);
  for (Index i = 0; i < n; ++i) q(i) = cplx(dist(rng), dist(rng));
  q.normalize();
  double previous = 0.0;
  for (Index k = 0; k < max_steps; ++k) {
    Q.col(k) = q;
    VectorXcd w = apply_adjoint(apply(q));
    const double a = q.dot(w).real();
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass) w -= Q.leftCols(k + 1) * (Q.leftCols(k + 1).adjoint() * w);
    const double b = w.norm();
    if (!std::isfinite(b)) break;
    const Index m = k + 1;
    if (m % 4 == 0 || b <= 1e-14 * std::abs(a) || m == max_steps) {
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
      for (Index i = 0; i < m; ++i) {
        T(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
      }
      const double ritz = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(T, Eigen::EigenvaluesOnly).eigenvalues()(m - 1);
      if (b <= 1e-14 * std::abs(a) || m == n || (k > 4 && std::abs(ritz - previous) <= 1e-13 * ritz))
        return std::sqrt(std::max(ritz, 0.0));
      previous = ritz;
    }
    beta.push_back(b);
    q = w / b;
  }

  MatrixXcd inv = Zu.solve(MatrixXcd::Identity(n, n));
  if (graph) inv = inv * Tu.solve(MatrixXcd::Identity(n, n));
  Eigen::BDCSVD<MatrixXcd> svd(inv);
  return svd.singularValues()(0);
}

double ResolventEvaluator::norm(double lambda) const { return largest_singular_value(lambda, false); }

double ResolventEvaluator::graph_normalized_norm(double lambda) const {
  return largest_singular_value(lambda, true);
}

double resolvent_norm(const ModePencil& pencil, double lambda) { return ResolventEvaluator(pencil).norm(lambda); }

LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares_line: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("least_squares_line: degenerate abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

namespace {

// Samples that dominate both neighbours, restricted to lambda >= lo.
std::vector<std::size_t> local_maxima(const std::vector<double>& lambdas, const std::vector<double>& values,
                                      double lo) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < values.size(); ++i)
    if (lambdas[i] >= lo && values[i] >= values[i - 1] && values[i] >= values[i + 1]) out.push_back(i);
  return out;
}

std::pair<double, double> envelope_slope(const std::vector<double>& lambdas, const std::vector<double>& values,
                                         double lo) {
  std::vector<std::size_t> picks = local_maxima(lambdas, values, lo);
  if (picks.size() < 3) {
    picks.clear();
    for (std::size_t i = 0; i < lambdas.size(); ++i)
      if (lambdas[i] >= lo) picks.push_back(i);
  }
  std::vector<double> x, y;
  for (auto i : picks) {
    if (lambdas[i] <= 0.0 || values[i] <= 0.0) continue;
    x.push_back(std::log(lambdas[i]));
    y.push_back(std::log(values[i]));
  }
  if (x.size() < 2) return {0.0, 0.0};
  const LineFit fit = least_squares_line(x, y);
  return {fit.slope, fit.r_squared};
}

}  // namespace

namespace {

struct ScanSample {
  double lambda;
  bool resonant;
};

std::vector<ScanSample> scan_samples(const std::vector<const ResolventEvaluator*>& evaluators, double lambda_min,
                                     double lambda_max, int n_samples) {
  std::vector<ScanSample> out;
  for (int k = 0; k < n_samples; ++k)
    out.push_back({lambda_min + (lambda_max - lambda_min) * k / (n_samples - 1), false});
  for (const auto* ev : evaluators)
    for (const auto& l : ev->eigenvalues())
      if (l.imag() >= lambda_min && l.imag() <= lambda_max) out.push_back({l.imag(), true});
  std::sort(out.begin(), out.end(), [](const ScanSample& a, const ScanSample& b) { return a.lambda < b.lambda; });
  std::vector<ScanSample> unique;
  for (const auto& s : out)
    if (unique.empty() || s.lambda - unique.back().lambda > 1e-12 * std::max(1.0, std::abs(s.lambda)))
      unique.push_back(s);
  return unique;
}

ResolventScan run_scan(const std::vector<const ResolventEvaluator*>& evaluators, const std::vector<int>& modes,
                       double lambda_min, double lambda_max, int n_samples) {
  if (n_samples < 2 || !(lambda_max > lambda_min))
    throw std::invalid_argument("resolvent_scan: need n_samples >= 2 and lambda_max > lambda_min");
  ResolventScan scan;
  for (const auto& sample : scan_samples(evaluators, lambda_min, lambda_max, n_samples)) {
    double lambda = sample.lambda;
    auto too_close = [&] {
      for (const auto* ev : evaluators)
        if (ev->distance_to_spectrum(lambda) <= kSingularShiftDistance) return true;
      return false;
    };
    for (int tries = 0; tries < 8 && too_close(); ++tries) {
      lambda += kCollisionShift;
      ++scan.perturbed_samples;
    }
    if (sample.resonant) ++scan.resonance_samples;
    double best = 0.0, best_graph = 0.0;
    int best_mode = modes.front();
    for (std::size_t m = 0; m < evaluators.size(); ++m) {
      const double s = evaluators[m]->norm(lambda);
      if (s > best) {
        best = s;
        best_mode = modes[m];
      }
      best_graph = std::max(best_graph, evaluators[m]->graph_normalized_norm(lambda));
    }
    scan.lambdas.push_back(lambda);
    scan.norms.push_back(best);
    scan.graph_norms.push_back(best_graph);
    scan.dominant_modes.push_back(best_mode);
    if (best > scan.sup_norm) {
      scan.sup_norm = best;
      scan.sup_lambda = lambda;
      scan.sup_mode = best_mode;
    }
  }
  const double upper_half = 0.5 * (std::max(lambda_min, 0.0) + lambda_max);
  std::tie(scan.growth_exponent, scan.growth_r_squared) = envelope_slope(scan.lambdas, scan.norms, upper_half);
  scan.graph_growth_exponent = envelope_slope(scan.lambdas, scan.graph_norms, upper_half).first;
  return scan;
}

}  // namespace

ResolventScan resolvent_scan(const ModePencil& pencil, double lambda_min, double lambda_max, int n_samples) {
  const ResolventEvaluator evaluator(pencil);
  return run_scan({&evaluator}, {pencil.mode}, lambda_min, lambda_max, n_samples);
}

ResolventScan resolvent_scan(std::span<const ModePencil> pencils, double lambda_min, double lambda_max,
                             int n_samples) {
  if (pencils.empty()) throw std::invalid_argument("resolvent_scan: no pencils");
  std::vector<ResolventEvaluator> evaluators;
  evaluators.reserve(pencils.size());
  std::vector<int> modes;
  for (const auto& p : pencils) {
    evaluators.emplace_back(p);
    modes.push_back(p.mode);
  }
  std::vector<const ResolventEvaluator*> ptrs;
  for (const auto& e : evaluators) ptrs.push_back(&e);
  return run_scan(ptrs, modes, lambda_min, lambda_max, n_samples);
}

ResolventScan resolvent_scan(const std::vector<ResolventEvaluator>& evaluators, const std::vector<int>& modes,
                             double lambda_min, double lambda_max, int n_samples) {
  if (evaluators.empty() || evaluators.size() != modes.size())
    throw std::invalid_argument("resolvent_scan: need one mode number per evaluator");
  std::vector<const ResolventEvaluator*> ptrs;
  for (const auto& e : evaluators) ptrs.push_back(&e);
  return run_scan(ptrs, modes, lambda_min, lambda_max, n_samples);
}

double mode_truncation_frequency(const PhysicalParams& p, const AnnulusGeometry& g, int mode_max) {
  return std::sqrt(p.beta2 / p.rho2) * (mode_max + 1) / g.r_interface;
}

double resolved_frequency(const PhysicalParams& p, const RadialGrid& grid) {
  return std::sqrt(p.beta2 / p.rho2) * static_cast<double>(grid.n_mem()) / grid.r_interface;
}

double resolved_abscissa(const SpectrumResult& spectrum, double cutoff) {
  double a = -std::numeric_limits<double>::infinity();
  for (const auto& l : spectrum.eigenvalues)
    if (std::abs(l.imag()) <= cutoff) a = std::max(a, l.real());
  return a;
}

double AbscissaSweep::shrink_ratio() const {
  return std::abs(coarse.global_resolved) / std::abs(fine.global_resolved);
}

namespace {

AbscissaLevel abscissa_level(const PhysicalParams& p, const AnnulusGeometry& g, Resolution res, int mode_min,
                             int mode_max) {
  AbscissaLevel level;
  level.resolution = res;
  level.mode_min = mode_min;
  level.mode_max = mode_max;
  level.global = -std::numeric_limits<double>::infinity();
  level.global_resolved = -std::numeric_limits<double>::infinity();
  for (int n = mode_min; n <= mode_max; ++n) {
    const RadialGrid grid = build_radial_grid(g, res.n_plate, res.n_mem, n);
    const SpectrumResult spectrum = eigenvalues(assemble_mode_pencil(p, grid));
    level.resolved_cutoff = resolved_frequency(p, grid);
    ModeAbscissa e{n, spectrum.spectral_abscissa, resolved_abscissa(spectrum, level.resolved_cutoff)};
    if (e.abscissa > level.global) {
      level.global = e.abscissa;
      level.argmax_mode = n;
    }
    level.global_resolved = std::max(level.global_resolved, e.resolved);
    level.modes.push_back(e);
  }
  return level;
}

}  // namespace

AbscissaSweep spectral_abscissa_sweep(const PhysicalParams& p, const AnnulusGeometry& g, Resolution resolution,
                                      int mode_max, int mode_min) {
  validate_params(p, g);
  if (mode_min < 0 || mode_max < mode_min) throw std::invalid_argument("spectral_abscissa_sweep: bad mode range");
  AbscissaSweep sweep;
  sweep.coarse = abscissa_level(p, g, resolution, mode_min, mode_max);
  const int fine_max = 2 * mode_max;
  sweep.fine = abscissa_level(p, g, {2 * resolution.n_plate, 2 * resolution.n_mem}, mode_min, fine_max);
  return sweep;
}

}  // namespace platemem
