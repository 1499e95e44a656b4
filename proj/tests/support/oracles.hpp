// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations for the tests.  Nothing here calls
// into the library.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracle {

// J0 from its power series, sum_k (-x^2/4)^k / (k!)^2.  Terms are summed
// until they stop changing the result; accurate to ~1e-15 for x < 12.
inline double bessel_j0(double x) {
  const double q = -0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum))) break;
  }
  return sum;
}

// k-th positive zero of J0: sign changes on a 0.05 grid, then bisection.
inline double bessel_j0_zero(int k) {
  int found = 0;
  double a = 0.05;
  for (double b = 0.1; b < 40.0; a = b, b += 0.05) {
    if (bessel_j0(a) * bessel_j0(b) > 0.0) continue;
    if (++found < k) continue;
    double lo = a, hi = b;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      (bessel_j0(lo) * bessel_j0(mid) <= 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  }
  throw std::runtime_error("bessel_j0_zero: not bracketed");
}

// exp(L) by squaring a truncated Taylor series of exp(L / 2^s).
inline Eigen::MatrixXd expm_taylor(const Eigen::MatrixXd& L) {
  const double norm = L.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  while (norm / std::pow(2.0, s) > 0.25) ++s;
  const Eigen::MatrixXd X = L / std::pow(2.0, s);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(L.rows(), L.cols());
  Eigen::MatrixXd sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * X / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

// Exact synthetic traces for the fitters.
struct Samples {
  std::vector<double> t, e;
};

inline Samples exponential_energy(double c, double slope, double t0, double t1, int n) {
  Samples s;
  for (int k = 0; k < n; ++k) {
    const double t = t0 + (t1 - t0) * k / (n - 1);
    s.t.push_back(t);
    s.e.push_back(c * std::exp(-slope * t));
  }
  return s;
}

inline Samples power_energy(double c, double power, double t0, double t1, int n) {
  Samples s;
  for (int k = 0; k < n; ++k) {
    const double t = t0 * std::pow(t1 / t0, static_cast<double>(k) / (n - 1));
    s.t.push_back(t);
    s.e.push_back(c * std::pow(t, -power));
  }
  return s;
}

}  // namespace oracle
