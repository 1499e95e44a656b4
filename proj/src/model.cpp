// SPDX-License-Identifier: Apache-2.0

#include "platemem/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace platemem {

namespace {

std::string join_violations(const std::vector<std::string>& violations) {
  std::ostringstream os;
  os << "invalid parameters:";
  for (const auto& v : violations) os << "\n  " << v;
  return os.str();
}

void require_positive(std::vector<std::string>& out, std::string_view name, double value) {
  if (!(std::isfinite(value) && value > 0.0)) {
    std::ostringstream os;
    os << name << " must be positive (got " << value << ")";
    out.push_back(os.str());
  }
}

void require_nonnegative(std::vector<std::string>& out, std::string_view name, double value) {
  if (!(std::isfinite(value) && value >= 0.0)) {
    std::ostringstream os;
    os << name << " must be nonnegative (got " << value << ")";
    out.push_back(os.str());
  }
}

}  // namespace

std::string_view to_string(RegimeLabel label) {
  switch (label) {
    case RegimeLabel::ExponentialRhoDamped: return "ExponentialRhoDamped";
    case RegimeLabel::ExponentialThermalOnly: return "ExponentialThermalOnly";
    case RegimeLabel::StrongOnlyUnproven: return "StrongOnlyUnproven";
    case RegimeLabel::NotExponentialPolynomial: return "NotExponentialPolynomial";
    case RegimeLabel::NotExponentialNoRate: return "NotExponentialNoRate";
    case RegimeLabel::NotExponentialGeometryFails: return "NotExponentialGeometryFails";
  }
  return "unknown";
}

bool is_exponential(RegimeLabel label) {
  return label == RegimeLabel::ExponentialRhoDamped || label == RegimeLabel::ExponentialThermalOnly;
}

bool is_not_exponential(RegimeLabel label) {
  return label == RegimeLabel::NotExponentialPolynomial || label == RegimeLabel::NotExponentialNoRate ||
         label == RegimeLabel::NotExponentialGeometryFails;
}

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::invalid_argument(join_violations(violations)), violations_(std::move(violations)) {}

ValidatedSetup validate_params(const PhysicalParams& p, const AnnulusGeometry& g) {
  std::vector<std::string> bad;
  require_positive(bad, "rho0", p.rho0);
  require_positive(bad, "rho1", p.rho1);
  require_positive(bad, "rho2", p.rho2);
  require_positive(bad, "beta0", p.beta0);
  require_positive(bad, "beta1", p.beta1);
  require_positive(bad, "beta2", p.beta2);
  require_positive(bad, "kappa", p.kappa);
  require_nonnegative(bad, "mu", p.mu);
  require_nonnegative(bad, "gamma", p.gamma);
  require_nonnegative(bad, "rho", p.rho_damp);
  require_nonnegative(bad, "m", p.m_damp);

  require_positive(bad, "r_interface", g.r_interface);
  require_positive(bad, "r_outer", g.r_outer);
  if (std::isfinite(g.r_interface) && std::isfinite(g.r_outer) && !(g.r_interface < g.r_outer)) {
    std::ostringstream os;
    os << "geometry: r_interface (" << g.r_interface << ") must be smaller than r_outer (" << g.r_outer << ")";
    bad.push_back(os.str());
  }
  if (!std::isfinite(g.x0[0]) || !std::isfinite(g.x0[1])) bad.emplace_back("x0 must be finite");

  if (!bad.empty()) throw ValidationError(std::move(bad));
  return {p, g};
}

GeometricConditionResult check_geometric_condition(const AnnulusGeometry& g, int n_theta) {
  if (n_theta < 8) throw std::invalid_argument("check_geometric_condition: n_theta must be >= 8");
  double max_val = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_theta; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / n_theta;
    const double c = std::cos(phi), s = std::sin(phi);
    // x = r (c, s), nu = -(c, s):  (x - x0).nu = x0.(c, s) - r
    const double q_nu = g.x0[0] * c + g.x0[1] * s - g.r_interface;
    max_val = std::max(max_val, q_nu);
  }
  // Equality counts as satisfied; absorb the rounding of cos/sin at grid angles.
  const double slack = 1e-14 * std::max(1.0, g.r_interface);
  return {max_val <= slack, std::abs(max_val) <= slack ? 0.0 : max_val};
}

double geometric_condition_analytic_max(const AnnulusGeometry& g) {
  return std::hypot(g.x0[0], g.x0[1]) - g.r_interface;
}

RegimeLabel classify_regime(const PhysicalParams& p, const AnnulusGeometry& g) {
  if (p.m_damp > 0.0) {
    if (p.rho_damp > 0.0) return RegimeLabel::ExponentialRhoDamped;
    if (p.gamma == 0.0 && p.mu > 0.0) return RegimeLabel::ExponentialThermalOnly;
    return RegimeLabel::StrongOnlyUnproven;
  }
  if (p.rho_damp > 0.0) {
    return check_geometric_condition(g).satisfied ? RegimeLabel::NotExponentialPolynomial
                                                  : RegimeLabel::NotExponentialGeometryFails;
  }
  return RegimeLabel::NotExponentialNoRate;
}

}  // namespace platemem
