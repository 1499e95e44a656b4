// SPDX-License-Identifier: Apache-2.0
//
// Physical parameters, concentric-disk geometry and the regime table of the
// thermoelastic plate / membrane transmission system.

#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace platemem {

/// Material and damping constants.  Defaults are the unit configuration
/// with an isothermal-free plate (mu = 1) and no damping.
struct PhysicalParams {
  double rho0 = 1.0;   // heat capacity
  double rho1 = 1.0;   // plate density
  double rho2 = 1.0;   // membrane density
  double beta0 = 1.0;  // heat conductivity
  double beta1 = 1.0;  // flexural rigidity
  double beta2 = 1.0;  // membrane tension
  double mu = 1.0;     // thermal coupling, 0 = isothermal plate
  double gamma = 0.0;  // rotational inertia
  double rho_damp = 0.0;  // structural plate damping
  double m_damp = 0.0;    // membrane damping
  double kappa = 1.0;     // Newton cooling constant on the outer boundary
};

/// Plate annulus r_interface < r < r_outer around the membrane disk
/// r < r_interface, both centered at the origin.
struct AnnulusGeometry {
  double r_interface = 1.0;
  double r_outer = 2.0;
  std::array<double, 2> x0{0.0, 0.0};  // reference point of the multiplier q = x - x0
};

enum class RegimeLabel {
  ExponentialRhoDamped,
  ExponentialThermalOnly,
  StrongOnlyUnproven,
  NotExponentialPolynomial,
  NotExponentialNoRate,
  NotExponentialGeometryFails,
};

std::string_view to_string(RegimeLabel label);
bool is_exponential(RegimeLabel label);
bool is_not_exponential(RegimeLabel label);

/// Thrown by validate_params; carries one message per violated invariant.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct ValidatedSetup {
  PhysicalParams params;
  AnnulusGeometry geometry;
};

/// Returns the pair unchanged or throws ValidationError naming every bad field.
ValidatedSetup validate_params(const PhysicalParams& p, const AnnulusGeometry& g);

struct GeometricConditionResult {
  bool satisfied = false;
  double max_q_dot_nu = 0.0;
};

inline constexpr int kDefaultConditionSamples = 256;

/// Samples q.nu on the interface circle, nu the outward normal of the plate
/// annulus (pointing to the center).  The condition is q.nu <= 0.
GeometricConditionResult check_geometric_condition(const AnnulusGeometry& g,
                                                   int n_theta = kDefaultConditionSamples);

/// Closed form of the sampled maximum for concentric disks: |x0| - r_interface.
double geometric_condition_analytic_max(const AnnulusGeometry& g);

RegimeLabel classify_regime(const PhysicalParams& p, const AnnulusGeometry& g);

}  // namespace platemem
