// SPDX-License-Identifier: Apache-2.0
//
// Regime experiments: simulate, fit decay laws, compare against the spectrum
// and the regime table, and return a verdict.

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "platemem/model.hpp"
#include "platemem/semigroup.hpp"
#include "platemem/spectral.hpp"

namespace platemem {

enum class DecayModel { exponential, polynomial };
std::string_view to_string(DecayModel m);

struct DecayFit {
  DecayModel model = DecayModel::exponential;
  // exponential: E ~ prefactor e^{-2 rate t}
  // polynomial:  ||w|| ~ prefactor t^{-rate}
  double rate = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  std::pair<double, double> window{0.0, 0.0};
  // Polynomial fits only: ||w0||_G + ||M^{-1} A w0||_G and prefactor divided by it.
  double graph_norm = 0.0;
  double normalized_prefactor = 0.0;
};

inline constexpr std::size_t kMinFitSamples = 8;

/// Line through (t, log E) over the trailing tail_fraction of the samples;
/// rate = -slope/2.  Throws std::invalid_argument on fewer than 8 samples or
/// nonpositive energies in the window.
DecayFit fit_exponential_rate(const SimulationTrace& trace, double tail_fraction = 0.5);

/// Line through (log t, log sqrt(2E)) over t in [t_end/10, t_end]; rate = -slope.
DecayFit fit_polynomial_rate(const SimulationTrace& trace);

/// Energy of a state made of several Fourier modes.  The modes are orthogonal
/// in the energy inner product, so energies, components, dissipation and
/// residuals add; the graph norm adds in quadrature per part.  All traces
/// must share the time grid.
SimulationTrace superpose(const std::vector<SimulationTrace>& traces);

/// Pencil-level energy identity and monotonicity of one trace.
struct DissipativityCheck {
  bool ok = true;
  double max_residual = 0.0;  // max |r_k| dt / E_0
  double max_increase = 0.0;  // max (E_{k+1} - E_k) / E_0
};
inline constexpr double kEnergyIdentityTol = 1e-10;
DissipativityCheck check_dissipativity(const SimulationTrace& trace);

enum class Verdict { consistent, inconsistent, inconclusive };
std::string_view to_string(Verdict v);
/// 0 consistent, 2 inconsistent, 3 inconclusive.
int exit_code(Verdict v);

/// t_end used when none is given: 50 for exponential labels, 500 otherwise.
double default_t_end(RegimeLabel label);

inline constexpr double kRelativeAgreement = 0.10;
inline constexpr double kShrinkFactor = 2.0;
inline constexpr double kMinPolynomialRSquared = 0.95;

struct LabSettings {
  Resolution resolution{32, 32};
  int mode_min = 0;
  int mode_max = 4;
  std::vector<InitialProfile> profiles{InitialProfile{ProfileKind::plate_bump, 0, 0},
                                       InitialProfile{ProfileKind::rough, 0, 0}};
  double dt = 0.0;     // 0: default_time_step
  double t_end = 0.0;  // 0: default_t_end
  double tail_fraction = 0.5;
  int scan_samples = 200;
  unsigned threads = 0;  // 0: worker_count()
};

struct ModeDecay {
  int mode = 0;
  DecayFit exponential;
  DissipativityCheck dissipativity;
  double final_energy = 0.0;
};

struct ProfileResult {
  std::string profile;
  bool smooth = true;  // bumps and pulses; rough data is not in D(A)
  std::vector<ModeDecay> modes;
  // Fits of the superposition of all simulated modes.
  DecayFit exponential;
  DecayFit polynomial;
  bool fits_ok = false;
};

struct ScanSummary {
  double lambda_max_coarse = 0.0;
  double lambda_max_fine = 0.0;
  double sup_coarse = 0.0;
  double sup_fine = 0.0;
  double growth_coarse = 0.0;
  double growth_fine = 0.0;
  double graph_growth_coarse = 0.0;
  double graph_growth_fine = 0.0;
};

struct RegimeReport {
  RegimeLabel predicted = RegimeLabel::StrongOnlyUnproven;
  GeometricConditionResult geometry;
  AbscissaSweep sweep;
  ScanSummary scan;
  std::vector<ProfileResult> profiles;
  double dt = 0.0;
  double t_end = 0.0;
  bool complete = false;
  Verdict verdict = Verdict::inconclusive;
  std::vector<std::string> explanation;
};

/// Classifies, sweeps the abscissa at two levels, scans the resolvent at both
/// levels, simulates every (profile, mode) pair and applies the verdict rules.
/// Failures of individual stages leave the report inconclusive.
RegimeReport run_regime_experiment(const PhysicalParams& p, const AnnulusGeometry& g, const LabSettings& settings);

/// The verdict rules on their own, for reports assembled elsewhere.
void apply_verdict(RegimeReport& report);

}  // namespace platemem
