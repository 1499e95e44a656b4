// SPDX-License-Identifier: Apache-2.0
//
// Time integration of M w' = A w, energy bookkeeping and the dense
// matrix-exponential reference propagator.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "platemem/discretization.hpp"

namespace platemem {

struct StateVector {
  int mode = 0;
  Eigen::VectorXcd coefficients;
};

struct EnergyBreakdown {
  double total = 0.0;
  std::array<double, 6> components{};  // order of kEnergyComponentNames
};

using DissipationChannels = std::array<double, 4>;  // order of kDissipationChannelNames

/// E = 1/2 w^* G w, with the six quadratic terms of the energy norm.
EnergyBreakdown energy(const ModePencil& pencil, const StateVector& state);

/// The four physical dissipation channels, each a nonnegative quadratic form.
DissipationChannels dissipation(const ModePencil& pencil, const StateVector& state);

/// -Re <M^{-1} A w, w>_G, evaluated through the symmetric part of H.
double pencil_dissipation(const ModePencil& pencil, const Eigen::VectorXcd& w);

/// Crank-Nicolson propagator (M - dt/2 A) w+ = (M + dt/2 A) w with the LU
/// factorization built once per (pencil, dt).
class CrankNicolsonStepper {
 public:
  CrankNicolsonStepper(const ModePencil& pencil, double dt);

  double dt() const noexcept { return dt_; }
  Index dimension() const noexcept { return rhs_.rows(); }

  StateVector step(const StateVector& state) const;
  void step_in_place(Eigen::VectorXcd& w) const;
  /// (M - dt/2 A)^{-1} (M + dt/2 A) as a dense matrix.
  Eigen::MatrixXd propagator() const;

 private:
  double dt_;
  Eigen::MatrixXd rhs_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lhs_;
};

StateVector step_crank_nicolson(const ModePencil& pencil, const StateVector& state, double dt);

struct SimulationTrace {
  int mode = 0;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<std::array<double, 6>> energy_components;
  std::vector<DissipationChannels> dissipation;
  // residual[k] = (E_k - E_{k-1})/dt + D(w_{k-1/2}) for k >= 1; residual[0] = 0.
  std::vector<double> residual;
  std::vector<double> state_norm;  // sqrt(2E)
  double graph_norm_initial = 0.0; // ||w0||_G + ||M^{-1} A w0||_G
  double initial_norm = 0.0;           // ||w0||_G
  double initial_generator_norm = 0.0; // ||M^{-1} A w0||_G
  double initial_energy = 0.0;
};

/// min(h_plate, h_mem)^2 / 4, divided by beta1/rho1 when that exceeds 1:
/// resolves the fastest plate branch.
double default_time_step(const PhysicalParams& p, const AnnulusGeometry& g, int n_plate, int n_mem);

/// Runs Crank-Nicolson from `initial` to t_end and records every step.  The
/// step is shrunk to t_end / ceil(t_end / dt) so that the grid lands on t_end.
SimulationTrace simulate(const ModePencil& pencil, const StateVector& initial, double dt, double t_end);

inline constexpr Index kMaxDenseExponentialDim = 400;

/// exp(t M^{-1} A) by scaling and squaring.  Test oracle only.
Eigen::MatrixXd matrix_exponential_reference(const ModePencil& pencil, double t);

enum class ProfileKind { plate_bump, membrane_bump, thermal_pulse, rough };

struct InitialProfile {
  ProfileKind kind = ProfileKind::plate_bump;
  std::uint64_t seed = 0;
  // Number of applications of (I - M^{-1}A)^{-1} to the rough profile; each
  // one raises the discrete smoothness class by one power of the generator.
  int smoothing = 0;
};

/// Parses "plate_bump", "membrane_bump", "thermal_pulse", "rough" or
/// "rough(<seed>)".  Throws std::invalid_argument on unknown names.
InitialProfile parse_profile(const std::string& name, std::uint64_t default_seed = 0);
std::string profile_name(const InitialProfile& profile);

/// Unit-energy (E = 1/2) initial state for the named profile.
StateVector make_initial_data(const ModePencil& pencil, const InitialProfile& profile);

/// sqrt(w^* G w)
double energy_norm(const ModePencil& pencil, const Eigen::VectorXcd& w);

}  // namespace platemem
