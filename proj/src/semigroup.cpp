// SPDX-License-Identifier: Apache-2.0

#include "platemem/semigroup.hpp"

#include <Eigen/SparseCore>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace platemem {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Sparse = Eigen::SparseMatrix<double>;

double quadratic(const MatrixXd& Q, const VectorXcd& w) { return (w.adjoint() * Q * w)(0).real(); }
// Sum of the forms of the columns: a complex vector stored as [Re, Im].
double quadratic(const Sparse& Q, const MatrixXd& w) { return (w.array() * (Q * w).array()).sum(); }

void require_dimension(const ModePencil& pencil, const VectorXcd& w, std::string_view who) {
  if (w.size() != pencil.dimension()) {
    std::ostringstream os;
    os << who << ": state has " << w.size() << " coefficients, pencil dimension is " << pencil.dimension();
    throw std::invalid_argument(os.str());
  }
}

Sparse to_sparse(const MatrixXd& m) { return m.sparseView(0.0, 0.0); }

MatrixXd symmetric_part(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Smooth bump (1 - s^2)^4 on |s| < 1.
double bump(double r, double center, double half_width) {
  const double s = (r - center) / half_width;
  if (std::abs(s) >= 1.0) return 0.0;
  const double q = 1.0 - s * s;
  return q * q * q * q;
}

}  // namespace

double energy_norm(const ModePencil& pencil, const VectorXcd& w) {
  return std::sqrt(std::max(0.0, quadratic(pencil.G, w)));
}

EnergyBreakdown energy(const ModePencil& pencil, const StateVector& state) {
  require_dimension(pencil, state.coefficients, "energy");
  EnergyBreakdown out;
  out.total = 0.5 * quadratic(pencil.G, state.coefficients);
  for (std::size_t k = 0; k < pencil.energy_forms.size() && k < out.components.size(); ++k)
    out.components[k] = 0.5 * quadratic(pencil.energy_forms[k], state.coefficients);
  return out;
}

DissipationChannels dissipation(const ModePencil& pencil, const StateVector& state) {
  require_dimension(pencil, state.coefficients, "dissipation");
  DissipationChannels out{};
  for (std::size_t k = 0; k < pencil.dissipation_forms.size() && k < out.size(); ++k)
    out[k] = std::max(0.0, quadratic(pencil.dissipation_forms[k], state.coefficients));
  return out;
}

double pencil_dissipation(const ModePencil& pencil, const VectorXcd& w) {
  require_dimension(pencil, w, "pencil_dissipation");
  return -quadratic(symmetric_part(pencil.H), w);
}

CrankNicolsonStepper::CrankNicolsonStepper(const ModePencil& pencil, double dt) : dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("Crank-Nicolson: dt must be positive");
  rhs_ = pencil.M + 0.5 * dt * pencil.A;
  const MatrixXd lhs = pencil.M - 0.5 * dt * pencil.A;
  lhs_.compute(lhs);
  // PartialPivLU does not report singularity; check the pivots.
  const auto& lu = lhs_.matrixLU();
  const double scale = lhs.cwiseAbs().maxCoeff();
  for (Index i = 0; i < lu.rows(); ++i) {
    if (!(std::abs(lu(i, i)) > 1e-14 * scale))
      throw std::runtime_error("Crank-Nicolson: trapezoidal matrix M - dt/2 A is singular");
  }
}

void CrankNicolsonStepper::step_in_place(VectorXcd& w) const {
  if (w.size() != rhs_.rows()) throw std::invalid_argument("Crank-Nicolson: state dimension mismatch");
  MatrixXd parts(w.size(), 2);
  parts.col(0) = w.real();
  parts.col(1) = w.imag();
  const MatrixXd next = lhs_.solve(rhs_ * parts);
  w.real() = next.col(0);
  w.imag() = next.col(1);
}

MatrixXd CrankNicolsonStepper::propagator() const { return lhs_.solve(rhs_); }

StateVector CrankNicolsonStepper::step(const StateVector& state) const {
  StateVector out = state;
  step_in_place(out.coefficients);
  return out;
}

StateVector step_crank_nicolson(const ModePencil& pencil, const StateVector& state, double dt) {
  require_dimension(pencil, state.coefficients, "step_crank_nicolson");
  return CrankNicolsonStepper(pencil, dt).step(state);
}

double default_time_step(const PhysicalParams& p, const AnnulusGeometry& g, int n_plate, int n_mem) {
  const double h = std::min((g.r_outer - g.r_interface) / n_plate, g.r_interface / n_mem);
  return h * h / 4.0 / std::max(1.0, p.beta1 / p.rho1);
}

SimulationTrace simulate(const ModePencil& pencil, const StateVector& initial, double dt, double t_end) {
  require_dimension(pencil, initial.coefficients, "simulate");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("simulate: t_end must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("simulate: dt must be positive");
  const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  const double h = t_end / static_cast<double>(n_steps);
  const CrankNicolsonStepper stepper(pencil, h);
  // One dense propagator instead of a solve per step.
  const MatrixXd P = stepper.propagator();

  const Sparse G = to_sparse(pencil.G);
  const Sparse Hsym = to_sparse(symmetric_part(pencil.H));
  std::vector<Sparse> eforms, dforms;
  for (const auto& f : pencil.energy_forms) eforms.push_back(to_sparse(f));
  for (const auto& f : pencil.dissipation_forms) dforms.push_back(to_sparse(f));

  SimulationTrace trace;
  trace.mode = initial.mode;
  trace.dt = h;
  trace.times.reserve(n_steps + 1);
  trace.energy.reserve(n_steps + 1);
  trace.energy_components.reserve(n_steps + 1);
  trace.dissipation.reserve(n_steps + 1);
  trace.residual.reserve(n_steps + 1);
  trace.state_norm.reserve(n_steps + 1);

  // Real and imaginary parts as columns; a real initial state stays real.
  const VectorXcd& w0 = initial.coefficients;
  const Index cols = w0.imag().cwiseAbs().maxCoeff() > 0.0 ? 2 : 1;
  MatrixXd w(w0.size(), cols);
  w.col(0) = w0.real();
  if (cols == 2) w.col(1) = w0.imag();

  auto record = [&](double t, const MatrixXd& x, double e, double residual) {
    std::array<double, 6> comps{};
    for (std::size_t k = 0; k < eforms.size() && k < comps.size(); ++k) comps[k] = 0.5 * quadratic(eforms[k], x);
    DissipationChannels d{};
    for (std::size_t k = 0; k < dforms.size() && k < d.size(); ++k) d[k] = std::max(0.0, quadratic(dforms[k], x));
    trace.times.push_back(t);
    trace.energy.push_back(e);
    trace.energy_components.push_back(comps);
    trace.dissipation.push_back(d);
    trace.residual.push_back(residual);
    trace.state_norm.push_back(std::sqrt(2.0 * std::max(0.0, e)));
  };

  {
    const MatrixXd aw = pencil.M.partialPivLu().solve(pencil.A * w);
    trace.initial_norm = std::sqrt(std::max(0.0, quadratic(G, w)));
    trace.initial_generator_norm = std::sqrt(std::max(0.0, quadratic(G, aw)));
    trace.graph_norm_initial = trace.initial_norm + trace.initial_generator_norm;
  }
  record(0.0, w, 0.5 * quadratic(G, w), 0.0);
  trace.initial_energy = trace.energy.front();

  MatrixXd next(w.rows(), cols), mid(w.rows(), cols);
  for (std::size_t k = 1; k <= n_steps; ++k) {
    next.noalias() = P * w;
    mid = 0.5 * (w + next);
    w.swap(next);
    const double e_prev = trace.energy.back();
    const double e_next = 0.5 * quadratic(G, w);
    const double residual = (e_next - e_prev) / h - quadratic(Hsym, mid);
    record(static_cast<double>(k) * h, w, e_next, residual);
  }
  return trace;
}

MatrixXd matrix_exponential_reference(const ModePencil& pencil, double t) {
  if (pencil.dimension() > kMaxDenseExponentialDim) {
    std::ostringstream os;
    os << "matrix_exponential_reference: dimension " << pencil.dimension() << " exceeds the dense cap "
       << kMaxDenseExponentialDim;
    throw std::invalid_argument(os.str());
  }
  if (!(t >= 0.0)) throw std::invalid_argument("matrix_exponential_reference: t must be nonnegative");
  const MatrixXd L = pencil.M.partialPivLu().solve(pencil.A);
  return (t * L).exp();
}

InitialProfile parse_profile(const std::string& name, std::uint64_t default_seed) {
  InitialProfile p;
  p.seed = default_seed;
  if (name == "plate_bump") {
    p.kind = ProfileKind::plate_bump;
  } else if (name == "membrane_bump") {
    p.kind = ProfileKind::membrane_bump;
  } else if (name == "thermal_pulse") {
    p.kind = ProfileKind::thermal_pulse;
  } else if (name == "rough") {
    p.kind = ProfileKind::rough;
  } else if (name.starts_with("rough(") && name.ends_with(")")) {
    p.kind = ProfileKind::rough;
    const std::string digits = name.substr(6, name.size() - 7);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("invalid rough profile seed in '" + name + "'");
    p.seed = std::stoull(digits);
  } else {
    throw std::invalid_argument("unknown profile '" + name + "'");
  }
  return p;
}

std::string profile_name(const InitialProfile& profile) {
  switch (profile.kind) {
    case ProfileKind::plate_bump: return "plate_bump";
    case ProfileKind::membrane_bump: return "membrane_bump";
    case ProfileKind::thermal_pulse: return "thermal_pulse";
    case ProfileKind::rough: return "rough(" + std::to_string(profile.seed) + ")";
  }
  return "?";
}

StateVector make_initial_data(const ModePencil& pencil, const InitialProfile& profile) {
  if (!pencil.grid) throw std::invalid_argument("make_initial_data: pencil carries no grid");
  const RadialGrid& grid = *pencil.grid;
  StateVector state;
  state.mode = pencil.mode;
  state.coefficients = VectorXcd::Zero(pencil.dimension());

  const double r_mid = 0.5 * (grid.r_interface + grid.r_outer);
  const double half = 0.35 * (grid.r_outer - grid.r_interface);
  // Nodal injection into reduced coordinates: the dropped plate node is the
  // clamped one, where the bumps vanish identically.
  auto fill_plate = [&](Field f) {
    const auto* b = pencil.layout.find(f);
    if (!b) return;
    for (Index j = 0; j < b->size; ++j)
      state.coefficients(b->offset + j) = bump(grid.plate_nodes[static_cast<std::size_t>(j)], r_mid, half);
  };

  switch (profile.kind) {
    case ProfileKind::plate_bump:
      fill_plate(Field::u);
      break;
    case ProfileKind::thermal_pulse:
      fill_plate(Field::theta);
      break;
    case ProfileKind::membrane_bump:
      if (const auto* b = pencil.layout.find(Field::v)) {
        const double support = 0.7 * grid.r_interface;
        for (Index k = 0; k < b->size; ++k) {
          const double r = grid.membrane_nodes[static_cast<std::size_t>(k)];
          state.coefficients(b->offset + k) =
              std::pow(r / grid.r_interface, pencil.mode) * bump(r, 0.0, support);
        }
      }
      break;
    case ProfileKind::rough: {
      std::mt19937_64 rng(profile.seed);
      std::uniform_real_distribution<double> dist(-1.0, 1.0);
      // Complex nodal values: real parts first, then imaginary parts.
      MatrixXd x(state.coefficients.size(), 2);
      for (Index c = 0; c < 2; ++c)
        for (Index i = 0; i < x.rows(); ++i) x(i, c) = dist(rng);
      if (profile.smoothing > 0) {
        const Eigen::PartialPivLU<MatrixXd> shifted((pencil.M - pencil.A).eval());
        for (int k = 0; k < profile.smoothing; ++k) x = shifted.solve(pencil.M * x);
      }
      state.coefficients.real() = x.col(0);
      state.coefficients.imag() = x.col(1);
      break;
    }
  }

  const double norm = energy_norm(pencil, state.coefficients);
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw std::runtime_error("make_initial_data: profile '" + profile_name(profile) +
                             "' has zero energy on this pencil");
  state.coefficients /= norm;
  return state;
}

}  // namespace platemem
