// Crank-Nicolson, energy bookkeeping, initial data and the exponential oracle.

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "platemem/semigroup.hpp"
#include "support/cells.hpp"
#include "support/oracles.hpp"

using namespace platemem;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

namespace {

ModePencil small_pencil(const PhysicalParams& p, int mode = 0, int n = 8) {
  return assemble_mode_pencil(p, build_radial_grid(AnnulusGeometry{}, n, n, mode));
}

ModePencil membrane_only(int n_mem, int mode = 0) {
  PhysicalParams p;
  p.m_damp = 0.0;
  const Field keep[] = {Field::v, Field::v_t};
  return restrict_pencil(assemble_mode_pencil(p, build_radial_grid(AnnulusGeometry{}, 8, n_mem, mode)), keep);
}

}  // namespace

TEST_CASE("zero state stays zero") {
  const auto pc = small_pencil(cells::with(1, 1, 0));
  StateVector s{0, VectorXcd::Zero(pc.dimension())};
  CHECK(step_crank_nicolson(pc, s, 1e-3).coefficients.norm() == 0.0);
  CHECK(energy(pc, s).total == 0.0);
  for (double d : dissipation(pc, s)) CHECK(d == 0.0);
}

TEST_CASE("zero generator leaves the state unchanged") {
  const auto pc = ModePencil::from_matrices(MatrixXd::Identity(5, 5), MatrixXd::Zero(5, 5), MatrixXd::Identity(5, 5));
  StateVector s{0, VectorXcd::LinSpaced(5, 1.0, 5.0)};
  CHECK((step_crank_nicolson(pc, s, 0.1).coefficients - s.coefficients).norm() == 0.0);
}

TEST_CASE("theta-only state carries only thermal energy") {
  PhysicalParams p;
  p.rho0 = 2.0;
  const auto pc = small_pencil(p);
  const auto* th = pc.layout.find(Field::theta);
  REQUIRE(th);
  StateVector s{0, VectorXcd::Zero(pc.dimension())};
  double expect = 0.0;
  for (Index i = 0; i < th->size; ++i) {
    const double v = std::sin(1.0 + static_cast<double>(i));
    s.coefficients(th->offset + i) = v;
    expect += 0.5 * p.rho0 * pc.grid->plate_weights[static_cast<std::size_t>(i)] * v * v;
  }
  const auto e = energy(pc, s);
  CHECK(e.total == doctest::Approx(expect).epsilon(1e-12));
  for (int c = 0; c < 6; ++c)
    if (c != kThermal) CHECK(e.components[c] == 0.0);
}

TEST_CASE("rotational energy vanishes without rotational inertia") {
  const auto pc = small_pencil(cells::with(1, 1, 0));
  const auto w = make_initial_data(pc, InitialProfile{ProfileKind::rough, 3, 0});
  CHECK(energy(pc, w).components[kRotational] == 0.0);
}

TEST_CASE("dissipation channels") {
  PhysicalParams p;  // rho = m = 0, mu = 1
  const auto pc = small_pencil(p);
  const auto w = make_initial_data(pc, InitialProfile{ProfileKind::rough, 1, 0});
  const auto d = dissipation(pc, w);
  CHECK(d[kStructural] == 0.0);
  CHECK(d[kMembraneDamping] == 0.0);

  // Linear temperature vanishing at the interface.
  const auto* th = pc.layout.find(Field::theta);
  StateVector s{0, VectorXcd::Zero(pc.dimension())};
  for (Index i = 0; i < th->size; ++i)
    s.coefficients(th->offset + i) = pc.grid->plate_nodes[static_cast<std::size_t>(i)] - pc.grid->r_interface;
  const auto dt = dissipation(pc, s);
  CHECK(dt[kThermalBulk] > 0.0);
  CHECK(dt[kThermalBoundary] > 0.0);
  double sum = 0.0;
  for (double c : dt) sum += c;
  CHECK(sum == doctest::Approx(pencil_dissipation(pc, s.coefficients)).epsilon(1e-12));
}

TEST_CASE("initial data has unit energy norm") {
  for (const auto& cell : cells::all()) {
    const auto pc = small_pencil(cell.params, 2, 12);
    for (auto kind : {ProfileKind::plate_bump, ProfileKind::membrane_bump, ProfileKind::thermal_pulse,
                      ProfileKind::rough}) {
      const auto w = make_initial_data(pc, InitialProfile{kind, 5, 0});
      CHECK(energy(pc, w).total == doctest::Approx(0.5).epsilon(1e-12));
    }
  }
}

TEST_CASE("plate bump excites neither the temperature nor the membrane velocity") {
  const auto pc = small_pencil(PhysicalParams{}, 0, 16);
  const auto w = make_initial_data(pc, InitialProfile{ProfileKind::plate_bump, 0, 0});
  for (Field f : {Field::theta, Field::v_t}) {
    const auto* b = pc.layout.find(f);
    CHECK(w.coefficients.segment(b->offset, b->size).norm() == 0.0);
  }
}

TEST_CASE("rough data is reproducible from its seed") {
  const auto pc = small_pencil(PhysicalParams{}, 1, 12);
  const auto a = make_initial_data(pc, parse_profile("rough(7)"));
  const auto b = make_initial_data(pc, parse_profile("rough(7)"));
  const auto c = make_initial_data(pc, parse_profile("rough(8)"));
  CHECK((a.coefficients - b.coefficients).norm() == 0.0);
  CHECK(energy_norm(pc, a.coefficients - c.coefficients) > 0.1);
  CHECK_THROWS_AS(parse_profile("smooth"), std::invalid_argument);
  CHECK_THROWS_AS(parse_profile("rough(x)"), std::invalid_argument);
}

TEST_CASE("matrix exponential reference") {
  const auto pc = small_pencil(cells::with(1, 1, 0));
  CHECK(matrix_exponential_reference(pc, 0.0).isApprox(MatrixXd::Identity(pc.dimension(), pc.dimension())));

  MatrixXd N = MatrixXd::Zero(4, 4);
  N(0, 2) = 3.0;
  N(1, 3) = -2.0;
  const auto nil = ModePencil::from_matrices(MatrixXd::Identity(4, 4), N, MatrixXd::Identity(4, 4));
  const MatrixXd e = matrix_exponential_reference(nil, 0.7);
  CHECK((e - (MatrixXd::Identity(4, 4) + 0.7 * N)).cwiseAbs().maxCoeff() <= 1e-15);

  // Random stable 6x6 generator against the series oracle.
  std::mt19937_64 rng(42);
  std::normal_distribution<double> nd;
  MatrixXd B(6, 6);
  for (Index i = 0; i < 36; ++i) B(i) = nd(rng);
  const MatrixXd L = 0.5 * (B - B.transpose()) - 0.3 * B.transpose() * B;
  const auto stable = ModePencil::from_matrices(MatrixXd::Identity(6, 6), L, MatrixXd::Identity(6, 6));
  const MatrixXd ref = oracle::expm_taylor(1.3 * L);
  CHECK((matrix_exponential_reference(stable, 1.3) - ref).cwiseAbs().maxCoeff() <= 1e-12);

  const auto big = small_pencil(PhysicalParams{}, 0, 128);
  CHECK_THROWS_AS(matrix_exponential_reference(big, 1.0), std::invalid_argument);
}

TEST_CASE("Crank-Nicolson converges at second order to the exponential") {
  const auto pc = small_pencil(cells::with(1, 1, 0));
  REQUIRE(pc.dimension() <= 40);
  const auto w0 = make_initial_data(pc, InitialProfile{ProfileKind::plate_bump, 0, 0});
  const VectorXcd exact = matrix_exponential_reference(pc, 1.0).cast<std::complex<double>>() * w0.coefficients;
  const VectorXcd exact2 =
      oracle::expm_taylor(pc.M.partialPivLu().solve(pc.A)).cast<std::complex<double>>() * w0.coefficients;
  CHECK((exact - exact2).norm() <= 1e-10 * exact.norm());

  double err[2];
  for (int level = 0; level < 2; ++level) {
    const int steps = 1000 << level;
    const CrankNicolsonStepper cn(pc, 1.0 / steps);
    VectorXcd w = w0.coefficients;
    for (int k = 0; k < steps; ++k) cn.step_in_place(w);
    err[level] = energy_norm(pc, w - exact);
  }
  const double order = std::log2(err[0] / err[1]);
  CHECK(order == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("trapezoidal energy identity holds step by step") {
  for (const auto& cell : cells::all()) {
    INFO(cell.name);
    const auto pc = small_pencil(cell.params, 1, 16);
    const auto w0 = make_initial_data(pc, InitialProfile{ProfileKind::rough, 2, 0});
    const auto tr = simulate(pc, w0, 1e-3, 0.5);
    REQUIRE(tr.residual.size() == tr.energy.size());
    for (std::size_t k = 1; k < tr.energy.size(); ++k) {
      CHECK(std::abs(tr.residual[k]) * tr.dt <= 1e-12 * tr.energy[0]);
      CHECK(tr.energy[k] <= tr.energy[k - 1] + 1e-14 * tr.energy[0]);
    }
  }
}

TEST_CASE("damped plate and membrane lose energy") {
  const auto pc = small_pencil(cells::with(1, 1, 0), 0, 16);
  const auto tr = simulate(pc, make_initial_data(pc, InitialProfile{ProfileKind::plate_bump, 0, 0}), 1e-3, 20.0);
  CHECK(tr.energy.back() < tr.energy.front());
  CHECK(tr.times.back() == doctest::Approx(20.0).epsilon(1e-14));
}

TEST_CASE("undamped membrane conserves energy") {
  const auto pc = membrane_only(32);
  StateVector w{0, VectorXcd::Zero(pc.dimension())};
  const auto* v = pc.layout.find(Field::v);
  for (Index i = 0; i < v->size; ++i) w.coefficients(v->offset + i) = std::cos(0.1 * static_cast<double>(i));
  const auto tr = simulate(pc, w, 1e-3, 1.0);
  REQUIRE(tr.energy.size() == 1001);
  for (double e : tr.energy) CHECK(std::abs(e - tr.energy[0]) <= 1e-10 * tr.energy[0]);
  // Cross-check the endpoint against the exponential.
  const VectorXcd ref = matrix_exponential_reference(pc, 1.0).cast<std::complex<double>>() * w.coefficients;
  CHECK(0.5 * energy_norm(pc, ref) * energy_norm(pc, ref) == doctest::Approx(tr.energy[0]).epsilon(1e-10));
}

TEST_CASE("default time step resolves the plate") {
  PhysicalParams p;
  AnnulusGeometry g;
  CHECK(default_time_step(p, g, 32, 32) == doctest::Approx(1.0 / (32.0 * 32.0 * 4.0)));
  p.beta1 = 4.0;
  CHECK(default_time_step(p, g, 32, 32) == doctest::Approx(1.0 / (32.0 * 32.0 * 16.0)));
}

TEST_CASE("simulate rejects bad arguments") {
  const auto pc = small_pencil(PhysicalParams{});
  const auto w = make_initial_data(pc, InitialProfile{});
  CHECK_THROWS_AS(simulate(pc, w, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(simulate(pc, w, 1e-3, -1.0), std::invalid_argument);
  StateVector wrong{0, VectorXcd::Zero(3)};
  CHECK_THROWS_AS(simulate(pc, wrong, 1e-3, 1.0), std::invalid_argument);
}
