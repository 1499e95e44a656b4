// Radial grids, the mode Laplacian and the assembled pencil.

#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "platemem/discretization.hpp"
#include "platemem/spectral.hpp"
#include "support/cells.hpp"

using namespace platemem;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd apply_to(const ExtendedLaplacian& lap, double (*f)(double)) {
  VectorXd v(static_cast<Index>(lap.nodes.size()));
  for (std::size_t i = 0; i < lap.nodes.size(); ++i) v(static_cast<Index>(i)) = f(lap.nodes[i]);
  return (lap.matrix * v).segment(kGhostLayers, lap.n_interior);
}

double sq(double r) { return r * r; }
double one(double) { return 1.0; }

MatrixXd block(const ModePencil& pc, const MatrixXd& m, Field row, Field col) {
  const auto* a = pc.layout.find(row);
  const auto* b = pc.layout.find(col);
  REQUIRE(a);
  REQUIRE(b);
  return m.block(a->offset, b->offset, a->size, b->size);
}

}  // namespace

TEST_CASE("cell-centered nodes") {
  const auto g = build_radial_grid(AnnulusGeometry{}, 4, 2, 0);
  REQUIRE(g.plate_nodes.size() == 4);
  const double expect[] = {1.125, 1.375, 1.625, 1.875};
  for (int i = 0; i < 4; ++i) CHECK(g.plate_nodes[i] == doctest::Approx(expect[i]).epsilon(1e-15));
  CHECK(g.h_plate == doctest::Approx(0.25));
  REQUIRE(g.membrane_nodes.size() == 2);
  CHECK(g.membrane_nodes[0] == doctest::Approx(0.25));
  CHECK(g.membrane_nodes[1] == doctest::Approx(0.75));
}

TEST_CASE("quadrature weights integrate the area exactly") {
  for (int n : {2, 7, 64}) {
    const auto g = build_radial_grid(AnnulusGeometry{}, n, n, 0);
    double mem = 0.0, plate = 0.0;
    for (double w : g.membrane_weights) mem += w;
    for (double w : g.plate_weights) plate += w;
    CHECK(std::abs(mem - std::numbers::pi) <= 1e-12 * std::numbers::pi);
    CHECK(std::abs(plate - 3.0 * std::numbers::pi) <= 1e-12 * 3.0 * std::numbers::pi);
  }
}

TEST_CASE("grid rejects too few nodes") {
  CHECK_THROWS_AS(build_radial_grid(AnnulusGeometry{}, 1, 8, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_radial_grid(AnnulusGeometry{}, 8, 1, 0), std::invalid_argument);
}

TEST_CASE("mode Laplacian is exact on quadratics") {
  for (auto domain : {Subdomain::plate, Subdomain::membrane}) {
    const auto g0 = build_radial_grid(AnnulusGeometry{}, 10, 12, 0);
    const auto g2 = build_radial_grid(AnnulusGeometry{}, 10, 12, 2);
    const VectorXd a = apply_to(laplacian_mode(g0, domain), sq);
    const VectorXd b = apply_to(laplacian_mode(g2, domain), sq);
    const VectorXd c = apply_to(laplacian_mode(g0, domain), one);
    for (Index i = 0; i < a.size(); ++i) {
      CHECK(a(i) == doctest::Approx(4.0).epsilon(1e-11));
      CHECK(std::abs(b(i)) < 1e-10);
      CHECK(std::abs(c(i)) < 1e-10);
    }
  }
}

TEST_CASE("pencil blocks") {
  const auto grid = build_radial_grid(AnnulusGeometry{}, 8, 8, 1);
  PhysicalParams p;
  p.rho1 = 2.5;
  const auto pc = assemble_mode_pencil(p, grid);
  CHECK(block(pc, pc.M, Field::u_t, Field::u_t).isApprox(2.5 * MatrixXd::Identity(7, 7), 1e-14));
  CHECK(block(pc, pc.A, Field::v_t, Field::v_t).cwiseAbs().maxCoeff() == 0.0);
  CHECK((pc.G - pc.G.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("without rotational inertia the plate velocity norm is weighted L2") {
  const auto grid = build_radial_grid(AnnulusGeometry{}, 8, 8, 0);
  PhysicalParams p;
  p.rho1 = 3.0;
  const auto pc = assemble_mode_pencil(p, grid);
  const auto ops = build_operators(grid, p);
  const MatrixXd guu = block(pc, pc.G, Field::u_t, Field::u_t);
  CHECK(guu.isApprox(3.0 * ops.plate_mass, 1e-14));
  CHECK(ops.plate_mass.isDiagonal(0.0));

  p.gamma = 1.0;
  const auto pg = assemble_mode_pencil(p, grid);
  const MatrixXd gug = block(pg, pg.G, Field::u_t, Field::u_t);
  CHECK((gug - guu).isApprox(ops.plate_gradient_form, 1e-12));
}

TEST_CASE("symmetric part of the energy-form generator is minus the dissipation") {
  for (const auto& cell : cells::all()) {
    for (int mode : {0, 3}) {
      INFO(cell.name << " mode " << mode);
      const auto pc = assemble_mode_pencil(cell.params, build_radial_grid(cell.geometry, 12, 10, mode));
      MatrixXd d = MatrixXd::Zero(pc.dimension(), pc.dimension());
      for (const auto& f : pc.dissipation_forms) d += f;
      const MatrixXd sym = 0.5 * (pc.H + pc.H.transpose());
      CHECK((sym + d).cwiseAbs().maxCoeff() <= 1e-11 * pc.H.cwiseAbs().maxCoeff());
      MatrixXd e = MatrixXd::Zero(pc.dimension(), pc.dimension());
      for (const auto& f : pc.energy_forms) e += f;
      CHECK((e - pc.G).cwiseAbs().maxCoeff() <= 1e-12 * pc.G.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("Gram and mass matrices are positive definite") {
  for (const auto& cell : cells::all()) {
    for (int mode : {0, 1, 8, 16}) {
      INFO(cell.name << " mode " << mode);
      const auto pc = assemble_mode_pencil(cell.params, build_radial_grid(cell.geometry, 16, 16, mode));
      CHECK(Eigen::LLT<MatrixXd>(pc.G).info() == Eigen::Success);
      CHECK(Eigen::LLT<MatrixXd>(0.5 * (pc.M + pc.M.transpose())).info() == Eigen::Success);
    }
  }
}

TEST_CASE("pencil eigenvalues agree with a dense M^-1 A eigensolve") {
  const auto pc = assemble_mode_pencil(PhysicalParams{}, build_radial_grid(AnnulusGeometry{}, 8, 8, 0));
  const MatrixXd L = pc.M.fullPivLu().solve(pc.A);
  const Eigen::VectorXcd oracle = Eigen::EigenSolver<MatrixXd>(L).eigenvalues();
  const auto spec = eigenvalues(pc);
  REQUIRE(static_cast<Index>(spec.eigenvalues.size()) == oracle.size());
  std::vector<bool> used(spec.eigenvalues.size(), false);
  double worst = 0.0;
  for (Index i = 0; i < oracle.size(); ++i) {
    double best = 1e300;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < spec.eigenvalues.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(spec.eigenvalues[j] - oracle(i));
      if (d < best) best = d, arg = j;
    }
    used[arg] = true;
    worst = std::max(worst, best / std::max(1.0, std::abs(oracle(i))));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("restriction keeps only the listed fields") {
  PhysicalParams p;
  p.m_damp = 0.0;
  const auto pc = assemble_mode_pencil(p, build_radial_grid(AnnulusGeometry{}, 8, 10, 0));
  const Field keep[] = {Field::v, Field::v_t};
  const auto sub = restrict_pencil(pc, keep);
  CHECK(sub.dimension() == 20);
  CHECK(sub.layout.find(Field::u) == nullptr);
  CHECK(sub.layout.find(Field::theta) == nullptr);
}
