// SPDX-License-Identifier: Apache-2.0
//
// Per-Fourier-mode radial discretization of the plate annulus and the
// membrane disk, and assembly of the generator pencil (M, A) together with
// the energy Gram matrix G.
//
// Every field is expanded as f(r) e^{i n theta}.  Grids are cell-centered, so
// no node sits on r = 0, r_interface or r_outer; boundary and transmission
// conditions are imposed through ghost layers which are then eliminated.
//
// Reduced coordinates.  The clamped condition u = 0 on the outer circle is
// enforced by eliminating the last plate node: with du/dr = 0 at the face, the
// second-order face value is (9 u_{N-1} - u_{N-2}) / 8, so u_{N-1} = u_{N-2}/9.
// The plate owns the interface value u_I = (9 u_0 - u_1) / 8, and the membrane
// reads it as its Dirichlet datum, which realizes u = v on the interface.
// The force balance on the interface and the Newton cooling law are natural
// conditions of the energy form, exactly as in the weak formulation.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "platemem/model.hpp"

namespace platemem {

using Index = Eigen::Index;

enum class Field { u, u_t, theta, v, v_t };
std::string_view to_string(Field f);

struct FieldBlock {
  Field field;
  Index offset = 0;
  Index size = 0;
};

/// Maps the pencil's rows/columns to fields.  Blocks are contiguous and in
/// ascending offset order.
struct DofLayout {
  std::vector<FieldBlock> blocks;

  Index dimension() const;
  const FieldBlock* find(Field f) const;
  std::vector<Index> indices(std::span<const Field> fields) const;
};

inline constexpr int kMinGridNodes = 2;
inline constexpr int kMinPencilNodes = 8;

struct RadialGrid {
  int mode = 0;
  double r_interface = 1.0;
  double r_outer = 2.0;
  double h_plate = 0.0;
  double h_mem = 0.0;
  std::vector<double> plate_nodes;       // cell centers in (r_interface, r_outer)
  std::vector<double> membrane_nodes;    // cell centers in (0, r_interface)
  std::vector<double> plate_weights;     // 2 pi r dr
  std::vector<double> membrane_weights;  // 2 pi r dr

  Index n_plate() const { return static_cast<Index>(plate_nodes.size()); }
  Index n_mem() const { return static_cast<Index>(membrane_nodes.size()); }
};

RadialGrid build_radial_grid(const AnnulusGeometry& g, int n_plate, int n_mem, int mode);

enum class Subdomain { plate, membrane };

inline constexpr int kGhostLayers = 2;

/// Conservative centered stencil of d2/dr2 + (1/r) d/dr - n^2/r^2 on the node
/// set extended by two ghost layers at each end.  Only interior rows are
/// populated; ghost rows are zero.
struct ExtendedLaplacian {
  Eigen::MatrixXd matrix;
  std::vector<double> nodes;  // ghost, ghost, interior..., ghost, ghost
  Index n_interior = 0;
};

ExtendedLaplacian laplacian_mode(const RadialGrid& grid, Subdomain domain);

/// Ghost eliminations and discrete operators shared by the pencil, the Gram
/// matrix and the dissipation channels.  Plate displacement/velocity live in
/// reduced coordinates (n_plate - 1 values); temperature uses all plate nodes.
struct DiscreteOperators {
  Index n_plate = 0;
  Index n_red = 0;  // n_plate - 1
  Index n_mem = 0;

  Eigen::VectorXd plate_weights;
  Eigen::VectorXd membrane_weights;

  Eigen::MatrixXd clamp;                // n_plate x n_red, reduced -> nodal plate values
  Eigen::RowVectorXd interface_trace;   // reduced plate -> u on the interface
  Eigen::RowVectorXd outer_theta_trace; // theta nodes -> theta on the outer circle

  Eigen::MatrixXd plate_extension;      // (n_plate+4) x n_red
  Eigen::MatrixXd thermal_extension;    // (n_plate+4) x n_plate
  Eigen::MatrixXd membrane_extension;   // (n_mem+4) x (n_red+n_mem), columns (u_red, v)

  Eigen::MatrixXd plate_laplacian;      // n_plate x n_red, Neumann at both faces
  Eigen::MatrixXd thermal_laplacian;    // n_plate x n_plate, Dirichlet inside / Robin outside
  Eigen::MatrixXd membrane_laplacian;   // n_mem x (n_red+n_mem)

  Eigen::MatrixXd plate_mass;           // Z^T W Z (diagonal)
  Eigen::MatrixXd plate_gradient_form;  // ||grad w||^2 on reduced plate coordinates
  Eigen::MatrixXd bending_form;         // ||Lap w||^2 on reduced plate coordinates
  Eigen::MatrixXd thermal_bulk_form;    // ||grad theta||^2
  Eigen::MatrixXd thermal_boundary_form;// 2 pi r_outer |theta_Gamma|^2
  Eigen::MatrixXd membrane_gradient_form;  // ||grad v||^2 over (u_red, v)
};

DiscreteOperators build_operators(const RadialGrid& grid, const PhysicalParams& p);

enum EnergyComponent : int { kBending = 0, kPlateKinetic, kRotational, kThermal, kMembranePotential, kMembraneKinetic };
enum DissipationChannel : int { kStructural = 0, kThermalBulk, kThermalBoundary, kMembraneDamping };

inline constexpr std::array<std::string_view, 6> kEnergyComponentNames = {
    "E_bend", "E_kin_plate", "E_rot", "E_thermal", "E_mem_pot", "E_mem_kin"};
inline constexpr std::array<std::string_view, 4> kDissipationChannelNames = {
    "D_struct", "D_thermal_bulk", "D_thermal_bdry", "D_membrane"};

/// Discrete generator pencil of one Fourier mode:  M w' = A w.
///
/// G realizes the energy inner product, H = G M^{-1} A is the generator in
/// energy form.  For assembled pencils H is built block by block, so its
/// symmetric part is exactly minus the sum of the dissipation forms.
struct ModePencil {
  int mode = 0;
  Eigen::MatrixXd M;
  Eigen::MatrixXd A;
  Eigen::MatrixXd G;
  Eigen::MatrixXd H;
  DofLayout layout;

  // Quadratic forms of the six energy terms (sum = G) and of the four
  // dissipation channels.  Empty for pencils built from raw matrices.
  std::vector<Eigen::MatrixXd> energy_forms;
  std::vector<Eigen::MatrixXd> dissipation_forms;

  std::optional<RadialGrid> grid;
  PhysicalParams params;

  Index dimension() const { return M.rows(); }

  /// Artificial pencil for tests and oracles; H is computed as G M^{-1} A.
  static ModePencil from_matrices(Eigen::MatrixXd M, Eigen::MatrixXd A, Eigen::MatrixXd G);
};

/// Energy Gram matrix in the pencil's dof order.
Eigen::MatrixXd gram_matrix(const PhysicalParams& p, const RadialGrid& grid, const DiscreteOperators& ops);

ModePencil assemble_mode_pencil(const PhysicalParams& p, const RadialGrid& grid);

/// Compression of the pencil onto the listed fields, the others frozen at
/// zero.  Used for the membrane-only and the thermally decoupled test systems.
ModePencil restrict_pencil(const ModePencil& pencil, std::span<const Field> keep);

/// Nodal values of one state on the full grids, including the values
/// reconstructed from eliminated ghosts and traces.
struct FullGridState {
  Eigen::VectorXcd u;        // n_plate nodes
  Eigen::VectorXcd u_t;
  Eigen::VectorXcd theta;
  Eigen::VectorXcd v;        // n_mem nodes
  Eigen::VectorXcd v_t;
  Eigen::VectorXcd u_ext;    // plate displacement on the extended node set
  Eigen::VectorXcd theta_ext;
  Eigen::VectorXcd v_ext;
  std::complex<double> u_interface;
  std::complex<double> u_outer;
  std::complex<double> theta_outer;
};

FullGridState reconstruct_full_grid(const ModePencil& pencil, const DiscreteOperators& ops,
                                    const Eigen::VectorXcd& coefficients);

}  // namespace platemem
