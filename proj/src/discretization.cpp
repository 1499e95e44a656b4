// SPDX-License-Identifier: Apache-2.0

#include "platemem/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace platemem {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Interior block of the extended stencil composed with a ghost extension.
MatrixXd eliminate_ghosts(const ExtendedLaplacian& lap, const MatrixXd& extension) {
  return lap.matrix.middleRows(kGhostLayers, lap.n_interior) * extension;
}

// sum_faces w_f |(f_{k+1} - f_k)/h|^2 + n^2 sum_k w_k |f_k|^2 / r_k^2 over
// the interior faces of a cell-centered grid (zero flux at both ends).
MatrixXd neumann_gradient_form(const std::vector<double>& nodes, const std::vector<double>& weights,
                               double first_face, double h, int mode) {
  const Index n = static_cast<Index>(nodes.size());
  MatrixXd form = MatrixXd::Zero(n, n);
  for (Index k = 0; k + 1 < n; ++k) {
    const double face = first_face + static_cast<double>(k + 1) * h;
    const double c = kTwoPi * face / h;  // weight 2 pi r_f h times 1/h^2
    form(k, k) += c;
    form(k + 1, k + 1) += c;
    form(k, k + 1) -= c;
    form(k + 1, k) -= c;
  }
  const double n2 = static_cast<double>(mode) * mode;
  for (Index k = 0; k < n; ++k) form(k, k) += n2 * weights[k] / (nodes[k] * nodes[k]);
  return form;
}

void require_pencil_resolution(const RadialGrid& grid) {
  if (grid.n_plate() < kMinPencilNodes || grid.n_mem() < kMinPencilNodes) {
    std::ostringstream os;
    os << "pencil assembly needs at least " << kMinPencilNodes << " plate and membrane nodes (got "
       << grid.n_plate() << ", " << grid.n_mem() << ")";
    throw std::invalid_argument(os.str());
  }
}

void place(MatrixXd& target, const FieldBlock& rows, const FieldBlock& cols, const MatrixXd& block) {
  target.block(rows.offset, cols.offset, rows.size, cols.size) += block;
}

MatrixXd diag_inverse(const VectorXd& w) { return w.cwiseInverse().asDiagonal(); }

void check_positive_definite(const MatrixXd& m, std::string_view what) {
  Eigen::LLT<MatrixXd> llt(m);
  const double threshold = 1e-13 * m.trace() / static_cast<double>(m.rows());
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    const auto& l = llt.matrixLLT();
    for (Index i = 0; i < m.rows() && ok; ++i) ok = l(i, i) * l(i, i) > threshold;
  }
  if (!ok) {
    std::ostringstream os;
    os << what << " is not positive definite (factorization failed); closure rows are inconsistent";
    throw std::runtime_error(os.str());
  }
}

}  // namespace

std::string_view to_string(Field f) {
  switch (f) {
    case Field::u: return "u";
    case Field::u_t: return "u_t";
    case Field::theta: return "theta";
    case Field::v: return "v";
    case Field::v_t: return "v_t";
  }
  return "?";
}

Index DofLayout::dimension() const {
  Index n = 0;
  for (const auto& b : blocks) n += b.size;
  return n;
}

const FieldBlock* DofLayout::find(Field f) const {
  for (const auto& b : blocks)
    if (b.field == f) return &b;
  return nullptr;
}

std::vector<Index> DofLayout::indices(std::span<const Field> fields) const {
  std::vector<Index> out;
  for (const auto& b : blocks) {
    if (std::find(fields.begin(), fields.end(), b.field) == fields.end()) continue;
    for (Index i = 0; i < b.size; ++i) out.push_back(b.offset + i);
  }
  return out;
}

RadialGrid build_radial_grid(const AnnulusGeometry& g, int n_plate, int n_mem, int mode) {
  if (n_plate < kMinGridNodes || n_mem < kMinGridNodes) {
    std::ostringstream os;
    os << "build_radial_grid: need at least " << kMinGridNodes << " nodes per subdomain (got n_plate="
       << n_plate << ", n_mem=" << n_mem << ")";
    throw std::invalid_argument(os.str());
  }
  validate_params(PhysicalParams{}, g);

  RadialGrid grid;
  grid.mode = std::abs(mode);
  grid.r_interface = g.r_interface;
  grid.r_outer = g.r_outer;
  grid.h_plate = (g.r_outer - g.r_interface) / n_plate;
  grid.h_mem = g.r_interface / n_mem;
  grid.plate_nodes.resize(n_plate);
  grid.plate_weights.resize(n_plate);
  for (int j = 0; j < n_plate; ++j) {
    const double r = g.r_interface + (j + 0.5) * grid.h_plate;
    grid.plate_nodes[j] = r;
    grid.plate_weights[j] = kTwoPi * r * grid.h_plate;
  }
  grid.membrane_nodes.resize(n_mem);
  grid.membrane_weights.resize(n_mem);
  for (int k = 0; k < n_mem; ++k) {
    const double r = (k + 0.5) * grid.h_mem;
    grid.membrane_nodes[k] = r;
    grid.membrane_weights[k] = kTwoPi * r * grid.h_mem;
  }
  return grid;
}

ExtendedLaplacian laplacian_mode(const RadialGrid& grid, Subdomain domain) {
  const bool plate = domain == Subdomain::plate;
  const auto& interior = plate ? grid.plate_nodes : grid.membrane_nodes;
  const double h = plate ? grid.h_plate : grid.h_mem;
  const double first_face = plate ? grid.r_interface : 0.0;
  const Index n = static_cast<Index>(interior.size());
  const double n2 = static_cast<double>(grid.mode) * grid.mode;

  ExtendedLaplacian lap;
  lap.n_interior = n;
  lap.nodes.resize(n + 2 * kGhostLayers);
  for (Index e = 0; e < n + 2 * kGhostLayers; ++e)
    lap.nodes[e] = first_face + (static_cast<double>(e - kGhostLayers) + 0.5) * h;
  lap.matrix = MatrixXd::Zero(n + 2 * kGhostLayers, n + 2 * kGhostLayers);
  for (Index j = 0; j < n; ++j) {
    const Index e = j + kGhostLayers;
    const double r = interior[j];
    const double face_lo = first_face + static_cast<double>(j) * h;
    const double face_hi = face_lo + h;
    const double c_lo = face_lo / (r * h * h);
    const double c_hi = face_hi / (r * h * h);
    lap.matrix(e, e - 1) = c_lo;
    lap.matrix(e, e + 1) = c_hi;
    lap.matrix(e, e) = -(c_lo + c_hi) - n2 / (r * r);
  }
  return lap;
}

DiscreteOperators build_operators(const RadialGrid& grid, const PhysicalParams& p) {
  require_pencil_resolution(grid);
  const Index N = grid.n_plate();
  const Index R = N - 1;
  const Index Mm = grid.n_mem();
  const double h = grid.h_plate;
  const double hm = grid.h_mem;

  DiscreteOperators ops;
  ops.n_plate = N;
  ops.n_red = R;
  ops.n_mem = Mm;
  ops.plate_weights = Eigen::Map<const VectorXd>(grid.plate_weights.data(), N);
  ops.membrane_weights = Eigen::Map<const VectorXd>(grid.membrane_weights.data(), Mm);

  // Clamp: (9 u_{N-1} - u_{N-2}) / 8 = 0 at the outer face.
  ops.clamp = MatrixXd::Zero(N, R);
  ops.clamp.topRows(R).setIdentity();
  ops.clamp(N - 1, R - 1) = 1.0 / 9.0;

  ops.interface_trace = Eigen::RowVectorXd::Zero(R);
  ops.interface_trace(0) = 9.0 / 8.0;
  ops.interface_trace(1) = -1.0 / 8.0;

  // Robin ghost: (t_N - t_{N-1})/h + kappa (t_N + t_{N-1})/2 = 0.
  const double robin_den = 2.0 + p.kappa * h;
  if (!(std::abs(robin_den) > 0.0)) throw std::runtime_error("singular Robin closure row at r_outer");
  const double robin_ghost = (2.0 - p.kappa * h) / robin_den;
  ops.outer_theta_trace = Eigen::RowVectorXd::Zero(N);
  ops.outer_theta_trace(N - 1) = 2.0 / robin_den;

  // Plate: even reflection across both faces (du/dr = 0), clamp at the outer end.
  ops.plate_extension = MatrixXd::Zero(N + 4, R);
  ops.plate_extension.middleRows(kGhostLayers, N) = ops.clamp;
  ops.plate_extension.row(1) = ops.clamp.row(0);
  ops.plate_extension.row(0) = ops.clamp.row(1);
  ops.plate_extension.row(N + 2) = ops.clamp.row(N - 1);
  ops.plate_extension.row(N + 3) = ops.clamp.row(N - 2);

  // Temperature: odd reflection at the interface (theta = 0), Robin outside.
  ops.thermal_extension = MatrixXd::Zero(N + 4, N);
  ops.thermal_extension.middleRows(kGhostLayers, N).setIdentity();
  ops.thermal_extension(1, 0) = -1.0;
  ops.thermal_extension(0, 1) = -1.0;
  ops.thermal_extension(N + 2, N - 1) = robin_ghost;
  ops.thermal_extension.row(N + 3) = 2.0 * ops.thermal_extension.row(N + 2);
  ops.thermal_extension(N + 3, N - 1) -= 1.0;

  // Membrane: parity at the origin, odd reflection about the interface value.
  const double parity = grid.mode == 0 ? 1.0 : -1.0;
  ops.membrane_extension = MatrixXd::Zero(Mm + 4, R + Mm);
  ops.membrane_extension.block(kGhostLayers, R, Mm, Mm).setIdentity();
  ops.membrane_extension(1, R + 0) = parity;
  ops.membrane_extension(0, R + 1) = parity;
  ops.membrane_extension.block(Mm + 2, 0, 1, R) = 2.0 * ops.interface_trace;
  ops.membrane_extension(Mm + 2, R + Mm - 1) = -1.0;
  ops.membrane_extension.block(Mm + 3, 0, 1, R) = 2.0 * ops.interface_trace;
  ops.membrane_extension(Mm + 3, R + Mm - 2) = -1.0;

  const auto plate_lap = laplacian_mode(grid, Subdomain::plate);
  const auto mem_lap = laplacian_mode(grid, Subdomain::membrane);
  ops.plate_laplacian = eliminate_ghosts(plate_lap, ops.plate_extension);
  ops.thermal_laplacian = eliminate_ghosts(plate_lap, ops.thermal_extension);
  ops.membrane_laplacian = eliminate_ghosts(mem_lap, ops.membrane_extension);

  const auto W = ops.plate_weights.asDiagonal();
  ops.plate_mass = ops.clamp.transpose() * W * ops.clamp;
  const MatrixXd plate_grad_full =
      neumann_gradient_form(grid.plate_nodes, grid.plate_weights, grid.r_interface, h, grid.mode);
  ops.plate_gradient_form = ops.clamp.transpose() * plate_grad_full * ops.clamp;
  ops.bending_form = ops.plate_laplacian.transpose() * W * ops.plate_laplacian;
  ops.bending_form = 0.5 * (ops.bending_form + ops.bending_form.transpose()).eval();

  // Temperature: interior faces, Dirichlet half edge at r_interface, Robin
  // half edge at r_outer; the Newton term is kept as a separate channel.
  ops.thermal_bulk_form =
      neumann_gradient_form(grid.plate_nodes, grid.plate_weights, grid.r_interface, h, grid.mode);
  ops.thermal_bulk_form(0, 0) += kTwoPi * grid.r_interface * 2.0 / h;
  {
    // (theta_Gamma - theta_{N-1}) / (h/2), weight 2 pi r_outer h/2
    const double slope = (ops.outer_theta_trace(N - 1) - 1.0) / (0.5 * h);
    ops.thermal_bulk_form(N - 1, N - 1) += kTwoPi * grid.r_outer * 0.5 * h * slope * slope;
  }
  ops.thermal_boundary_form =
      kTwoPi * grid.r_outer * ops.outer_theta_trace.transpose() * ops.outer_theta_trace;

  // Membrane gradient over (u_red, v): interior faces, the half edge to the
  // interface value owned by the plate, and the angular term.
  ops.membrane_gradient_form = MatrixXd::Zero(R + Mm, R + Mm);
  ops.membrane_gradient_form.bottomRightCorner(Mm, Mm) =
      neumann_gradient_form(grid.membrane_nodes, grid.membrane_weights, 0.0, hm, grid.mode);
  {
    Eigen::RowVectorXd half_edge = Eigen::RowVectorXd::Zero(R + Mm);
    half_edge.head(R) = ops.interface_trace / (0.5 * hm);
    half_edge(R + Mm - 1) = -1.0 / (0.5 * hm);
    ops.membrane_gradient_form +=
        kTwoPi * grid.r_interface * 0.5 * hm * half_edge.transpose() * half_edge;
  }
  return ops;
}

ModePencil ModePencil::from_matrices(MatrixXd M, MatrixXd A, MatrixXd G) {
  if (M.rows() != M.cols() || A.rows() != M.rows() || A.cols() != M.cols() || G.rows() != M.rows() ||
      G.cols() != M.cols())
    throw std::invalid_argument("ModePencil::from_matrices: dimension mismatch");
  ModePencil pencil;
  pencil.H = G * M.partialPivLu().solve(A);
  pencil.M = std::move(M);
  pencil.A = std::move(A);
  pencil.G = std::move(G);
  pencil.layout.blocks = {{Field::u, 0, pencil.M.rows()}};
  return pencil;
}

namespace {

DofLayout full_layout(const DiscreteOperators& ops) {
  DofLayout layout;
  Index off = 0;
  auto add = [&](Field f, Index n) {
    layout.blocks.push_back({f, off, n});
    off += n;
  };
  add(Field::u, ops.n_red);
  add(Field::u_t, ops.n_red);
  add(Field::theta, ops.n_plate);
  add(Field::v, ops.n_mem);
  add(Field::v_t, ops.n_mem);
  return layout;
}

// The membrane gradient form lives on (u_red, v); scatter it into the full
// dof order.
void place_displacement_form(MatrixXd& target, const DofLayout& layout, const MatrixXd& form, Index n_red) {
  const auto& bu = *layout.find(Field::u);
  const auto& bv = *layout.find(Field::v);
  const Index nm = bv.size;
  place(target, bu, bu, form.topLeftCorner(n_red, n_red));
  place(target, bu, bv, form.topRightCorner(n_red, nm));
  place(target, bv, bu, form.bottomLeftCorner(nm, n_red));
  place(target, bv, bv, form.bottomRightCorner(nm, nm));
}

}  // namespace

MatrixXd gram_matrix(const PhysicalParams& p, const RadialGrid& grid, const DiscreteOperators& ops) {
  (void)grid;
  const DofLayout layout = full_layout(ops);
  const Index dim = layout.dimension();
  const auto& bu = *layout.find(Field::u);
  const auto& but = *layout.find(Field::u_t);
  const auto& bth = *layout.find(Field::theta);
  const auto& bvt = *layout.find(Field::v_t);

  MatrixXd G = MatrixXd::Zero(dim, dim);
  place(G, bu, bu, p.beta1 * ops.bending_form);
  place_displacement_form(G, layout, p.beta2 * ops.membrane_gradient_form, ops.n_red);
  place(G, but, but, p.rho1 * ops.plate_mass + p.gamma * ops.plate_gradient_form);
  place(G, bth, bth, p.rho0 * MatrixXd(ops.plate_weights.asDiagonal()));
  place(G, bvt, bvt, p.rho2 * MatrixXd(ops.membrane_weights.asDiagonal()));
  return G;
}

ModePencil assemble_mode_pencil(const PhysicalParams& p, const RadialGrid& grid) {
  validate_params(p, AnnulusGeometry{grid.r_interface, grid.r_outer, {0.0, 0.0}});
  const DiscreteOperators ops = build_operators(grid, p);
  const DofLayout layout = full_layout(ops);
  const Index dim = layout.dimension();
  const Index R = ops.n_red;
  const Index Nm = ops.n_mem;
  const auto& bu = *layout.find(Field::u);
  const auto& but = *layout.find(Field::u_t);
  const auto& bth = *layout.find(Field::theta);
  const auto& bv = *layout.find(Field::v);
  const auto& bvt = *layout.find(Field::v_t);

  const MatrixXd Wp = ops.plate_weights.asDiagonal();
  const MatrixXd Wm = ops.membrane_weights.asDiagonal();
  const VectorXd w_red = ops.plate_mass.diagonal();
  const MatrixXd Wred_inv = diag_inverse(w_red);
  const MatrixXd Wp_inv = diag_inverse(ops.plate_weights);
  const MatrixXd Wm_inv = diag_inverse(ops.membrane_weights);

  // Stiffness over (u_red, v).
  MatrixXd K = p.beta2 * ops.membrane_gradient_form;
  K.topLeftCorner(R, R) += p.beta1 * ops.bending_form;
  const MatrixXd K_uu = K.topLeftCorner(R, R);
  const MatrixXd K_uv = K.topRightCorner(R, Nm);
  const MatrixXd K_vu = K.bottomLeftCorner(Nm, R);
  const MatrixXd K_vv = K.bottomRightCorner(Nm, Nm);

  const MatrixXd plate_inertia = p.rho1 * ops.plate_mass + p.gamma * ops.plate_gradient_form;
  const MatrixXd plate_damping = p.rho_damp * ops.plate_gradient_form;
  const MatrixXd heat = p.beta0 * (ops.thermal_bulk_form + ops.thermal_boundary_form);
  const MatrixXd coupling = Wp * ops.plate_laplacian;  // <Lap w2, phi3>

  ModePencil pencil;
  pencil.mode = grid.mode;
  pencil.layout = layout;
  pencil.grid = grid;
  pencil.params = p;

  pencil.M = MatrixXd::Zero(dim, dim);
  place(pencil.M, bu, bu, MatrixXd::Identity(R, R));
  place(pencil.M, but, but, Wred_inv * plate_inertia);
  place(pencil.M, bth, bth, p.rho0 * MatrixXd::Identity(ops.n_plate, ops.n_plate));
  place(pencil.M, bv, bv, MatrixXd::Identity(Nm, Nm));
  place(pencil.M, bvt, bvt, p.rho2 * MatrixXd::Identity(Nm, Nm));

  pencil.A = MatrixXd::Zero(dim, dim);
  place(pencil.A, bu, but, MatrixXd::Identity(R, R));
  place(pencil.A, but, bu, -Wred_inv * K_uu);
  place(pencil.A, but, but, -Wred_inv * plate_damping);
  place(pencil.A, but, bth, -p.mu * Wred_inv * coupling.transpose());
  place(pencil.A, but, bv, -Wred_inv * K_uv);
  place(pencil.A, bth, but, p.mu * ops.plate_laplacian);
  place(pencil.A, bth, bth, -Wp_inv * heat);
  place(pencil.A, bv, bvt, MatrixXd::Identity(Nm, Nm));
  place(pencil.A, bvt, bu, -Wm_inv * K_vu);
  place(pencil.A, bvt, bv, -Wm_inv * K_vv);
  place(pencil.A, bvt, bvt, -p.m_damp * MatrixXd::Identity(Nm, Nm));

  pencil.G = gram_matrix(p, grid, ops);
  check_positive_definite(pencil.G, "energy Gram matrix");
  check_positive_definite(plate_inertia, "plate inertia block of M");

  pencil.H = MatrixXd::Zero(dim, dim);
  place(pencil.H, bu, but, K_uu);
  place(pencil.H, bu, bvt, K_uv);
  place(pencil.H, bv, but, K_vu);
  place(pencil.H, bv, bvt, K_vv);
  place(pencil.H, but, bu, -K_uu);
  place(pencil.H, but, bv, -K_uv);
  place(pencil.H, but, but, -plate_damping);
  place(pencil.H, but, bth, -p.mu * coupling.transpose());
  place(pencil.H, bth, but, p.mu * coupling);
  place(pencil.H, bth, bth, -heat);
  place(pencil.H, bvt, bu, -K_vu);
  place(pencil.H, bvt, bv, -K_vv);
  place(pencil.H, bvt, bvt, -p.m_damp * Wm);

  pencil.energy_forms.assign(6, MatrixXd::Zero(dim, dim));
  place(pencil.energy_forms[kBending], bu, bu, p.beta1 * ops.bending_form);
  place(pencil.energy_forms[kPlateKinetic], but, but, p.rho1 * ops.plate_mass);
  place(pencil.energy_forms[kRotational], but, but, p.gamma * ops.plate_gradient_form);
  place(pencil.energy_forms[kThermal], bth, bth, p.rho0 * Wp);
  place_displacement_form(pencil.energy_forms[kMembranePotential], layout, p.beta2 * ops.membrane_gradient_form, R);
  place(pencil.energy_forms[kMembraneKinetic], bvt, bvt, p.rho2 * Wm);

  pencil.dissipation_forms.assign(4, MatrixXd::Zero(dim, dim));
  place(pencil.dissipation_forms[kStructural], but, but, plate_damping);
  place(pencil.dissipation_forms[kThermalBulk], bth, bth, p.beta0 * ops.thermal_bulk_form);
  place(pencil.dissipation_forms[kThermalBoundary], bth, bth, p.beta0 * ops.thermal_boundary_form);
  place(pencil.dissipation_forms[kMembraneDamping], bvt, bvt, p.m_damp * Wm);
  return pencil;
}

ModePencil restrict_pencil(const ModePencil& pencil, std::span<const Field> keep) {
  const std::vector<Index> idx = pencil.layout.indices(keep);
  if (idx.empty()) throw std::invalid_argument("restrict_pencil: no field kept");
  std::vector<Index> dropped;
  {
    std::vector<bool> kept(pencil.dimension(), false);
    for (Index i : idx) kept[i] = true;
    for (Index i = 0; i < pencil.dimension(); ++i)
      if (!kept[i]) dropped.push_back(i);
  }
  auto sub = [](const MatrixXd& m, const std::vector<Index>& r, const std::vector<Index>& c) {
    return MatrixXd(m(r, c));
  };

  ModePencil out;
  out.mode = pencil.mode;
  out.grid = pencil.grid;
  out.params = pencil.params;
  out.M = sub(pencil.M, idx, idx);
  out.A = sub(pencil.A, idx, idx);
  out.G = sub(pencil.G, idx, idx);
  // (G M^-1 A)_rr = G_rr (M^-1 A)_rr + G_rd (M^-1 A)_dr.  M is block diagonal
  // by field, so (M^-1 A)_rr = M_rr^-1 A_rr and the correction removes the
  // contribution of the frozen fields.
  out.H = sub(pencil.H, idx, idx);
  if (!dropped.empty()) {
    const MatrixXd Y = pencil.M.partialPivLu().solve(pencil.A);
    const MatrixXd correction = sub(pencil.G, idx, dropped) * sub(Y, dropped, idx);
    if (correction.norm() > 0.0) out.H -= correction;
  }
  for (const auto& f : pencil.energy_forms) out.energy_forms.push_back(sub(f, idx, idx));
  for (const auto& f : pencil.dissipation_forms) out.dissipation_forms.push_back(sub(f, idx, idx));

  Index off = 0;
  for (const auto& b : pencil.layout.blocks) {
    if (std::find(keep.begin(), keep.end(), b.field) == keep.end()) continue;
    out.layout.blocks.push_back({b.field, off, b.size});
    off += b.size;
  }
  return out;
}

FullGridState reconstruct_full_grid(const ModePencil& pencil, const DiscreteOperators& ops,
                                    const Eigen::VectorXcd& coefficients) {
  if (coefficients.size() != pencil.dimension())
    throw std::invalid_argument("reconstruct_full_grid: state dimension mismatch");
  auto block = [&](Field f, Index n) -> Eigen::VectorXcd {
    if (const auto* b = pencil.layout.find(f)) return coefficients.segment(b->offset, b->size);
    return Eigen::VectorXcd::Zero(n);
  };
  const Eigen::VectorXcd u_red = block(Field::u, ops.n_red);
  const Eigen::VectorXcd ut_red = block(Field::u_t, ops.n_red);

  FullGridState s;
  s.u = ops.clamp.cast<std::complex<double>>() * u_red;
  s.u_t = ops.clamp.cast<std::complex<double>>() * ut_red;
  s.theta = block(Field::theta, ops.n_plate);
  s.v = block(Field::v, ops.n_mem);
  s.v_t = block(Field::v_t, ops.n_mem);
  s.u_ext = ops.plate_extension.cast<std::complex<double>>() * u_red;
  s.theta_ext = ops.thermal_extension.cast<std::complex<double>>() * s.theta;
  Eigen::VectorXcd uv(ops.n_red + ops.n_mem);
  uv << u_red, s.v;
  s.v_ext = ops.membrane_extension.cast<std::complex<double>>() * uv;
  s.u_interface = (ops.interface_trace.cast<std::complex<double>>() * u_red)(0);
  const Index N = ops.n_plate;
  s.u_outer = (9.0 * s.u(N - 1) - s.u(N - 2)) / 8.0;
  s.theta_outer = (ops.outer_theta_trace.cast<std::complex<double>>() * s.theta)(0);
  return s;
}

}  // namespace platemem
