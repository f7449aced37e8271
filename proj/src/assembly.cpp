#include <algorithm>
#include <limits>

#include "biphasic/errors.hpp"
#include "biphasic/solver.hpp"

namespace biphasic {

ElementInput gather_element(const Mesh& mesh, const DofMap& dofs, int element, const SolutionState& state,
                            const SolutionState& prev) {
  const auto& el = mesh.elements[static_cast<std::size_t>(element)];
  ElementInput in;
  in.X = mesh.node_coords(element);
  in.element_id = element;
  for (std::size_t a = 0; a < 10; ++a) {
    const int base = dofs.u_dof(el.nodes[a], 0);
    in.u.segment<3>(3 * static_cast<int>(a)) = state.u.segment<3>(base);
    in.u_prev.segment<3>(3 * static_cast<int>(a)) = prev.u.segment<3>(base);
  }
  for (std::size_t a = 0; a < 4; ++a) in.p(static_cast<int>(a)) = state.p(dofs.pressure_index(el.nodes[a]));
  return in;
}

std::vector<double> element_tau(const Mesh& mesh, double k, double dt) {
  std::vector<double> tau(static_cast<std::size_t>(mesh.num_elements()));
  for (int e = 0; e < mesh.num_elements(); ++e)
    tau[static_cast<std::size_t>(e)] = tau_gls(circumsphere_radius(mesh.corner_coords(e)), k, dt);
  return tau;
}

Assembler::Assembler(const Mesh& mesh, const DofMap& dofs) : mesh_(mesh), dofs_(dofs) {
  const int n = dofs.size();
  element_dofs_.reserve(static_cast<std::size_t>(mesh.num_elements()));
  h_.reserve(static_cast<std::size_t>(mesh.num_elements()));
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(mesh.num_elements()) * 34 * 34);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto d = dofs.element_dofs(mesh.elements[static_cast<std::size_t>(e)]);
    element_dofs_.push_back(d);
    h_.push_back(circumsphere_radius(mesh.corner_coords(e)));
    for (int r : d)
      for (int c : d) entries.emplace_back(r, c, 0.0);
  }
  pattern_.resize(n, n);
  pattern_.setFromTriplets(entries.begin(), entries.end());
  pattern_.makeCompressed();
}

GlobalSystem Assembler::assemble(const SolutionState& state, const SolutionState& prev, const PhysicalModel& model,
                                 double dt) const {
  if (state.u.size() != dofs_.num_u() || state.p.size() != dofs_.num_p() || prev.u.size() != dofs_.num_u())
    throw ConfigError("solution state does not match the dof map");

  GlobalSystem sys;
  sys.matrix = pattern_;
  sys.matrix.coeffs().setZero();
  sys.rhs = Eigen::VectorXd::Zero(dofs_.size());
  sys.stats.min_J = std::numeric_limits<double>::infinity();
  sys.stats.max_J = -std::numeric_limits<double>::infinity();
  sys.stats.tau_min = std::numeric_limits<double>::infinity();
  sys.stats.tau_max = -std::numeric_limits<double>::infinity();

  const int* outer = sys.matrix.outerIndexPtr();
  const int* inner = sys.matrix.innerIndexPtr();
  double* values = sys.matrix.valuePtr();
  auto entry = [&](int row, int col) -> double& {
    const int* first = inner + outer[col];
    const int* last = inner + outer[col + 1];
    return values[std::lower_bound(first, last, row) - inner];
  };

  Eigen::Matrix<double, 34, 34> ke;
  Eigen::Matrix<double, 34, 1> re;
  for (int e = 0; e < mesh_.num_elements(); ++e) {
    GlsParams gls;
    gls.enabled = model.gls_enabled;
    if (gls.enabled) {
      gls.tau = tau_gls(h_[static_cast<std::size_t>(e)], model.permeability.k, dt);
      sys.stats.tau_min = std::min(sys.stats.tau_min, gls.tau);
      sys.stats.tau_max = std::max(sys.stats.tau_max, gls.tau);
    }
    const ElementInput in = gather_element(mesh_, dofs_, e, state, prev);
    const ElementMatrices m = element_matrices(in, model.material, model.permeability, gls, dt);
    sys.stats.min_J = std::min(sys.stats.min_J, m.min_J);
    sys.stats.max_J = std::max(sys.stats.max_J, m.max_J);

    ke.topLeftCorner<30, 30>() = m.k_uu + m.k_uu_gls;
    ke.topRightCorner<30, 4>() = m.k_up;
    ke.bottomLeftCorner<4, 30>() = m.k_up.transpose();
    ke.bottomRightCorner<4, 4>() = -dt * m.k_pp;
    re.head<30>() = -(m.f_int_u + m.f_gls_u);
    re.tail<4>() = dt * m.f_int_p;

    const auto& d = element_dofs_[static_cast<std::size_t>(e)];
    for (int j = 0; j < 34; ++j) {
      for (int i = 0; i < 34; ++i) entry(d[static_cast<std::size_t>(i)], d[static_cast<std::size_t>(j)]) += ke(i, j);
      sys.rhs(d[static_cast<std::size_t>(j)]) += re(j);
    }
  }
  if (!model.gls_enabled) sys.stats.tau_min = sys.stats.tau_max = 0.0;
  return sys;
}

GlobalSystem assemble(const Mesh& mesh, const SolutionState& state, const SolutionState& prev,
                      const PhysicalModel& model, double dt) {
  const DofMap dofs(mesh);
  const Assembler assembler(mesh, dofs);
  return assembler.assemble(state, prev, model, dt);
}

void apply_dirichlet(SparseMatrix& matrix, Eigen::VectorXd& rhs, const ConstraintSet& constraints) {
  const auto n = static_cast<std::size_t>(matrix.rows());
  std::vector<char> fixed(n, 0);
  Eigen::VectorXd value = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (const auto& [dof, v] : constraints) {
    if (dof < 0 || static_cast<std::size_t>(dof) >= n)
      throw ConfigError("constraint on dof " + std::to_string(dof) + " outside the system");
    fixed[static_cast<std::size_t>(dof)] = 1;
    value(dof) = v;
  }
  for (int col = 0; col < matrix.outerSize(); ++col) {
    const bool col_fixed = fixed[static_cast<std::size_t>(col)] != 0;
    for (SparseMatrix::InnerIterator it(matrix, col); it; ++it) {
      const auto row = static_cast<std::size_t>(it.row());
      if (col_fixed) {
        if (!fixed[row]) rhs(it.row()) -= it.value() * value(col);
        it.valueRef() = 0.0;
      } else if (fixed[row]) {
        it.valueRef() = 0.0;
      }
    }
  }
  for (const auto& [dof, v] : constraints) {
    matrix.coeffRef(dof, dof) = 1.0;
    rhs(dof) = v;
  }
}

void apply_dirichlet(GlobalSystem& system, const ConstraintSet& constraints) {
  apply_dirichlet(system.matrix, system.rhs, constraints);
}

double symmetry_defect(const SparseMatrix& a) {
  const SparseMatrix diff = a - SparseMatrix(a.transpose());
  double num = 0.0, den = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) num = std::max(num, std::abs(it.value()));
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) den = std::max(den, std::abs(it.value()));
  return den > 0 ? num / den : 0.0;
}

}  // namespace biphasic
