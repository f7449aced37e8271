#include "biphasic/errors.hpp"
#include "biphasic/solver.hpp"

namespace biphasic {

DofMap::DofMap(const Mesh& mesh) : pressure_index_(static_cast<std::size_t>(mesh.num_nodes()), -1) {
  const auto corners = mesh.corner_mask();
  for (std::size_t n = 0; n < corners.size(); ++n)
    if (corners[n]) pressure_index_[n] = num_p_++;
}

int DofMap::pressure_index(int node) const {
  const int idx = pressure_index_.at(static_cast<std::size_t>(node));
  if (idx < 0) throw QueryError("node " + std::to_string(node) + " carries no pressure dof");
  return idx;
}

std::array<int, 34> DofMap::element_dofs(const Tet10& el) const {
  std::array<int, 34> d{};
  for (std::size_t a = 0; a < 10; ++a)
    for (int i = 0; i < 3; ++i) d[3 * a + static_cast<std::size_t>(i)] = u_dof(el.nodes[a], i);
  for (std::size_t a = 0; a < 4; ++a) d[30 + a] = p_dof(el.nodes[a]);
  return d;
}

SolutionState SolutionState::zero(const DofMap& dofs) {
  return {Eigen::VectorXd::Zero(dofs.num_u()), Eigen::VectorXd::Zero(dofs.num_p()), 0.0};
}

void ConstraintSet::add(int dof, double value) {
  const auto [it, inserted] = values_.emplace(dof, value);
  if (!inserted && it->second != value)
    throw ConfigError("dof " + std::to_string(dof) + " constrained twice with conflicting values");
}

ConstraintSet ConstraintSet::homogeneous() const {
  ConstraintSet zero;
  for (const auto& [dof, value] : values_) zero.values_.emplace(dof, 0.0);
  return zero;
}

}  // namespace biphasic
