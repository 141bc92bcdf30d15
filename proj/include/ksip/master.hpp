#pragma once

#include <Eigen/Dense>

#include <vector>

#include "ksip/core.hpp"
#include "ksip/cuts.hpp"

namespace ksip {

/// Attacker feasible region: per-type budgets plus at most one type per
/// item.
struct AttackerPolytope {
  GroundSet ground;
  Eigen::VectorXi budgets;  // k

  AttackerPolytope(GroundSet g, Eigen::VectorXi budgets_);
};

bool is_feasible(const AttackVector& x, const AttackerPolytope& polytope);

enum class MasterStatus { Optimal, Unbounded, NodeLimit };

struct MasterResult {
  MasterStatus status = MasterStatus::Optimal;
  AttackVector x;
  double eta = 0.0;
  long nodes = 0;
};

/// Minimizes eta over the cut pool and the attacker polytope by
/// branch-and-bound on the binary x with LP relaxation bounds, then
/// refines to the lexicographically smallest optimal x (row-major (q, i)
/// order) for reproducible reports. Empty pool => Unbounded. A feasible
/// warm_start attack, when given, seeds the incumbent bound.
MasterResult solve_master(const std::vector<Cut>& pool, const AttackerPolytope& polytope,
                          long node_limit = 1'000'000, const AttackVector* warm_start = nullptr);

}  // namespace ksip
