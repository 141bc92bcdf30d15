#pragma once

#include <Eigen/Dense>

#include "ksip/core.hpp"

namespace ksip {

using BlockedMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;  // k x n

/// Scenario defender problem: maximize the oracle over k disjoint sets,
/// excluding blocked (type, item) pairs, under per-type budgets.
struct DefenderProblem {
  const FunctionOracle* oracle = nullptr;  // non-owning, outlives the problem
  BlockedMask blocked;                     // k x n; true = pair interdicted
  Eigen::VectorXi budgets;                 // k

  void validate() const;
};

enum class DefenderStatus { Optimal, NodeLimit };

struct DefenderSolution {
  KTuple s;
  double value = 0.0;
  long nodes = 0;
  double bound = 0.0;  // best upper bound on exploration stop
  DefenderStatus status = DefenderStatus::Optimal;
};

/// Provably optimal solution via depth-first branch-and-bound over which
/// item is chosen next, pruned with additive marginal-gain bounds and
/// warm-started by greedy_feasible. Exceeding the node guard yields
/// NodeLimit with the incumbent and remaining bound, never a silently
/// suboptimal Optimal.
DefenderSolution solve_exact(const DefenderProblem& p, long node_limit = 10'000'000);

/// Greedy feasible solution: repeatedly adds the admissible (type, item)
/// pair with the largest nonnegative marginal gain.
DefenderSolution greedy_feasible(const DefenderProblem& p);

/// Upper bound on the value of the best feasible completion of a partial
/// tuple: f(partial) plus, per type, the sum of the largest admissible
/// marginal gains within the residual budget (item-disjointness relaxed).
double additive_gain_bound(const FunctionOracle& f, const KTuple& partial,
                           const Eigen::VectorXi& residual_budgets, const BlockedMask& blocked);

}  // namespace ksip
