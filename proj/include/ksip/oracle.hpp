#pragma once

#include <Eigen/Dense>

#include <vector>

#include "ksip/ambiguity.hpp"
#include "ksip/core.hpp"
#include "ksip/decomposition.hpp"
#include "ksip/defender.hpp"
#include "ksip/instances.hpp"

// Reference implementations used only to check the fast paths. Everything
// here is exhaustive or combinatorial and shares no machinery with the
// branch-and-bound solvers or the simplex code.
namespace ksip::oracle {

struct BruteDefenderResult {
  KTuple s;
  double value = 0.0;
};

/// Full enumeration of all (k+1)^n assignments, filtered by budgets and
/// the blocked mask. Throws if the enumeration would exceed the guard.
BruteDefenderResult brute_defender(const FunctionOracle& f, const BlockedMask& blocked,
                                   const Eigen::VectorXi& budgets, long guard = 100000);

/// All vertices of the first-moment polytope, found by activating
/// subsets of the inequality constraints and solving the resulting
/// square systems. Deduplicated; guarded by the number of subsets.
std::vector<Eigen::VectorXd> moment_vertices(const MomentMatchingSet& set,
                                             long guard = 2'000'000);

/// Exact extremes of sum_w p_w values_w over the set, by vertex
/// enumeration (moment) or by minimizing the piecewise-linear dual of the
/// transport problem over its breakpoints (Wasserstein).
double extreme_max(const Eigen::VectorXd& values, const AmbiguitySet& set);
double extreme_min(const Eigen::VectorXd& values, const AmbiguitySet& set);

/// Variant objective at a fixed attack, every scenario solved by full
/// enumeration and the ambiguity extremes taken from the routines above.
double brute_phi(const Instance& instance, const AttackVector& x, Variant variant,
                 long guard = 100000);

struct BruteMinmaxResult {
  AttackVector x;
  double value = 0.0;
};

/// Enumerates the whole attacker polytope in lexicographic row-major
/// order and keeps the first attack attaining the minimum objective.
BruteMinmaxResult brute_minmax(const Instance& instance, Variant variant, long guard = 100000);

}  // namespace ksip::oracle
