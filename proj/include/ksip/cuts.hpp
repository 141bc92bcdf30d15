#pragma once

#include <Eigen/Dense>

#include <vector>

#include "ksip/ambiguity.hpp"
#include "ksip/core.hpp"

namespace ksip {

/// Binary attacker decision, one row per type: x(q-1, i) = 1 interdicts
/// the (type q, item i) pair.
using AttackVector = Eigen::MatrixXi;  // k x n

enum class CutFamily { Basic, Sequential, RiskNeutral, Drr, Dra };

/// Affine lower bound eta >= constant - sum_{q,i} coeff(q,i) x(q,i) on the
/// attacker's value function, valid over the attacker polytope and tight
/// at the generating attack.
struct Cut {
  double constant = 0.0;
  Eigen::MatrixXd coeff;  // k x n, nonnegative
  CutFamily family = CutFamily::Basic;
  AttackVector generator;  // the x this cut was produced at
};

double cut_rhs(const Cut& cut, const AttackVector& x);

enum class PermutationMode { GreedyGain, IndexOrder };

/// Per-type orderings of the defender solution used by the sequential
/// coefficients: GreedyGain inserts items of S_q in decreasing gain order
/// relative to the growing prefix, IndexOrder uses ascending item index.
std::vector<std::vector<int>> sequential_permutation(const FunctionOracle& f, const KTuple& s_hat,
                                                     PermutationMode mode);

/// Coefficient matrix of the sequential bound: coeff(q, i_{q,t}) is the
/// gain of i_{q,t} on the prefix holding all earlier types complete and
/// the first t-1 items of type q. Coefficients telescope to f(s_hat).
Eigen::MatrixXd sequential_coefficients(const FunctionOracle& f, const KTuple& s_hat,
                                        const std::vector<std::vector<int>>& permutation);

/// Empty-tuple gains on the defender support only: coeff(q, i) =
/// rho_{q,i}(empty) for i in S_q, else 0.
Cut cut_basic(const AttackVector& x_hat, const KTuple& s_hat, const FunctionOracle& f);

/// Sequential-gain strengthening of the basic cut (dominates it).
Cut cut_sequential(const AttackVector& x_hat, const KTuple& s_hat, const FunctionOracle& f,
                   const std::vector<std::vector<int>>& permutation);
Cut cut_sequential(const AttackVector& x_hat, const KTuple& s_hat, const FunctionOracle& f,
                   PermutationMode mode = PermutationMode::GreedyGain);

/// Expectation of per-scenario sequential cuts under a fixed distribution,
/// with attack-success masking.
Cut cut_risk_neutral(const AttackVector& x_hat, const std::vector<KTuple>& s_hat,
                     const Eigen::VectorXd& p_bar, const Eigen::MatrixXi& xi,
                     const std::vector<const FunctionOracle*>& f,
                     PermutationMode mode = PermutationMode::GreedyGain);

/// Risk-receptive cut: constant from the minimizing distribution, each
/// coefficient from an inner maximization over the ambiguity set of the
/// masked empty-tuple gains. Separations with identical weight vectors
/// are cached; all-zero weights short-circuit to zero.
Cut cut_drr(const AttackVector& x_hat, const std::vector<KTuple>& s_hat, const AmbiguitySet& set,
            const Eigen::MatrixXi& xi, const std::vector<const FunctionOracle*>& f);

/// Risk-averse cut: sequential coefficients weighted by the maximizing
/// distribution.
Cut cut_dra(const AttackVector& x_hat, const std::vector<KTuple>& s_hat, const AmbiguitySet& set,
            const Eigen::MatrixXi& xi, const std::vector<const FunctionOracle*>& f,
            PermutationMode mode = PermutationMode::GreedyGain);

/// True iff the cut holds with equality at its generating attack.
bool check_tightness(const Cut& cut, const AttackVector& x_hat, double phi_at_x_hat,
                     double tol = 1e-9);

}  // namespace ksip
