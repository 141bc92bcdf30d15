#pragma once

#include <Eigen/Dense>

#include <variant>

#include "ksip/lp.hpp"

namespace ksip {

/// Checks the simplex invariant: p >= 0, sum p = 1 within tol.
bool is_distribution(const Eigen::VectorXd& p, double tol = 1e-9);

/// First-moment box around the empirical mean of the scenario vectors:
/// distributions p with l1 <= sum_w p_w xi^w <= u1 componentwise, where
/// l1 = (1 - eps) m1, u1 = (1 + eps) m1 and m1 is the scenario average.
class MomentMatchingSet {
 public:
  MomentMatchingSet(Eigen::MatrixXi xi, double epsilon);

  const Eigen::MatrixXi& xi() const { return xi_; }
  double epsilon() const { return eps_; }
  int num_scenarios() const { return static_cast<int>(xi_.rows()); }
  const Eigen::VectorXd& mean() const { return m1_; }
  const Eigen::VectorXd& lower() const { return l1_; }
  const Eigen::VectorXd& upper() const { return u1_; }

 private:
  Eigen::MatrixXi xi_;  // |Omega| x n, binary
  double eps_;
  Eigen::VectorXd m1_, l1_, u1_;
};

/// Transport-distance ball of radius epsilon around a reference
/// distribution, with ground distance d(w_i, w_j) = ||xi^i - xi^j||_1.
/// epsilon = 0 is accepted and degenerates to the singleton {reference}.
class WassersteinSet {
 public:
  WassersteinSet(Eigen::MatrixXi xi, Eigen::VectorXd reference, double epsilon);

  const Eigen::MatrixXi& xi() const { return xi_; }
  const Eigen::VectorXd& reference() const { return reference_; }
  double epsilon() const { return eps_; }
  int num_scenarios() const { return static_cast<int>(xi_.rows()); }
  const Eigen::MatrixXd& distances() const { return dist_; }

 private:
  Eigen::MatrixXi xi_;
  Eigen::VectorXd reference_;
  double eps_;
  Eigen::MatrixXd dist_;  // symmetric, zero diagonal
};

using AmbiguitySet = std::variant<MomentMatchingSet, WassersteinSet>;

int num_scenarios(const AmbiguitySet& set);

struct SeparationResult {
  Eigen::VectorXd distribution;
  double objective = 0.0;
  Eigen::MatrixXd transport;  // Wasserstein only; empty otherwise
};

/// Extremal distribution minimizing sum_w p_w values_w over the set.
SeparationResult separate_min(const Eigen::VectorXd& values, const AmbiguitySet& set);

/// Extremal distribution maximizing sum_w p_w values_w over the set.
SeparationResult separate_max(const Eigen::VectorXd& values, const AmbiguitySet& set);

/// max_{P in the set} sum_w p_w a_w for nonnegative weights a; the inner
/// maximization of the risk-receptive cut coefficient.
double drr_cut_coefficient(const AmbiguitySet& set, const Eigen::VectorXd& weights);

}  // namespace ksip
