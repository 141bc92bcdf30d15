#pragma once

#include <Eigen/Dense>

#include <limits>
#include <vector>

namespace ksip {

enum class RowSense { Le, Eq, Ge };
enum class ObjSense { Min, Max };
enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

/// Dense LP in the form
///   opt c'x  s.t.  A x {<=,=,>=} b,  lower <= x <= upper,
/// with lower defaulting to 0 and upper to +inf. lower may be -inf
/// (the variable is split internally).
struct LinearProgram {
  ObjSense sense = ObjSense::Min;
  Eigen::VectorXd c;
  Eigen::MatrixXd a;
  std::vector<RowSense> row_sense;
  Eigen::VectorXd b;
  Eigen::VectorXd lower;  // empty => all zero
  Eigen::VectorXd upper;  // empty => all +inf

  int num_vars() const { return static_cast<int>(c.size()); }
  int num_rows() const { return static_cast<int>(b.size()); }
};

struct LpSolution {
  LpStatus status = LpStatus::NumericalFailure;
  Eigen::VectorXd x;
  double objective = 0.0;
  Eigen::VectorXd dual;  // per original row; sign convention: obj = b'y + bound terms
};

struct LpOptions {
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  long max_iterations = 200000;
};

/// Two-phase dense primal simplex with Bland's anti-cycling rule.
/// Deterministic: identical inputs yield identical outputs. Iteration
/// overruns surface as NumericalFailure, never as a wrong Optimal.
LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opts = {});

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace ksip
