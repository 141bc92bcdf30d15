#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "ksip/lp.hpp"

using namespace ksip;

namespace {

LinearProgram simplex_lp(const Eigen::VectorXd& v, ObjSense sense) {
  LinearProgram lp;
  const int s = static_cast<int>(v.size());
  lp.sense = sense;
  lp.c = v;
  lp.a = Eigen::MatrixXd::Ones(1, s);
  lp.b = Eigen::VectorXd::Ones(1);
  lp.row_sense = {RowSense::Eq};
  lp.lower = Eigen::VectorXd::Zero(s);
  lp.upper = Eigen::VectorXd::Constant(s, kInf);
  return lp;
}

}  // namespace

TEST_CASE("single bounded variable") {
  LinearProgram lp;
  lp.sense = ObjSense::Max;
  lp.c = Eigen::VectorXd::Ones(1);
  lp.a = Eigen::MatrixXd::Ones(1, 1);
  lp.b = Eigen::VectorXd::Ones(1);
  lp.row_sense = {RowSense::Le};
  lp.lower = Eigen::VectorXd::Zero(1);
  lp.upper = Eigen::VectorXd::Constant(1, kInf);
  const LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.x[0] == doctest::Approx(1.0));
  CHECK(sol.objective == doctest::Approx(1.0));
}

TEST_CASE("minimum over the probability simplex picks a vertex") {
  Eigen::VectorXd v(3);
  v << 3, 1, 2;
  const LpSolution sol = solve_lp(simplex_lp(v, ObjSense::Min));
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(1.0));
  CHECK(sol.x[0] == doctest::Approx(0.0));
  CHECK(sol.x[1] == doctest::Approx(1.0));
  CHECK(sol.x[2] == doctest::Approx(0.0));
}

TEST_CASE("2x2 transportation problem") {
  // supplies (1, 1), demands (1, 1), costs [[1,2],[3,1]]; optimum ships on
  // the diagonal for a total of 2.
  LinearProgram lp;
  lp.sense = ObjSense::Min;
  lp.c.resize(4);
  lp.c << 1, 2, 3, 1;  // x11 x12 x21 x22
  lp.a = Eigen::MatrixXd::Zero(4, 4);
  lp.a.row(0) << 1, 1, 0, 0;
  lp.a.row(1) << 0, 0, 1, 1;
  lp.a.row(2) << 1, 0, 1, 0;
  lp.a.row(3) << 0, 1, 0, 1;
  lp.b.resize(4);
  lp.b << 1, 1, 1, 1;
  lp.row_sense = {RowSense::Eq, RowSense::Eq, RowSense::Eq, RowSense::Eq};
  lp.lower = Eigen::VectorXd::Zero(4);
  lp.upper = Eigen::VectorXd::Constant(4, kInf);
  const LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(2.0));
  CHECK(sol.x[0] == doctest::Approx(1.0));
  CHECK(sol.x[3] == doctest::Approx(1.0));
}

TEST_CASE("infeasible system is reported") {
  LinearProgram lp;
  lp.sense = ObjSense::Min;
  lp.c = Eigen::VectorXd::Zero(1);
  lp.a = Eigen::MatrixXd::Zero(2, 1);
  lp.a << 1, 1;
  lp.b.resize(2);
  lp.b << 2, 1;
  lp.row_sense = {RowSense::Ge, RowSense::Le};
  lp.lower = Eigen::VectorXd::Zero(1);
  lp.upper = Eigen::VectorXd::Constant(1, kInf);
  CHECK(solve_lp(lp).status == LpStatus::Infeasible);
}

TEST_CASE("unbounded maximization is reported") {
  LinearProgram lp;
  lp.sense = ObjSense::Max;
  lp.c = Eigen::VectorXd::Ones(1);
  lp.a = Eigen::MatrixXd::Ones(1, 1);
  lp.b = Eigen::VectorXd::Zero(1);
  lp.row_sense = {RowSense::Ge};
  lp.lower = Eigen::VectorXd::Zero(1);
  lp.upper = Eigen::VectorXd::Constant(1, kInf);
  CHECK(solve_lp(lp).status == LpStatus::Unbounded);
}

TEST_CASE("duals satisfy strong duality on equality rows") {
  Eigen::VectorXd v(4);
  v << 5, 2, 7, 4;
  const LpSolution sol = solve_lp(simplex_lp(v, ObjSense::Min));
  REQUIRE(sol.status == LpStatus::Optimal);
  REQUIRE(sol.dual.size() == 1);
  CHECK(sol.dual[0] == doctest::Approx(sol.objective));
}

TEST_CASE("free variables and upper bounds") {
  // min y s.t. y >= x - 3, y >= 1 - x, 0 <= x <= 4, y free.
  // Optimum x = 2, y = -1.
  LinearProgram lp;
  lp.sense = ObjSense::Min;
  lp.c.resize(2);
  lp.c << 0, 1;
  lp.a = Eigen::MatrixXd::Zero(2, 2);
  lp.a.row(0) << -1, 1;  // y - x >= -3
  lp.a.row(1) << 1, 1;   // y + x >= 1
  lp.b.resize(2);
  lp.b << -3, 1;
  lp.row_sense = {RowSense::Ge, RowSense::Ge};
  lp.lower.resize(2);
  lp.lower << 0, -kInf;
  lp.upper.resize(2);
  lp.upper << 4, kInf;
  const LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(-1.0));
  CHECK(sol.x[0] == doctest::Approx(2.0));
}

TEST_CASE("determinism and feasibility residuals") {
  Eigen::VectorXd v(5);
  v << 1.5, -0.25, 3.0, 0.75, 2.0;
  const LpSolution a = solve_lp(simplex_lp(v, ObjSense::Max));
  const LpSolution b = solve_lp(simplex_lp(v, ObjSense::Max));
  REQUIRE(a.status == LpStatus::Optimal);
  CHECK(a.x == b.x);
  CHECK(a.objective == b.objective);
  CHECK(std::abs(a.x.sum() - 1.0) <= 1e-9);
  CHECK((a.x.array() >= -1e-9).all());
}
