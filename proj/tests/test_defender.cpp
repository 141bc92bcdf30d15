#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "ksip/defender.hpp"
#include "ksip/instances.hpp"
#include "ksip/oracle.hpp"

using namespace ksip;

namespace {

DefenderProblem make_problem(const FunctionOracle& f, Eigen::VectorXi budgets) {
  DefenderProblem p;
  p.oracle = &f;
  p.blocked = BlockedMask::Constant(f.ground().k, f.ground().n, false);
  p.budgets = std::move(budgets);
  return p;
}

Eigen::MatrixXd random_similarity(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) w(i, j) = w(j, i) = unif(rng);
  w.diagonal().setOnes();
  return w;
}

}  // namespace

TEST_CASE("degenerate feasible spaces") {
  std::mt19937_64 rng(1);
  SimilarityOracle f(random_similarity(4, rng));
  SUBCASE("zero budgets") {
    DefenderProblem p = make_problem(f, Eigen::VectorXi::Zero(1));
    const DefenderSolution sol = solve_exact(p);
    CHECK(sol.value == doctest::Approx(0.0));
    CHECK(sol.s.empty());
    CHECK(greedy_feasible(p).value == doctest::Approx(0.0));
  }
  SUBCASE("everything blocked") {
    DefenderProblem p = make_problem(f, Eigen::VectorXi::Constant(1, 4));
    p.blocked.setConstant(true);
    const DefenderSolution sol = solve_exact(p);
    CHECK(sol.value == doctest::Approx(0.0));
    CHECK(sol.s.empty());
  }
}

TEST_CASE("monotone objective saturates a loose budget") {
  std::mt19937_64 rng(7);
  SimilarityOracle f(random_similarity(5, rng));
  DefenderProblem p = make_problem(f, Eigen::VectorXi::Constant(1, 5));
  const DefenderSolution sol = solve_exact(p);
  CHECK(sol.s.total_assigned() == 5);
  double full = 0.0;
  for (int i = 0; i < 5; ++i) full += f.weights().row(i).maxCoeff();
  CHECK(sol.value == doctest::Approx(full));
}

TEST_CASE("modular objective makes greedy optimal") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(5, 5);
  w.diagonal() << 5, 3, 8, 1, 6;
  SimilarityOracle f(w);
  DefenderProblem p = make_problem(f, Eigen::VectorXi::Constant(1, 2));
  CHECK(greedy_feasible(p).value == doctest::Approx(solve_exact(p).value));
  CHECK(solve_exact(p).value == doctest::Approx(14.0));
}

TEST_CASE("exact solver matches full enumeration") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> coin(0, 3);
  for (int trial = 0; trial < 30; ++trial) {
    const Instance inst = gen_coverage(6, 2, (Eigen::VectorXd(2) << 2.0, 4.0).finished(), 1,
                                       1000 + trial);
    const auto f = inst.oracle(0);
    DefenderProblem p = make_problem(*f, (Eigen::VectorXi(2) << 2, 2).finished());
    for (int q = 0; q < 2; ++q)
      for (int i = 0; i < 6; ++i) p.blocked(q, i) = coin(rng) == 0;
    const DefenderSolution fast = solve_exact(p);
    const auto slow = oracle::brute_defender(*f, p.blocked, p.budgets);
    REQUIRE(fast.status == DefenderStatus::Optimal);
    CHECK(fast.value == doctest::Approx(slow.value));
    CHECK(fast.value == doctest::Approx(f->evaluate(fast.s)));
    // greedy warm start brackets
    const DefenderSolution g = greedy_feasible(p);
    CHECK(g.value <= fast.value + 1e-9);
    CHECK(g.value >= 0.5 * fast.value - 1e-9);  // known greedy guarantee
  }
}

TEST_CASE("completion bound properties") {
  std::mt19937_64 rng(5);
  SimilarityOracle f(random_similarity(5, rng));
  const GroundSet& g = f.ground();
  BlockedMask blocked = BlockedMask::Constant(1, 5, false);
  blocked(0, 2) = true;

  SUBCASE("zero residual budgets return the current value") {
    KTuple partial(g);
    partial.assign(0, 1);
    CHECK(additive_gain_bound(f, partial, Eigen::VectorXi::Zero(1), blocked) ==
          doctest::Approx(f.evaluate(partial)));
  }
  SUBCASE("bound dominates every feasible completion") {
    std::uniform_int_distribution<int> pick(0, 2);
    for (int trial = 0; trial < 50; ++trial) {
      KTuple partial(g);
      for (int i = 0; i < g.n; ++i)
        if (!blocked(0, i) && pick(rng) == 0) partial.assign(i, 1);
      const int used = partial.total_assigned();
      const int budget = std::min(5, used + pick(rng));
      Eigen::VectorXi residual(1);
      residual << budget - used;
      if (residual[0] < 0) continue;
      const double bound = additive_gain_bound(f, partial, residual, blocked);
      // best completion by enumeration
      DefenderProblem p = make_problem(f, Eigen::VectorXi::Constant(1, budget));
      double best = f.evaluate(partial);
      for_each_ktuple(g, [&](const KTuple& t) {
        if (!subset_of(partial, t)) return;
        if (t.total_assigned() > budget) return;
        for (int i = 0; i < g.n; ++i)
          if (t.assigned(i) && blocked(0, i) && !partial.assigned(i)) return;
        best = std::max(best, f.evaluate(t));
      });
      CHECK(bound >= best - 1e-9);
    }
  }
}

TEST_CASE("interdiction and budget monotonicity") {
  const Instance inst = gen_coverage(5, 1, Eigen::VectorXd::Constant(1, 3.0), 1, 99);
  const auto f = inst.oracle(0);
  DefenderProblem p = make_problem(*f, Eigen::VectorXi::Constant(1, 2));
  const double base = solve_exact(p).value;
  SUBCASE("more blocking never helps the defender") {
    p.blocked(0, 0) = true;
    const double v1 = solve_exact(p).value;
    CHECK(v1 <= base + 1e-9);
    p.blocked(0, 3) = true;
    CHECK(solve_exact(p).value <= v1 + 1e-9);
  }
  SUBCASE("more budget never hurts") {
    p.budgets[0] = 3;
    CHECK(solve_exact(p).value >= base - 1e-9);
  }
}
