#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <set>
#include <vector>

#include "ksip/core.hpp"

using namespace ksip;

namespace {

// Three collinear sites at unit spacing, one type with radius 1: a sensor
// at the middle site covers all three.
CoverageOracle collinear_coverage() {
  Eigen::MatrixXd coords(3, 2);
  coords << 0, 0, 1, 0, 2, 0;
  Eigen::MatrixXd rewards = Eigen::MatrixXd::Constant(3, 1, 10.0);
  Eigen::VectorXd radii(1);
  radii << 1.0;
  return CoverageOracle(coords, rewards, radii);
}

SimilarityOracle small_similarity() {
  Eigen::MatrixXd w(3, 3);
  w << 1.0, 0.4, 0.2, 0.4, 1.0, 0.7, 0.2, 0.7, 1.0;
  return SimilarityOracle(w);
}

// Monotone but not k-submodular: value |Z_1|^2 is superadditive.
class BrokenOracle final : public FunctionOracle {
 public:
  explicit BrokenOracle(GroundSet g) : FunctionOracle(g) {}
  double evaluate(const KTuple& s) const override {
    const double c = s.support_size(1);
    return c * c;
  }
};

}  // namespace

TEST_CASE("ktuple assignment algebra") {
  GroundSet g(4, 2);
  KTuple t(g);
  CHECK(t.empty());
  t.assign(0, 1);
  t.assign(2, 2);
  CHECK(t.slot(0) == 1);
  CHECK(!t.assigned(1));
  CHECK(t.support_size(1) == 1);
  CHECK(t.support_size(2) == 1);
  CHECK(t.total_assigned() == 2);
  CHECK(t.items(2) == std::vector<int>{2});
  const KTuple u = t.with(3, 1);
  CHECK(u.support_size(1) == 2);
  CHECK(t.support_size(1) == 1);  // with() copies
  CHECK_THROWS_AS(t.assign(0, 3), std::invalid_argument);
}

TEST_CASE("meet and join") {
  GroundSet g(3, 2);

  SUBCASE("idempotence") {
    KTuple x(g);
    x.assign(0, 1);
    x.assign(1, 2);
    auto [m, j] = meet_join(x, x);
    CHECK(m == x);
    CHECK(j == x);
  }
  SUBCASE("item claimed by two slots drops from the join") {
    KTuple x(g), y(g);
    x.assign(0, 1);
    y.assign(0, 2);
    auto [m, j] = meet_join(x, y);
    CHECK(m.empty());
    CHECK(j.empty());
  }
  SUBCASE("hand example") {
    // X = ({0},{1}), Y = ({0,2},emptyset)
    KTuple x(g), y(g);
    x.assign(0, 1);
    x.assign(1, 2);
    y.assign(0, 1);
    y.assign(2, 1);
    auto [m, j] = meet_join(x, y);
    CHECK(m.items(1) == std::vector<int>{0});
    CHECK(m.support_size(2) == 0);
    CHECK(j.items(1) == std::vector<int>{0, 2});
    CHECK(j.items(2) == std::vector<int>{1});
  }
  SUBCASE("mismatched ground sets") {
    KTuple x(g), y(GroundSet(4, 2));
    CHECK_THROWS_AS(meet_join(x, y), std::invalid_argument);
  }
}

TEST_CASE("coverage oracle evaluation") {
  CoverageOracle f = collinear_coverage();
  KTuple s(f.ground());
  CHECK(f.evaluate(s) == doctest::Approx(0.0));
  s.assign(1, 1);  // middle site
  CHECK(f.evaluate(s) == doctest::Approx(30.0));
  KTuple end(f.ground());
  end.assign(0, 1);  // end site reaches only itself and the middle
  CHECK(f.evaluate(end) == doctest::Approx(20.0));
  CHECK(f.covers(1, 0, 1));
  CHECK(!f.covers(1, 0, 2));
}

TEST_CASE("coverage best-reward-per-site semantics") {
  // Two types, overlapping coverage: each site earns the best covering
  // reward, not the sum.
  Eigen::MatrixXd coords(2, 2);
  coords << 0, 0, 1, 0;
  Eigen::MatrixXd rewards(2, 2);
  rewards << 8.0, 4.0, 6.0, 3.0;
  Eigen::VectorXd radii(2);
  radii << 1.0, 2.0;
  CoverageOracle f(coords, rewards, radii);
  KTuple s(f.ground());
  s.assign(0, 1);
  s.assign(1, 2);
  // site 0: type 1 covers (reward 8) and type 2 covers (reward 4) -> 8
  // site 1: same pattern -> 6
  CHECK(f.evaluate(s) == doctest::Approx(14.0));
}

TEST_CASE("similarity oracle evaluation") {
  SimilarityOracle f = small_similarity();
  KTuple s(f.ground());
  CHECK(f.evaluate(s) == doctest::Approx(0.0));
  s.assign(1, 1);
  // singleton {1}: column sums w(:,1)
  CHECK(f.evaluate(s) == doctest::Approx(0.4 + 1.0 + 0.7));
  s.assign(2, 1);
  CHECK(f.evaluate(s) == doctest::Approx(0.4 + 1.0 + 1.0));
}

TEST_CASE("marginal gains") {
  SimilarityOracle f = small_similarity();
  KTuple x(f.ground());
  CHECK(marginal_gain(f, x, 1, 0) == doctest::Approx(1.0 + 0.4 + 0.2));
  x.assign(0, 1);
  CHECK(marginal_gain(f, x, 1, 1) ==
        doctest::Approx(f.evaluate(x.with(1, 1)) - f.evaluate(x)));
  CHECK_THROWS_AS(marginal_gain(f, x, 1, 0), std::invalid_argument);
}

TEST_CASE("diminishing returns on nested tuples") {
  CoverageOracle f = collinear_coverage();
  const GroundSet& g = f.ground();
  std::vector<KTuple> all;
  for_each_ktuple(g, [&](const KTuple& t) { all.push_back(t); });
  for (const KTuple& x : all)
    for (const KTuple& y : all) {
      if (!subset_of(x, y)) continue;
      for (int i = 0; i < g.n; ++i) {
        if (y.assigned(i)) continue;
        for (int q = 1; q <= g.k; ++q)
          CHECK(marginal_gain(f, x, q, i) >= marginal_gain(f, y, q, i) - 1e-12);
      }
    }
}

TEST_CASE("k-submodularity checker") {
  CHECK(check_k_submodular(collinear_coverage()));
  CHECK(check_k_submodular(small_similarity()));
  CHECK_FALSE(check_k_submodular(BrokenOracle(GroundSet(3, 1))));
  SUBCASE("guard") {
    CHECK_THROWS_AS(check_k_submodular(small_similarity(), /*max_tuples=*/3),
                    std::invalid_argument);
  }
  SUBCASE("two types") {
    Eigen::MatrixXd coords(4, 2);
    coords << 0, 0, 1, 1, 3, 0, 2, 2;
    Eigen::MatrixXd rewards(4, 2);
    rewards << 9, 4.5, 3, 1.5, 7, 3.5, 5, 2.5;
    Eigen::VectorXd radii(2);
    radii << 1.5, 3.0;
    CHECK(check_k_submodular(CoverageOracle(coords, rewards, radii)));
  }
}

TEST_CASE("ktuple enumeration covers the whole space") {
  GroundSet g(3, 2);
  std::set<std::vector<int>> seen;
  for_each_ktuple(g, [&](const KTuple& t) {
    std::vector<int> v(g.n);
    for (int i = 0; i < g.n; ++i) v[i] = t.slot(i);
    seen.insert(v);
  });
  CHECK(seen.size() == 27);  // (k+1)^n
}
