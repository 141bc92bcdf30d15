#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <string>

#include "ksip/core.hpp"
#include "ksip/instances.hpp"

using namespace ksip;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/ksip_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
  void write(const std::string& text) const {
    std::ofstream out(path);
    out << text;
  }
};

}  // namespace

TEST_CASE("coverage generation is deterministic and well-formed") {
  const Eigen::VectorXd radii = Eigen::VectorXd::Constant(1, 2.0);
  const Instance a = gen_coverage(8, 1, radii, 3, 77);
  const Instance b = gen_coverage(8, 1, radii, 3, 77);
  CHECK(instance_to_json(a) == instance_to_json(b));
  const Instance c = gen_coverage(8, 1, radii, 3, 78);
  CHECK(instance_to_json(a) != instance_to_json(c));
  a.validate();
  CHECK(a.attacker_budgets[0] == 1);  // ceil(0.1 * 8)
  CHECK((a.coords.array() >= 1.0).all());
  CHECK((a.coords.array() <= 10.0).all());
  CHECK((a.site_rewards.array() >= 1.0).all());
  CHECK((a.site_rewards.array() <= 100.0).all());
}

TEST_CASE("every site covers itself") {
  const Instance inst =
      gen_coverage(6, 1, Eigen::VectorXd::Constant(1, 0.5), 1, 5);
  const auto f = inst.oracle(0);
  const auto* cov = dynamic_cast<const CoverageOracle*>(f.get());
  REQUIRE(cov != nullptr);
  for (int i = 0; i < 6; ++i) CHECK(cov->covers(1, i, i));
}

TEST_CASE("second sensor type earns half the reward") {
  Eigen::VectorXd radii(2);
  radii << 1.0, 2.0;
  const Instance inst = gen_coverage(7, 2, radii, 2, 31);
  for (int i = 0; i < 7; ++i) CHECK(inst.mu(i, 1) == doctest::Approx(inst.mu(i, 0) / 2.0));
}

TEST_CASE("attack-success sampling") {
  CHECK((gen_xi(5, 4, 1.0, 9).array() == 1).all());
  CHECK((gen_xi(5, 4, 0.0, 9).array() == 0).all());
  const Eigen::MatrixXi xi = gen_xi(100, 100, 0.75, 123);
  const double mean = xi.cast<double>().mean();
  CHECK(mean == doctest::Approx(0.75).epsilon(0.03));
  CHECK(gen_xi(5, 4, 0.75, 9) == gen_xi(5, 4, 0.75, 9));
}

TEST_CASE("similarity from data") {
  SUBCASE("duplicated column has similarity one") {
    Eigen::MatrixXd data(4, 2);
    data << 1, 1, 2, 2, 4, 4, 3, 3;
    const Eigen::MatrixXd w = similarity_from_data(data);
    CHECK(w(0, 1) == doctest::Approx(1.0));
    CHECK(w(0, 0) == doctest::Approx(1.0));
  }
  SUBCASE("orthogonal mean-centered columns have similarity zero") {
    Eigen::MatrixXd data(4, 2);
    data << 1, 1, -1, 1, 1, -1, -1, -1;
    CHECK(similarity_from_data(data)(0, 1) == doctest::Approx(0.0));
  }
  SUBCASE("hand-computed three-column dataset") {
    Eigen::MatrixXd data(3, 3);
    data << 1, 2, 1, 2, 4, 3, 3, 6, 2;
    const Eigen::MatrixXd w = similarity_from_data(data);
    CHECK(w(0, 1) == doctest::Approx(1.0));       // exact linear dependence
    CHECK(w(0, 2) == doctest::Approx(0.5));       // |corr((1,2,3),(1,3,2))|
    CHECK(w == w.transpose());
    CHECK((w.array() >= 0.0).all());
    CHECK((w.array() <= 1.0 + 1e-12).all());
  }
  SUBCASE("zero-variance column is rejected by name") {
    Eigen::MatrixXd data(3, 2);
    data << 1, 5, 2, 5, 3, 5;
    CHECK_THROWS_WITH_AS(similarity_from_data(data),
                         doctest::Contains("column 1"), std::invalid_argument);
  }
}

TEST_CASE("feature scenario generation") {
  Eigen::MatrixXd data(6, 4);
  data << 1, 2, 0.5, 3, 2, 3, 1.5, 1, 3, 5, 2.0, 4, 4, 4, 3.5, 2, 5, 7, 2.5, 6, 6, 6, 4.5, 5;
  SUBCASE("zero noise clones the base similarity") {
    const Instance inst = gen_feature_scenarios(data, 0.0, 3, 42);
    const Eigen::MatrixXd base = similarity_from_data(data);
    for (const Eigen::MatrixXd& w : inst.w)
      CHECK((w - base).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
  SUBCASE("determinism and shape") {
    const Instance a = gen_feature_scenarios(data, 0.1, 3, 42);
    const Instance b = gen_feature_scenarios(data, 0.1, 3, 42);
    CHECK(instance_to_json(a) == instance_to_json(b));
    CHECK(a.w.size() == 3);
    CHECK(a.ground.k == 1);
    a.validate();
    // noisy scenarios differ from each other
    CHECK((a.w[0] - a.w[1]).lpNorm<Eigen::Infinity>() > 1e-9);
  }
}

TEST_CASE("instance round trip through disk") {
  const Instance inst = gen_coverage(5, 2, (Eigen::VectorXd(2) << 1.0, 2.0).finished(), 3, 11);
  TempFile f("roundtrip.json");
  save_instance(inst, f.path);
  const Instance loaded = load_instance(f.path);
  CHECK(instance_to_json(inst) == instance_to_json(loaded));
}

TEST_CASE("feature instance round trip") {
  Eigen::MatrixXd data(5, 3);
  data << 1, 2, 3, 2, 1, 4, 3, 3, 1, 4, 5, 2, 5, 4, 6;
  const Instance inst = gen_feature_scenarios(data, 0.05, 2, 8);
  CHECK(instance_to_json(instance_from_json(instance_to_json(inst))) ==
        instance_to_json(inst));
}

TEST_CASE("missing required field is named in the error") {
  CHECK_THROWS_WITH_AS(instance_from_json(R"({"schema_version": 1, "kind": "coverage"})"),
                       doctest::Contains("missing required field"), std::runtime_error);
  CHECK_THROWS_WITH_AS(
      instance_from_json(R"({"schema_version": 1, "kind": "coverage", "n": 2, "k": 1})"),
      doctest::Contains("'attacker_budgets'"), std::runtime_error);
  CHECK_THROWS_WITH_AS(instance_from_json("{not json"), doctest::Contains("parse error"),
                       std::runtime_error);
}

TEST_CASE("golden fixture parses to known values") {
  const Instance inst = load_instance(std::string(KSIP_TEST_DATA_DIR) + "/golden_coverage.json");
  CHECK(inst.ground.n == 3);
  CHECK(inst.ground.k == 1);
  CHECK(inst.attacker_budgets[0] == 1);
  CHECK(inst.defender_budgets[0] == 2);
  CHECK(inst.num_scenarios() == 2);
  CHECK(inst.ambiguity_kind == AmbiguityKind::Wasserstein);
  CHECK(inst.ambiguity_epsilon == doctest::Approx(0.5));
  CHECK(inst.seed == 12345);
  // sites 0 and 1 are a unit apart with radius 1.5; site 2 is isolated
  const auto f = inst.oracle(0);
  KTuple s(inst.ground);
  s.assign(0, 1);
  CHECK(f->evaluate(s) == doctest::Approx(30.0));
}

TEST_CASE("generated oracles are k-submodular within the guard") {
  const Instance cov = gen_coverage(5, 2, (Eigen::VectorXd(2) << 2.0, 4.0).finished(), 1, 3);
  CHECK(check_k_submodular(*cov.oracle(0)));
  Eigen::MatrixXd data(5, 4);
  data << 1, 2, 3, 1, 2, 3, 1, 2, 3, 1, 2, 4, 4, 5, 4, 3, 5, 4, 6, 5;
  const Instance feat = gen_feature_scenarios(data, 0.1, 2, 4);
  CHECK(check_k_submodular(*feat.oracle(0)));
  CHECK(check_k_submodular(*feat.oracle(1)));
}

TEST_CASE("csv ingestion") {
  TempFile f("matrix.csv");
  SUBCASE("well-formed file") {
    f.write("a,b,c\n1,2.5,3\n4,5,6.25\n");
    std::vector<std::string> headers;
    const Eigen::MatrixXd m = load_csv_matrix(f.path, &headers);
    CHECK(headers == std::vector<std::string>{"a", "b", "c"});
    CHECK(m.rows() == 2);
    CHECK(m(0, 1) == doctest::Approx(2.5));
    CHECK(m(1, 2) == doctest::Approx(6.25));
  }
  SUBCASE("bad cell names the line") {
    f.write("a,b\n1,2\n3,oops\n");
    CHECK_THROWS_WITH_AS(load_csv_matrix(f.path), doctest::Contains("line 3"),
                         std::runtime_error);
  }
}
