#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ksip/ambiguity.hpp"
#include "ksip/core.hpp"

namespace ksip {

enum class InstanceKind { Coverage, Feature };
enum class AmbiguityKind { Moment, Wasserstein };

/// Self-describing problem instance: ground set, budgets, scenarios with
/// attack-success vectors, ambiguity description, and the objective
/// payload (site geometry + rewards, or per-scenario similarity
/// matrices).
struct Instance {
  static constexpr int kSchemaVersion = 1;

  InstanceKind kind = InstanceKind::Coverage;
  GroundSet ground{1, 1};
  Eigen::VectorXi attacker_budgets;  // k
  Eigen::VectorXi defender_budgets;  // k
  Eigen::MatrixXi xi;                // |Omega| x n, binary
  Eigen::VectorXd reference_p;       // |Omega|
  AmbiguityKind ambiguity_kind = AmbiguityKind::Wasserstein;
  double ambiguity_epsilon = 0.0;

  // coverage payload
  Eigen::MatrixXd coords;        // n x 2
  Eigen::VectorXd site_rewards;  // n
  Eigen::VectorXd radii;         // k
  Eigen::MatrixXd mu;            // n x k

  // feature payload: one similarity matrix per scenario
  std::vector<Eigen::MatrixXd> w;

  // generation provenance
  std::string rng_name = "mt19937_64";
  std::uint64_t seed = 0;

  int num_scenarios() const { return static_cast<int>(xi.rows()); }
  void validate() const;

  /// Scenario objective oracle f^w. Coverage instances share a single
  /// oracle across scenarios; feature instances carry one per scenario.
  std::shared_ptr<const FunctionOracle> oracle(int scenario) const;

  AmbiguitySet ambiguity() const;
  /// Ambiguity set with a substituted radius (for sweeps).
  AmbiguitySet ambiguity_with_epsilon(double epsilon) const;

 private:
  mutable std::vector<std::shared_ptr<const FunctionOracle>> oracle_cache_;
};

/// Weighted-coverage generator: sites uniform on [1,10]^2 doubling as
/// candidate locations, rewards uniform on [1,100]; with two types the
/// second (larger-radius) type earns half the reward. Deterministic under
/// the seed; attack-success vectors are Bernoulli(success_prob).
Instance gen_coverage(int n, int k, const Eigen::VectorXd& radii, int num_scenarios,
                      std::uint64_t seed, double success_prob = 0.75);

/// i.i.d. Bernoulli attack-success vectors.
Eigen::MatrixXi gen_xi(int n, int num_scenarios, double success_prob, std::uint64_t seed);

enum class SimilarityMeasure { AbsPearson, Cosine };

/// Column-similarity matrix of a data matrix; |Pearson correlation| by
/// default. Throws naming the column on zero variance.
Eigen::MatrixXd similarity_from_data(const Eigen::MatrixXd& data,
                                     SimilarityMeasure measure = SimilarityMeasure::AbsPearson);

/// Feature-selection scenario builder: each scenario perturbs every data
/// entry by uniform noise on [-delta, delta] and converts the perturbed
/// matrix to a similarity matrix. No cross-combining of perturbed points
/// across scenarios.
Instance gen_feature_scenarios(const Eigen::MatrixXd& data, double delta, int num_scenarios,
                               std::uint64_t seed, double success_prob = 0.75,
                               SimilarityMeasure measure = SimilarityMeasure::AbsPearson);

Instance load_instance(const std::string& path);
void save_instance(const Instance& instance, const std::string& path);

std::string instance_to_json(const Instance& instance);
Instance instance_from_json(const std::string& text);

/// Headered CSV of numeric columns; comma delimiter, decimal point.
Eigen::MatrixXd load_csv_matrix(const std::string& path, std::vector<std::string>* headers = nullptr);

}  // namespace ksip
