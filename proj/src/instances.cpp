#include "ksip/instances.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ksip {

namespace {

using nlohmann::json;

// Platform-independent uniform draws: std::uniform_real_distribution is
// implementation-defined, and generated bytes are part of the instance
// files.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
double uniform(std::mt19937_64& rng, double a, double b) { return a + (b - a) * uniform01(rng); }

int default_budget(int n) { return static_cast<int>(std::ceil(0.1 * n)); }

}  // namespace

void Instance::validate() const {
  const int n = ground.n, k = ground.k, s = num_scenarios();
  if (attacker_budgets.size() != k || defender_budgets.size() != k)
    throw std::invalid_argument("Instance: budgets must have size k");
  if ((attacker_budgets.array() < 0).any() || (defender_budgets.array() < 0).any())
    throw std::invalid_argument("Instance: budgets must be nonnegative");
  if (s < 1 || xi.cols() != n) throw std::invalid_argument("Instance: xi must be |Omega| x n");
  for (int w_ = 0; w_ < s; ++w_)
    for (int i = 0; i < n; ++i)
      if (xi(w_, i) != 0 && xi(w_, i) != 1)
        throw std::invalid_argument("Instance: xi entries must be binary");
  if (!is_distribution(reference_p) || reference_p.size() != s)
    throw std::invalid_argument("Instance: reference_p is not a distribution over the scenarios");
  if (ambiguity_epsilon < 0) throw std::invalid_argument("Instance: ambiguity epsilon must be >= 0");
  if (kind == InstanceKind::Coverage) {
    if (coords.rows() != n || coords.cols() != 2)
      throw std::invalid_argument("Instance: coords must be n x 2");
    if (site_rewards.size() != n) throw std::invalid_argument("Instance: site_rewards must have size n");
    if (radii.size() != k) throw std::invalid_argument("Instance: radii must have size k");
    if (mu.rows() != n || mu.cols() != k) throw std::invalid_argument("Instance: mu must be n x k");
  } else {
    if (static_cast<int>(w.size()) != s)
      throw std::invalid_argument("Instance: one similarity matrix per scenario required");
    if (k != 1) throw std::invalid_argument("Instance: feature instances require k = 1");
    for (const auto& m : w)
      if (m.rows() != n || m.cols() != n || (m.array() < 0).any())
        throw std::invalid_argument("Instance: similarity matrices must be nonnegative n x n");
  }
}

std::shared_ptr<const FunctionOracle> Instance::oracle(int scenario) const {
  if (scenario < 0 || scenario >= num_scenarios())
    throw std::out_of_range("Instance::oracle: scenario out of range");
  if (oracle_cache_.empty()) {
    oracle_cache_.resize(static_cast<size_t>(num_scenarios()));
    if (kind == InstanceKind::Coverage) {
      auto shared = std::make_shared<CoverageOracle>(coords, mu, radii);
      for (auto& slot : oracle_cache_) slot = shared;
    } else {
      for (int s = 0; s < num_scenarios(); ++s)
        oracle_cache_[static_cast<size_t>(s)] =
            std::make_shared<SimilarityOracle>(w[static_cast<size_t>(s)]);
    }
  }
  return oracle_cache_[static_cast<size_t>(scenario)];
}

AmbiguitySet Instance::ambiguity() const { return ambiguity_with_epsilon(ambiguity_epsilon); }

AmbiguitySet Instance::ambiguity_with_epsilon(double epsilon) const {
  if (ambiguity_kind == AmbiguityKind::Moment) return MomentMatchingSet(xi, epsilon);
  return WassersteinSet(xi, reference_p, epsilon);
}

Eigen::MatrixXi gen_xi(int n, int num_scenarios, double success_prob, std::uint64_t seed) {
  if (success_prob < 0.0 || success_prob > 1.0)
    throw std::invalid_argument("gen_xi: success_prob must lie in [0,1]");
  std::mt19937_64 rng(seed);
  Eigen::MatrixXi xi(num_scenarios, n);
  for (int w_ = 0; w_ < num_scenarios; ++w_)
    for (int i = 0; i < n; ++i) xi(w_, i) = uniform01(rng) < success_prob ? 1 : 0;
  return xi;
}

Instance gen_coverage(int n, int k, const Eigen::VectorXd& radii, int num_scenarios,
                      std::uint64_t seed, double success_prob) {
  if (n < 1) throw std::invalid_argument("gen_coverage: n must be >= 1");
  if (k != 1 && k != 2) throw std::invalid_argument("gen_coverage: k must be 1 or 2");
  if (radii.size() != k) throw std::invalid_argument("gen_coverage: radii must have length k");
  std::mt19937_64 rng(seed);
  Instance inst;
  inst.kind = InstanceKind::Coverage;
  inst.ground = GroundSet(n, k);
  inst.seed = seed;
  inst.coords.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    inst.coords(i, 0) = uniform(rng, 1.0, 10.0);
    inst.coords(i, 1) = uniform(rng, 1.0, 10.0);
  }
  inst.site_rewards.resize(n);
  for (int i = 0; i < n; ++i) inst.site_rewards[i] = uniform(rng, 1.0, 100.0);
  inst.radii = radii;
  inst.mu.resize(n, k);
  inst.mu.col(0) = inst.site_rewards;
  if (k == 2) inst.mu.col(1) = inst.site_rewards / 2.0;  // larger radius, half reward
  inst.attacker_budgets = Eigen::VectorXi::Constant(k, default_budget(n));
  inst.defender_budgets = Eigen::VectorXi::Constant(k, default_budget(n));
  inst.xi = gen_xi(n, num_scenarios, success_prob, seed ^ 0x9e3779b97f4a7c15ULL);
  inst.reference_p = Eigen::VectorXd::Constant(num_scenarios, 1.0 / num_scenarios);
  inst.ambiguity_kind = AmbiguityKind::Wasserstein;
  inst.ambiguity_epsilon = 1.0;
  inst.validate();
  return inst;
}

Eigen::MatrixXd similarity_from_data(const Eigen::MatrixXd& data, SimilarityMeasure measure) {
  const int m = static_cast<int>(data.rows());
  const int n = static_cast<int>(data.cols());
  if (m < 2 || n < 1) throw std::invalid_argument("similarity_from_data: need >= 2 rows");
  Eigen::MatrixXd w(n, n);
  if (measure == SimilarityMeasure::AbsPearson) {
    Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
    Eigen::VectorXd norms = centered.colwise().norm();
    for (int j = 0; j < n; ++j)
      if (norms[j] == 0.0)
        throw std::invalid_argument("similarity_from_data: column " + std::to_string(j) +
                                    " has zero variance");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        w(i, j) = std::abs(centered.col(i).dot(centered.col(j)) / (norms[i] * norms[j]));
  } else {
    Eigen::VectorXd norms = data.colwise().norm();
    for (int j = 0; j < n; ++j)
      if (norms[j] == 0.0)
        throw std::invalid_argument("similarity_from_data: column " + std::to_string(j) +
                                    " is identically zero");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        w(i, j) = std::abs(data.col(i).dot(data.col(j)) / (norms[i] * norms[j]));
  }
  // clamp tiny numerical overshoot
  w = w.cwiseMin(1.0).cwiseMax(0.0);
  return w;
}

Instance gen_feature_scenarios(const Eigen::MatrixXd& data, double delta, int num_scenarios,
                               std::uint64_t seed, double success_prob,
                               SimilarityMeasure measure) {
  if (delta < 0.0) throw std::invalid_argument("gen_feature_scenarios: delta must be >= 0");
  if (num_scenarios < 1) throw std::invalid_argument("gen_feature_scenarios: need >= 1 scenario");
  const int n = static_cast<int>(data.cols());
  std::mt19937_64 rng(seed);
  Instance inst;
  inst.kind = InstanceKind::Feature;
  inst.ground = GroundSet(n, 1);
  inst.seed = seed;
  inst.w.reserve(static_cast<size_t>(num_scenarios));
  for (int s = 0; s < num_scenarios; ++s) {
    Eigen::MatrixXd perturbed = data;
    for (Eigen::Index r = 0; r < perturbed.rows(); ++r)
      for (Eigen::Index c = 0; c < perturbed.cols(); ++c)
        perturbed(r, c) += uniform(rng, -delta, delta);
    inst.w.push_back(similarity_from_data(perturbed, measure));
  }
  inst.attacker_budgets = Eigen::VectorXi::Constant(1, default_budget(n));
  inst.defender_budgets = Eigen::VectorXi::Constant(1, default_budget(n));
  inst.xi = gen_xi(n, num_scenarios, success_prob, seed ^ 0x9e3779b97f4a7c15ULL);
  inst.reference_p = Eigen::VectorXd::Constant(num_scenarios, 1.0 / num_scenarios);
  inst.ambiguity_kind = AmbiguityKind::Wasserstein;
  inst.ambiguity_epsilon = 1.0;
  inst.validate();
  return inst;
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json imatrix_to_json(const Eigen::MatrixXi& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end())
    throw std::runtime_error(std::string("instance JSON: missing required field '") + key + "'");
  return *it;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.size();
  if (rows == 0) return {};
  const auto cols = j.at(0).size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (size_t r = 0; r < rows; ++r) {
    if (j.at(r).size() != cols) throw std::runtime_error("instance JSON: ragged matrix");
    for (size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j.at(r).at(c).get<double>();
  }
  return m;
}

Eigen::MatrixXi imatrix_from_json(const json& j) {
  return matrix_from_json(j).cast<int>();
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j.at(i).get<double>();
  return v;
}

Eigen::VectorXi ivector_from_json(const json& j) {
  Eigen::VectorXi v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j.at(i).get<int>();
  return v;
}

template <typename Vec>
json vector_to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
  inst.validate();
  json j;
  j["schema_version"] = Instance::kSchemaVersion;
  j["kind"] = inst.kind == InstanceKind::Coverage ? "coverage" : "feature";
  j["n"] = inst.ground.n;
  j["k"] = inst.ground.k;
  j["attacker_budgets"] = vector_to_json(inst.attacker_budgets);
  j["defender_budgets"] = vector_to_json(inst.defender_budgets);
  j["rng"] = {{"generator", inst.rng_name}, {"seed", inst.seed}};
  j["scenarios"] = {{"xi", imatrix_to_json(inst.xi)},
                    {"reference_p", vector_to_json(inst.reference_p)}};
  j["ambiguity"] = {
      {"type", inst.ambiguity_kind == AmbiguityKind::Moment ? "moment" : "wasserstein"},
      {"epsilon", inst.ambiguity_epsilon}};
  if (inst.kind == InstanceKind::Coverage) {
    j["coverage"] = {{"coords", matrix_to_json(inst.coords)},
                     {"site_rewards", vector_to_json(inst.site_rewards)},
                     {"radii", vector_to_json(inst.radii)},
                     {"mu", matrix_to_json(inst.mu)}};
  } else {
    json mats = json::array();
    for (const auto& m : inst.w) mats.push_back(matrix_to_json(m));
    j["feature"] = {{"w", std::move(mats)}};
  }
  return j.dump(2);
}

Instance instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("instance JSON: parse error: ") + e.what());
  }
  const int version = require(j, "schema_version").get<int>();
  if (version != Instance::kSchemaVersion)
    throw std::runtime_error("instance JSON: unknown schema version " + std::to_string(version));
  Instance inst;
  const std::string kind = require(j, "kind").get<std::string>();
  if (kind == "coverage")
    inst.kind = InstanceKind::Coverage;
  else if (kind == "feature")
    inst.kind = InstanceKind::Feature;
  else
    throw std::runtime_error("instance JSON: unknown kind '" + kind + "'");
  inst.ground = GroundSet(require(j, "n").get<int>(), require(j, "k").get<int>());
  inst.attacker_budgets = ivector_from_json(require(j, "attacker_budgets"));
  inst.defender_budgets = ivector_from_json(require(j, "defender_budgets"));
  const json& rng = require(j, "rng");
  inst.rng_name = require(rng, "generator").get<std::string>();
  inst.seed = require(rng, "seed").get<std::uint64_t>();
  const json& scen = require(j, "scenarios");
  inst.xi = imatrix_from_json(require(scen, "xi"));
  inst.reference_p = vector_from_json(require(scen, "reference_p"));
  const json& amb = require(j, "ambiguity");
  const std::string amb_type = require(amb, "type").get<std::string>();
  if (amb_type == "moment")
    inst.ambiguity_kind = AmbiguityKind::Moment;
  else if (amb_type == "wasserstein")
    inst.ambiguity_kind = AmbiguityKind::Wasserstein;
  else
    throw std::runtime_error("instance JSON: unknown ambiguity type '" + amb_type + "'");
  inst.ambiguity_epsilon = require(amb, "epsilon").get<double>();
  if (inst.kind == InstanceKind::Coverage) {
    const json& cov = require(j, "coverage");
    inst.coords = matrix_from_json(require(cov, "coords"));
    inst.site_rewards = vector_from_json(require(cov, "site_rewards"));
    inst.radii = vector_from_json(require(cov, "radii"));
    inst.mu = matrix_from_json(require(cov, "mu"));
  } else {
    const json& feat = require(j, "feature");
    for (const auto& m : require(feat, "w")) inst.w.push_back(matrix_from_json(m));
  }
  inst.validate();
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_instance: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_instance: cannot open " + path);
  out << instance_to_json(inst) << '\n';
}

Eigen::MatrixXd load_csv_matrix(const std::string& path, std::vector<std::string>* headers) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv_matrix: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_csv_matrix: empty file " + path);
  std::vector<std::string> names;
  {
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) names.push_back(cell);
  }
  if (headers) *headers = names;
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(row, cell, ',')) {
      try {
        size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size() && cell.find_first_not_of(" \t\r", used) != std::string::npos)
          throw std::invalid_argument(cell);
        vals.push_back(v);
      } catch (const std::exception&) {
        throw std::runtime_error("load_csv_matrix: non-numeric entry '" + cell + "' at line " +
                                 std::to_string(lineno));
      }
    }
    if (vals.size() != names.size())
      throw std::runtime_error("load_csv_matrix: wrong column count at line " +
                               std::to_string(lineno));
    rows.push_back(std::move(vals));
  }
  Eigen::MatrixXd data(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(names.size()));
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < names.size(); ++c)
      data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return data;
}

}  // namespace ksip
