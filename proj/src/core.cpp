#include "ksip/core.hpp"

#include <cmath>
#include <cstdint>

namespace ksip {

bool subset_of(const KTuple& x, const KTuple& y) {
  if (!(x.ground() == y.ground())) throw std::invalid_argument("subset_of: mismatched ground sets");
  for (int i = 0; i < x.ground().n; ++i)
    if (x.slot(i) != 0 && x.slot(i) != y.slot(i)) return false;
  return true;
}

std::pair<KTuple, KTuple> meet_join(const KTuple& x, const KTuple& y) {
  if (!(x.ground() == y.ground())) throw std::invalid_argument("meet_join: mismatched ground sets");
  const GroundSet& g = x.ground();
  KTuple meet(g), join(g);
  for (int i = 0; i < g.n; ++i) {
    const int a = x.slot(i), b = y.slot(i);
    if (a != 0 && a == b) meet.assign(i, a);
    if (a == b) {
      join.assign(i, a);
    } else if (a == 0) {
      join.assign(i, b);
    } else if (b == 0) {
      join.assign(i, a);
    }
    // a != b, both nonzero: item claimed by two slots, dropped from the join
  }
  return {meet, join};
}

CoverageOracle::CoverageOracle(Eigen::MatrixXd coords, Eigen::MatrixXd rewards,
                               Eigen::VectorXd radii)
    : FunctionOracle(GroundSet(static_cast<int>(coords.rows()), static_cast<int>(radii.size()))),
      rewards_(std::move(rewards)) {
  const int n = ground().n;
  const int k = ground().k;
  if (coords.cols() != 2) throw std::invalid_argument("CoverageOracle: coords must be n x 2");
  if (rewards_.rows() != n || rewards_.cols() != k)
    throw std::invalid_argument("CoverageOracle: rewards must be n x k");
  if ((radii.array() <= 0).any()) throw std::invalid_argument("CoverageOracle: radii must be positive");
  covers_.reserve(k);
  for (int q = 0; q < k; ++q) {
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> c(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        c(i, j) = (coords.row(i) - coords.row(j)).norm() <= radii[q];
    covers_.push_back(std::move(c));
  }
}

double CoverageOracle::evaluate(const KTuple& s) const {
  if (!(s.ground() == ground())) throw std::invalid_argument("CoverageOracle: mismatched ground set");
  const int n = ground().n;
  std::vector<int> placed;
  placed.reserve(n);
  for (int j = 0; j < n; ++j)
    if (s.assigned(j)) placed.push_back(j);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double best = 0.0;
    for (int j : placed) {
      const int q = s.slot(j);
      if (covers_[q - 1](i, j)) best = std::max(best, rewards_(i, q - 1));
    }
    total += best;
  }
  return total;
}

void FunctionOracle::slot_gains(const KTuple& s, double base, int q, Eigen::VectorXd& out) const {
  const int n = ground().n;
  out = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i)
    if (!s.assigned(i)) out[i] = evaluate(s.with(i, q)) - base;
}

void CoverageOracle::slot_gains(const KTuple& s, double /*base*/, int q,
                                Eigen::VectorXd& out) const {
  const int n = ground().n;
  // Covered reward per site under s; a new type-q sensor at j adds the
  // uncovered remainder of every site it reaches.
  Eigen::VectorXd covered = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    if (!s.assigned(j)) continue;
    const int p = s.slot(j);
    for (int i = 0; i < n; ++i)
      if (covers_[p - 1](i, j)) covered[i] = std::max(covered[i], rewards_(i, p - 1));
  }
  out = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    if (s.assigned(j)) continue;
    double g = 0.0;
    for (int i = 0; i < n; ++i)
      if (covers_[q - 1](i, j)) g += std::max(0.0, rewards_(i, q - 1) - covered[i]);
    out[j] = g;
  }
}

SimilarityOracle::SimilarityOracle(Eigen::MatrixXd w)
    : FunctionOracle(GroundSet(static_cast<int>(w.rows()), 1)), w_(std::move(w)) {
  if (w_.rows() != w_.cols()) throw std::invalid_argument("SimilarityOracle: W must be square");
  if ((w_.array() < 0).any()) throw std::invalid_argument("SimilarityOracle: W must be nonnegative");
}

double SimilarityOracle::evaluate(const KTuple& s) const {
  if (!(s.ground() == ground())) throw std::invalid_argument("SimilarityOracle: mismatched ground set");
  const int n = ground().n;
  std::vector<int> selected;
  selected.reserve(n);
  for (int j = 0; j < n; ++j)
    if (s.assigned(j)) selected.push_back(j);
  if (selected.empty()) return 0.0;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double best = 0.0;
    for (int j : selected) best = std::max(best, w_(i, j));
    total += best;
  }
  return total;
}

void SimilarityOracle::slot_gains(const KTuple& s, double /*base*/, int /*q*/,
                                  Eigen::VectorXd& out) const {
  const int n = ground().n;
  Eigen::VectorXd covered = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j)
    if (s.assigned(j))
      for (int i = 0; i < n; ++i) covered[i] = std::max(covered[i], w_(i, j));
  out = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    if (s.assigned(j)) continue;
    double g = 0.0;
    for (int i = 0; i < n; ++i) g += std::max(0.0, w_(i, j) - covered[i]);
    out[j] = g;
  }
}

double marginal_gain(const FunctionOracle& f, const KTuple& x, int q, int i) {
  if (x.assigned(i)) throw std::invalid_argument("marginal_gain: item already assigned");
  if (q < 1 || q > x.ground().k) throw std::invalid_argument("marginal_gain: slot out of range");
  return f.evaluate(x.with(i, q)) - f.evaluate(x);
}

namespace {

long tuple_count(const GroundSet& g) {
  long count = 1;
  for (int i = 0; i < g.n; ++i) {
    count *= g.k + 1;
    if (count > 100'000'000) return count;  // saturate, caller guards
  }
  return count;
}

long encode(const KTuple& t) {
  const GroundSet& g = t.ground();
  long code = 0;
  for (int i = g.n - 1; i >= 0; --i) code = code * (g.k + 1) + t.slot(i);
  return code;
}

}  // namespace

bool check_k_submodular(const FunctionOracle& f, long max_tuples, double tol) {
  const GroundSet& g = f.ground();
  const long count = tuple_count(g);
  if (count > max_tuples)
    throw std::invalid_argument("check_k_submodular: (k+1)^n exceeds enumeration guard");

  std::vector<double> value(static_cast<size_t>(count));
  std::vector<KTuple> tuples;
  tuples.reserve(static_cast<size_t>(count));
  bool monotone = true;
  for_each_ktuple(g, [&](const KTuple& t) {
    const double v = f.evaluate(t);
    value[static_cast<size_t>(encode(t))] = v;
    tuples.push_back(t);
  });
  // monotone under single-item additions
  for (const KTuple& t : tuples) {
    const double base = value[static_cast<size_t>(encode(t))];
    for (int i = 0; i < g.n && monotone; ++i) {
      if (t.assigned(i)) continue;
      for (int q = 1; q <= g.k; ++q)
        if (value[static_cast<size_t>(encode(t.with(i, q)))] < base - tol) {
          monotone = false;
          break;
        }
    }
    if (!monotone) return false;
  }
  // pairwise meet/join inequality
  for (size_t a = 0; a < tuples.size(); ++a) {
    for (size_t b = a; b < tuples.size(); ++b) {
      auto [meet, join] = meet_join(tuples[a], tuples[b]);
      const double lhs = value[a] + value[b];
      const double rhs = value[static_cast<size_t>(encode(meet))] +
                         value[static_cast<size_t>(encode(join))];
      if (lhs < rhs - tol) return false;
    }
  }
  return true;
}

}  // namespace ksip
