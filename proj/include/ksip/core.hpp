#pragma once

#include <Eigen/Dense>

#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ksip {

/// Ground set N = {0..n-1} with k item types (slots).
struct GroundSet {
  int n = 0;
  int k = 0;

  GroundSet() = default;
  GroundSet(int n_, int k_) : n(n_), k(k_) {
    if (n < 1 || k < 1) throw std::invalid_argument("GroundSet: n and k must be >= 1");
  }

  bool operator==(const GroundSet&) const = default;
};

/// A tuple of k pairwise-disjoint subsets of the ground set, stored as a
/// single assignment vector: slot(i) == q > 0 means item i belongs to the
/// q-th subset, 0 means unassigned. Disjointness holds by construction.
class KTuple {
 public:
  explicit KTuple(const GroundSet& g) : ground_(g), slot_(g.n, 0) {}

  const GroundSet& ground() const { return ground_; }

  int slot(int i) const { return slot_[i]; }
  bool assigned(int i) const { return slot_[i] != 0; }

  void assign(int i, int q) {
    if (q < 0 || q > ground_.k) throw std::invalid_argument("KTuple::assign: slot out of range");
    slot_[i] = q;
  }

  KTuple with(int i, int q) const {
    KTuple t(*this);
    t.assign(i, q);
    return t;
  }

  int support_size(int q) const {
    int c = 0;
    for (int s : slot_)
      if (s == q) ++c;
    return c;
  }

  int total_assigned() const {
    int c = 0;
    for (int s : slot_)
      if (s != 0) ++c;
    return c;
  }

  bool empty() const { return total_assigned() == 0; }

  /// Items in subset q, ascending.
  std::vector<int> items(int q) const {
    std::vector<int> out;
    for (int i = 0; i < ground_.n; ++i)
      if (slot_[i] == q) out.push_back(i);
    return out;
  }

  bool operator==(const KTuple& o) const { return ground_ == o.ground_ && slot_ == o.slot_; }

 private:
  GroundSet ground_;
  std::vector<int> slot_;
};

/// Componentwise subset: X_q subseteq Y_q for every q.
bool subset_of(const KTuple& x, const KTuple& y);

/// Meet and join of two tuples: componentwise intersection, and
/// componentwise union with items claimed by two distinct slots dropped.
std::pair<KTuple, KTuple> meet_join(const KTuple& x, const KTuple& y);

/// Evaluable objective over KTuples with a fixed ground set.
/// Evaluation is pure; f(empty tuple) = 0 for the concrete variants below.
class FunctionOracle {
 public:
  explicit FunctionOracle(GroundSet g) : ground_(g) {}
  virtual ~FunctionOracle() = default;

  const GroundSet& ground() const { return ground_; }
  virtual double evaluate(const KTuple& s) const = 0;

  /// Marginal gains of inserting each unassigned item into slot q
  /// (1-based); entries of assigned items are set to zero. base must equal
  /// evaluate(s). The default does one evaluation per item; the concrete
  /// oracles override it with an incremental sweep.
  virtual void slot_gains(const KTuple& s, double base, int q, Eigen::VectorXd& out) const;

 private:
  GroundSet ground_;
};

/// Weighted coverage objective: sum over sites of the best reward among
/// sensor types covering the site. A type-q sensor at location j covers
/// site i iff the Euclidean distance d_ij <= radii[q] (closed ball).
/// Sites double as candidate sensor locations.
class CoverageOracle final : public FunctionOracle {
 public:
  CoverageOracle(Eigen::MatrixXd coords, Eigen::MatrixXd rewards, Eigen::VectorXd radii);

  double evaluate(const KTuple& s) const override;
  void slot_gains(const KTuple& s, double base, int q, Eigen::VectorXd& out) const override;

  const Eigen::MatrixXd& rewards() const { return rewards_; }
  /// True iff a type-q (1-based) sensor at location j covers site i.
  bool covers(int q, int i, int j) const { return covers_[q - 1](i, j); }

 private:
  Eigen::MatrixXd rewards_;  // n x k
  std::vector<Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>> covers_;  // per type, n x n
};

/// Facility-location style similarity objective over a single subset
/// (k = 1): f(S) = sum_i max_{j in S} w(i, j), 0 on the empty set.
class SimilarityOracle final : public FunctionOracle {
 public:
  explicit SimilarityOracle(Eigen::MatrixXd w);

  double evaluate(const KTuple& s) const override;
  void slot_gains(const KTuple& s, double base, int q, Eigen::VectorXd& out) const override;

  const Eigen::MatrixXd& weights() const { return w_; }

 private:
  Eigen::MatrixXd w_;  // n x n, nonnegative
};

/// rho_{q,i}(X) = f(X + i into slot q) - f(X). Requires i unassigned in X.
double marginal_gain(const FunctionOracle& f, const KTuple& x, int q, int i);

/// Exhaustively verifies the k-submodular inequality over all tuple pairs
/// and monotonicity under single-item additions. Guarded: throws if
/// (k+1)^n exceeds max_tuples (pair enumeration squares the tuple count).
bool check_k_submodular(const FunctionOracle& f, long max_tuples = 3000, double tol = 1e-9);

/// Enumerates all (k+1)^n assignment vectors of the ground set in
/// lexicographic order, invoking fn(const KTuple&). Shared by the
/// exhaustive checkers.
template <typename Fn>
void for_each_ktuple(const GroundSet& g, Fn&& fn) {
  KTuple t(g);
  std::vector<int> digits(g.n, 0);
  for (;;) {
    fn(static_cast<const KTuple&>(t));
    int pos = 0;
    while (pos < g.n) {
      if (digits[pos] < g.k) {
        ++digits[pos];
        t.assign(pos, digits[pos]);
        break;
      }
      digits[pos] = 0;
      t.assign(pos, 0);
      ++pos;
    }
    if (pos == g.n) return;
  }
}

}  // namespace ksip
