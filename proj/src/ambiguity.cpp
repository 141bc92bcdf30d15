#include "ksip/ambiguity.hpp"

#include <stdexcept>

namespace ksip {

bool is_distribution(const Eigen::VectorXd& p, double tol) {
  if (p.size() == 0) return false;
  if ((p.array() < -tol).any()) return false;
  return std::abs(p.sum() - 1.0) <= tol * static_cast<double>(p.size());
}

MomentMatchingSet::MomentMatchingSet(Eigen::MatrixXi xi, double epsilon)
    : xi_(std::move(xi)), eps_(epsilon) {
  if (xi_.rows() < 1 || xi_.cols() < 1)
    throw std::invalid_argument("MomentMatchingSet: empty scenario matrix");
  if (eps_ < 0.0) throw std::invalid_argument("MomentMatchingSet: epsilon must be >= 0");
  m1_ = xi_.cast<double>().colwise().mean();
  l1_ = (1.0 - eps_) * m1_;
  u1_ = (1.0 + eps_) * m1_;
  l1_ = l1_.cwiseMax(0.0);
}

WassersteinSet::WassersteinSet(Eigen::MatrixXi xi, Eigen::VectorXd reference, double epsilon)
    : xi_(std::move(xi)), reference_(std::move(reference)), eps_(epsilon) {
  const int s = static_cast<int>(xi_.rows());
  if (s < 1) throw std::invalid_argument("WassersteinSet: empty scenario matrix");
  if (reference_.size() != s)
    throw std::invalid_argument("WassersteinSet: reference size mismatch");
  if (!is_distribution(reference_))
    throw std::invalid_argument("WassersteinSet: reference is not a distribution");
  if (eps_ < 0.0) throw std::invalid_argument("WassersteinSet: epsilon must be >= 0");
  dist_.resize(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      dist_(i, j) = (xi_.row(i) - xi_.row(j)).cwiseAbs().sum();
}

int num_scenarios(const AmbiguitySet& set) {
  return std::visit([](const auto& s) { return s.num_scenarios(); }, set);
}

namespace {

SeparationResult separate_moment(const Eigen::VectorXd& values, const MomentMatchingSet& set,
                                 ObjSense sense) {
  const int s = set.num_scenarios();
  const int n = static_cast<int>(set.xi().cols());
  LinearProgram lp;
  lp.sense = sense;
  lp.c = values;
  const int rows = 1 + 2 * n;
  lp.a = Eigen::MatrixXd::Zero(rows, s);
  lp.b.resize(rows);
  lp.row_sense.resize(static_cast<size_t>(rows));
  lp.a.row(0).setOnes();
  lp.b[0] = 1.0;
  lp.row_sense[0] = RowSense::Eq;
  const Eigen::MatrixXd xid = set.xi().cast<double>();
  for (int j = 0; j < n; ++j) {
    lp.a.row(1 + 2 * j) = xid.col(j).transpose();
    lp.b[1 + 2 * j] = set.lower()[j];
    lp.row_sense[static_cast<size_t>(1 + 2 * j)] = RowSense::Ge;
    lp.a.row(2 + 2 * j) = xid.col(j).transpose();
    lp.b[2 + 2 * j] = set.upper()[j];
    lp.row_sense[static_cast<size_t>(2 + 2 * j)] = RowSense::Le;
  }
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal)
    throw std::runtime_error("separate: moment-matching LP did not solve to optimality");
  return {sol.x, sol.objective, {}};
}

SeparationResult separate_wasserstein(const Eigen::VectorXd& values, const WassersteinSet& set,
                                      ObjSense sense) {
  // Reduced form over the transport plan v only: column sums pinned to the
  // reference, cost budget row; p is the row-sum marginal.
  const int s = set.num_scenarios();
  const int nv = s * s;  // v(i, j) at column i * s + j; mass moved to i from j
  LinearProgram lp;
  lp.sense = sense;
  lp.c.resize(nv);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) lp.c[i * s + j] = values[i];
  const int rows = s + 1;
  lp.a = Eigen::MatrixXd::Zero(rows, nv);
  lp.b.resize(rows);
  lp.row_sense.resize(static_cast<size_t>(rows));
  for (int j = 0; j < s; ++j) {
    for (int i = 0; i < s; ++i) lp.a(j, i * s + j) = 1.0;
    lp.b[j] = set.reference()[j];
    lp.row_sense[static_cast<size_t>(j)] = RowSense::Eq;
  }
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) lp.a(s, i * s + j) = set.distances()(i, j);
  lp.b[s] = set.epsilon();
  lp.row_sense[static_cast<size_t>(s)] = RowSense::Le;
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal)
    throw std::runtime_error("separate: Wasserstein LP did not solve to optimality");
  SeparationResult out;
  out.objective = sol.objective;
  out.transport.resize(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) out.transport(i, j) = sol.x[i * s + j];
  out.distribution = out.transport.rowwise().sum();
  return out;
}

SeparationResult separate(const Eigen::VectorXd& values, const AmbiguitySet& set, ObjSense sense) {
  if (values.size() != num_scenarios(set))
    throw std::invalid_argument("separate: value vector size mismatch");
  return std::visit(
      [&](const auto& concrete) {
        using T = std::decay_t<decltype(concrete)>;
        if constexpr (std::is_same_v<T, MomentMatchingSet>)
          return separate_moment(values, concrete, sense);
        else
          return separate_wasserstein(values, concrete, sense);
      },
      set);
}

}  // namespace

SeparationResult separate_min(const Eigen::VectorXd& values, const AmbiguitySet& set) {
  return separate(values, set, ObjSense::Min);
}

SeparationResult separate_max(const Eigen::VectorXd& values, const AmbiguitySet& set) {
  return separate(values, set, ObjSense::Max);
}

double drr_cut_coefficient(const AmbiguitySet& set, const Eigen::VectorXd& weights) {
  if ((weights.array() < 0).any())
    throw std::invalid_argument("drr_cut_coefficient: weights must be nonnegative");
  if ((weights.array() == 0).all()) return 0.0;
  return separate_max(weights, set).objective;
}

}  // namespace ksip
