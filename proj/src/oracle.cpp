#include "ksip/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ksip::oracle {

namespace {

constexpr double kFeasTol = 1e-9;

long ipow_guarded(long base, int exp, long guard) {
  long v = 1;
  for (int i = 0; i < exp; ++i) {
    if (v > guard / base) return guard + 1;
    v *= base;
  }
  return v;
}

bool tuple_feasible(const KTuple& t, const BlockedMask& blocked, const Eigen::VectorXi& budgets) {
  const GroundSet& g = t.ground();
  for (int q = 1; q <= g.k; ++q)
    if (t.support_size(q) > budgets[q - 1]) return false;
  for (int i = 0; i < g.n; ++i) {
    const int q = t.slot(i);
    if (q != 0 && blocked(q - 1, i)) return false;
  }
  return true;
}

}  // namespace

BruteDefenderResult brute_defender(const FunctionOracle& f, const BlockedMask& blocked,
                                   const Eigen::VectorXi& budgets, long guard) {
  const GroundSet& g = f.ground();
  if (blocked.rows() != g.k || blocked.cols() != g.n)
    throw std::invalid_argument("brute_defender: blocked mask must be k x n");
  if (budgets.size() != g.k)
    throw std::invalid_argument("brute_defender: budgets must have size k");
  if (ipow_guarded(g.k + 1, g.n, guard) > guard)
    throw std::invalid_argument("brute_defender: (k+1)^n exceeds the enumeration guard");
  BruteDefenderResult best{KTuple(g), 0.0};
  for_each_ktuple(g, [&](const KTuple& t) {
    if (!tuple_feasible(t, blocked, budgets)) return;
    const double v = f.evaluate(t);
    if (v > best.value + 1e-12) {
      best.value = v;
      best.s = t;
    }
  });
  return best;
}

std::vector<Eigen::VectorXd> moment_vertices(const MomentMatchingSet& set, long guard) {
  const int s = set.num_scenarios();
  const int n = static_cast<int>(set.mean().size());
  // Inequalities over p in R^s: p_w >= 0, l1 <= xi^T p <= u1. Rows are
  // stored as a * p >= b.
  const int m = s + 2 * n;
  Eigen::MatrixXd rows(m, s);
  Eigen::VectorXd rhs(m);
  int r = 0;
  for (int w = 0; w < s; ++w, ++r) {
    rows.row(r).setZero();
    rows(r, w) = 1.0;
    rhs[r] = 0.0;
  }
  const Eigen::MatrixXd xit = set.xi().cast<double>();  // s x n
  for (int j = 0; j < n; ++j, ++r) {
    rows.row(r) = xit.col(j).transpose();
    rhs[r] = set.lower()[j];
  }
  for (int j = 0; j < n; ++j, ++r) {
    rows.row(r) = -xit.col(j).transpose();
    rhs[r] = -set.upper()[j];
  }

  auto feasible = [&](const Eigen::VectorXd& p) {
    return ((rows * p).array() >= rhs.array() - kFeasTol).all() &&
           std::abs(p.sum() - 1.0) <= kFeasTol;
  };

  std::vector<Eigen::VectorXd> vertices;
  auto record = [&](const Eigen::VectorXd& p) {
    for (const Eigen::VectorXd& q : vertices)
      if ((p - q).lpNorm<Eigen::Infinity>() <= 1e-7) return;
    vertices.push_back(p);
  };

  if (s == 1) {
    Eigen::VectorXd p(1);
    p[0] = 1.0;
    if (feasible(p)) record(p);
    return vertices;
  }

  // A vertex activates the simplex equality plus s - 1 independent
  // inequality rows. Enumerate the (s-1)-subsets.
  long combos = 1;
  for (int i = 0; i < s - 1; ++i) combos = combos * (m - i) / (i + 1);
  if (combos > guard)
    throw std::invalid_argument("moment_vertices: constraint subsets exceed the guard");

  std::vector<int> pick(static_cast<size_t>(s - 1));
  for (int i = 0; i < s - 1; ++i) pick[static_cast<size_t>(i)] = i;
  Eigen::MatrixXd system(s, s);
  Eigen::VectorXd b(s);
  for (;;) {
    system.row(0).setOnes();
    b[0] = 1.0;
    for (int i = 0; i < s - 1; ++i) {
      system.row(i + 1) = rows.row(pick[static_cast<size_t>(i)]);
      b[i + 1] = rhs[pick[static_cast<size_t>(i)]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
    if (lu.isInvertible()) {
      const Eigen::VectorXd p = lu.solve(b);
      if (feasible(p)) record(p);
    }
    // next combination
    int i = s - 2;
    while (i >= 0 && pick[static_cast<size_t>(i)] == m - (s - 1) + i) --i;
    if (i < 0) break;
    ++pick[static_cast<size_t>(i)];
    for (int j = i + 1; j < s - 1; ++j)
      pick[static_cast<size_t>(j)] = pick[static_cast<size_t>(j - 1)] + 1;
  }
  if (vertices.empty()) throw std::runtime_error("moment_vertices: no vertex found");
  return vertices;
}

namespace {

double wasserstein_max(const Eigen::VectorXd& v, const WassersteinSet& set) {
  const int s = set.num_scenarios();
  const Eigen::VectorXd& p = set.reference();
  const Eigen::MatrixXd& d = set.distances();
  // Dual of the transport problem with the column sums pinned to p:
  //   g(lambda) = sum_j p_j max_i (v_i - lambda d_ij) + lambda eps,
  // convex piecewise linear on lambda >= 0, minimized at a breakpoint of
  // one of the inner maxima (or at zero). Strong duality makes the
  // minimum equal the primal optimum.
  std::vector<double> candidates{0.0};
  for (int j = 0; j < s; ++j)
    for (int i = 0; i < s; ++i)
      for (int h = 0; h < s; ++h) {
        const double dd = d(h, j) - d(i, j);
        if (dd > 1e-12) {
          const double lam = (v[h] - v[i]) / dd;
          if (lam > 0.0) candidates.push_back(lam);
        }
      }
  double best = kInf;
  for (const double lam : candidates) {
    double g = lam * set.epsilon();
    for (int j = 0; j < s; ++j) {
      double inner = -kInf;
      for (int i = 0; i < s; ++i) inner = std::max(inner, v[i] - lam * d(i, j));
      g += p[j] * inner;
    }
    best = std::min(best, g);
  }
  return best;
}

}  // namespace

double extreme_max(const Eigen::VectorXd& values, const AmbiguitySet& set) {
  if (const auto* ms = std::get_if<MomentMatchingSet>(&set)) {
    double best = -kInf;
    for (const Eigen::VectorXd& p : moment_vertices(*ms))
      best = std::max(best, p.dot(values));
    return best;
  }
  return wasserstein_max(values, std::get<WassersteinSet>(set));
}

double extreme_min(const Eigen::VectorXd& values, const AmbiguitySet& set) {
  return -extreme_max(-values, set);
}

double brute_phi(const Instance& inst, const AttackVector& x, Variant variant, long guard) {
  const GroundSet& g = inst.ground;
  if (x.rows() != g.k || x.cols() != g.n)
    throw std::invalid_argument("brute_phi: attack must be k x n");
  if (variant == Variant::Deterministic) {
    BlockedMask blocked(g.k, g.n);
    for (int q = 0; q < g.k; ++q)
      for (int i = 0; i < g.n; ++i) blocked(q, i) = x(q, i) != 0;
    return brute_defender(*inst.oracle(0), blocked, inst.defender_budgets, guard).value;
  }
  const int s = inst.num_scenarios();
  Eigen::VectorXd v(s);
  for (int w = 0; w < s; ++w) {
    BlockedMask blocked(g.k, g.n);
    for (int q = 0; q < g.k; ++q)
      for (int i = 0; i < g.n; ++i) blocked(q, i) = x(q, i) != 0 && inst.xi(w, i) != 0;
    v[w] = brute_defender(*inst.oracle(w), blocked, inst.defender_budgets, guard).value;
  }
  switch (variant) {
    case Variant::RiskNeutral:
      return inst.reference_p.dot(v);
    case Variant::Dra:
      return extreme_max(v, inst.ambiguity());
    case Variant::Drr:
      return extreme_min(v, inst.ambiguity());
    default:
      throw std::logic_error("brute_phi: unreachable");
  }
}

BruteMinmaxResult brute_minmax(const Instance& inst, Variant variant, long guard) {
  const GroundSet& g = inst.ground;
  const int nx = g.k * g.n;
  if (nx >= 24 || (1L << nx) > guard)
    throw std::invalid_argument("brute_minmax: attack enumeration exceeds the guard");
  BruteMinmaxResult best;
  best.value = kInf;
  AttackVector x = AttackVector::Zero(g.k, g.n);
  // Row-major bit assignment, zero branch first, so the first minimizer
  // found is the lexicographically smallest.
  auto dfs = [&](auto&& self, int pos) -> void {
    if (pos == nx) {
      for (int q = 0; q < g.k; ++q)
        if (x.row(q).sum() > inst.attacker_budgets[q]) return;
      for (int i = 0; i < g.n; ++i)
        if (x.col(i).sum() > 1) return;
      const double phi = brute_phi(inst, x, variant, guard);
      if (phi < best.value - 1e-12) {
        best.value = phi;
        best.x = x;
      }
      return;
    }
    const int q = pos / g.n, i = pos % g.n;
    x(q, i) = 0;
    self(self, pos + 1);
    x(q, i) = 1;
    self(self, pos + 1);
    x(q, i) = 0;
  };
  dfs(dfs, 0);
  return best;
}

}  // namespace ksip::oracle
