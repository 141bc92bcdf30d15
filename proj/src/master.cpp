#include "ksip/master.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace ksip {

AttackerPolytope::AttackerPolytope(GroundSet g, Eigen::VectorXi budgets_)
    : ground(g), budgets(std::move(budgets_)) {
  if (budgets.size() != ground.k)
    throw std::invalid_argument("AttackerPolytope: budgets must have size k");
  if ((budgets.array() < 0).any())
    throw std::invalid_argument("AttackerPolytope: budgets must be nonnegative");
}

bool is_feasible(const AttackVector& x, const AttackerPolytope& polytope) {
  const GroundSet& g = polytope.ground;
  if (x.rows() != g.k || x.cols() != g.n) return false;
  for (int q = 0; q < g.k; ++q)
    for (int i = 0; i < g.n; ++i)
      if (x(q, i) != 0 && x(q, i) != 1) return false;
  for (int q = 0; q < g.k; ++q)
    if (x.row(q).sum() > polytope.budgets[q]) return false;
  for (int i = 0; i < g.n; ++i)
    if (x.col(i).sum() > 1) return false;
  return true;
}

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Depth-first search over item assignments (each item takes one type or
// none). Items are visited in decreasing order of their largest cut
// coefficient; the node bound subtracts, per cut and type, the largest
// remaining coefficients the residual budget can still buy, ignoring the
// one-type-per-item coupling (an underestimate, hence a valid bound).
struct Search {
  const std::vector<Cut>& pool;
  const GroundSet& g;
  const Eigen::VectorXi& budgets;
  long node_limit;
  long nodes = 0;
  bool limit_hit = false;

  int P, bmax;
  std::vector<int> order;       // item visit order
  std::vector<double> coef;     // [(q*n+i)*P + t], cut-minor for contiguous scans
  std::vector<double> qmax;     // [q*n+i] max coefficient over cuts
  std::vector<double> topsum;   // [((q*(n+1)+pos)*(bmax+1)+r)*P + t]
  std::vector<int> forced;      // item -> type fixed to 1, or -1
  std::vector<char> banned;     // [q*n+i] position fixed to 0
  std::vector<int> cur;         // DFS assignment, item -> type or -1
  std::vector<int> witness;     // best assignment seen, value <= best_eta
  double best_eta = kInfinity;

  Search(const std::vector<Cut>& pool_, const AttackerPolytope& polytope, long limit)
      : pool(pool_),
        g(polytope.ground),
        budgets(polytope.budgets),
        node_limit(limit),
        P(static_cast<int>(pool_.size())),
        bmax(g.k > 0 ? budgets.maxCoeff() : 0),
        forced(static_cast<size_t>(g.n), -1),
        banned(static_cast<size_t>(g.k * g.n), 0),
        cur(static_cast<size_t>(g.n), -1),
        witness(static_cast<size_t>(g.n), -1) {
    coef.assign(static_cast<size_t>(g.k * g.n * P), 0.0);
    qmax.assign(static_cast<size_t>(g.k * g.n), 0.0);
    for (int t = 0; t < P; ++t)
      for (int q = 0; q < g.k; ++q)
        for (int i = 0; i < g.n; ++i) {
          const double c = pool[static_cast<size_t>(t)].coeff(q, i);
          coef[static_cast<size_t>((q * g.n + i) * P + t)] = c;
          auto& m = qmax[static_cast<size_t>(q * g.n + i)];
          m = std::max(m, c);
        }
    order.resize(static_cast<size_t>(g.n));
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> score(static_cast<size_t>(g.n), 0.0);
    for (int q = 0; q < g.k; ++q)
      for (int i = 0; i < g.n; ++i)
        score[static_cast<size_t>(i)] =
            std::max(score[static_cast<size_t>(i)], qmax[static_cast<size_t>(q * g.n + i)]);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return score[static_cast<size_t>(a)] > score[static_cast<size_t>(b)]; });

    // Suffix top-coefficient prefix sums for the bound.
    topsum.assign(static_cast<size_t>(P * g.k * (g.n + 1) * (bmax + 1)), 0.0);
    std::vector<double> tops;
    for (int t = 0; t < P; ++t)
      for (int q = 0; q < g.k; ++q) {
        tops.clear();
        for (int pos = g.n - 1; pos >= 0; --pos) {
          const double c = std::max(pool[static_cast<size_t>(t)].coeff(q, order[static_cast<size_t>(pos)]), 0.0);
          tops.insert(std::lower_bound(tops.begin(), tops.end(), c, std::greater<double>()), c);
          if (static_cast<int>(tops.size()) > bmax) tops.pop_back();
          double acc = 0.0;
          for (int r = 1; r <= bmax; ++r) {
            if (r <= static_cast<int>(tops.size())) acc += tops[static_cast<size_t>(r - 1)];
            at(t, q, pos, r) = acc;
          }
        }
      }
  }

  double& at(int t, int q, int pos, int r) {
    return topsum[static_cast<size_t>(((q * (g.n + 1) + pos) * (bmax + 1) + r) * P + t)];
  }

  // Prune test: does some cut already certify bound >= threshold? Newest
  // cuts are the tightest, so scan them first and exit early; the cut-minor
  // layout keeps each scan sequential in memory.
  bool bound_reaches(const std::vector<double>& vals, int pos, const Eigen::VectorXi& rem,
                     double threshold) {
    const double* top0 = &topsum[static_cast<size_t>(((0 * (g.n + 1) + pos) * (bmax + 1) + rem[0]) * P)];
    if (g.k == 1) {
      for (int t = P - 1; t >= 0; --t)
        if (vals[static_cast<size_t>(t)] - top0[t] >= threshold) return true;
      return false;
    }
    for (int t = P - 1; t >= 0; --t) {
      double v = vals[static_cast<size_t>(t)] - top0[t];
      for (int q = 1; q < g.k; ++q)
        v -= topsum[static_cast<size_t>(((q * (g.n + 1) + pos) * (bmax + 1) + rem[q]) * P + t)];
      if (v >= threshold) return true;
    }
    return false;
  }

  static double peak(const std::vector<double>& vals) {
    double v = -kInfinity;
    for (double x : vals) v = std::max(v, x);
    return v;
  }

  void apply(int q, int i, std::vector<double>& vals, Eigen::VectorXi& rem, double sign) {
    const double* c = &coef[static_cast<size_t>((q * g.n + i) * P)];
    for (int t = 0; t < P; ++t) vals[static_cast<size_t>(t)] -= sign * c[t];
    rem[q] -= static_cast<int>(sign);
  }

  // Types worth trying at item i, best immediate reduction first.
  void type_order(int i, int* qs, int& nq) {
    nq = 0;
    for (int q = 0; q < g.k; ++q) qs[nq++] = q;
    if (g.k > 1) {
      std::sort(qs, qs + nq, [&](int a, int b) {
        return qmax[static_cast<size_t>(a * g.n + i)] > qmax[static_cast<size_t>(b * g.n + i)];
      });
    }
  }

  void optimize(int pos, std::vector<double>& vals, Eigen::VectorXi& rem) {
    if (++nodes > node_limit) {
      limit_hit = true;
      return;
    }
    if (pos == g.n || rem.sum() == 0) {
      const double v = peak(vals);
      if (v < best_eta) {
        best_eta = v;
        witness = cur;
      }
      return;
    }
    if (bound_reaches(vals, pos, rem, best_eta - 1e-12)) return;
    const int i = order[static_cast<size_t>(pos)];
    int qs[8], nq;
    type_order(i, qs, nq);
    for (int s = 0; s < nq; ++s) {
      const int q = qs[s];
      if (rem[q] <= 0) continue;
      apply(q, i, vals, rem, 1.0);
      cur[static_cast<size_t>(i)] = q;
      optimize(pos + 1, vals, rem);
      cur[static_cast<size_t>(i)] = -1;
      apply(q, i, vals, rem, -1.0);
      if (limit_hit) return;
    }
    optimize(pos + 1, vals, rem);
  }

  // Feasibility of value <= target under the current forced/banned fixing.
  bool attainable(int pos, std::vector<double>& vals, Eigen::VectorXi& rem, double target) {
    if (++nodes > node_limit) {
      limit_hit = true;
      return false;
    }
    if (bound_reaches(vals, pos, rem, std::nextafter(target, kInfinity))) return false;
    if (pos == g.n) {
      if (peak(vals) > target) return false;
      witness = cur;
      return true;
    }
    const int i = order[static_cast<size_t>(pos)];
    if (forced[static_cast<size_t>(i)] >= 0) {
      const int q = forced[static_cast<size_t>(i)];
      if (rem[q] <= 0) return false;
      apply(q, i, vals, rem, 1.0);
      cur[static_cast<size_t>(i)] = q;
      const bool ok = attainable(pos + 1, vals, rem, target);
      cur[static_cast<size_t>(i)] = -1;
      apply(q, i, vals, rem, -1.0);
      return ok;
    }
    int qs[8], nq;
    type_order(i, qs, nq);
    for (int s = 0; s < nq; ++s) {
      const int q = qs[s];
      if (rem[q] <= 0 || banned[static_cast<size_t>(q * g.n + i)]) continue;
      apply(q, i, vals, rem, 1.0);
      cur[static_cast<size_t>(i)] = q;
      const bool ok = attainable(pos + 1, vals, rem, target);
      cur[static_cast<size_t>(i)] = -1;
      apply(q, i, vals, rem, -1.0);
      if (ok || limit_hit) return ok;
    }
    return attainable(pos + 1, vals, rem, target);
  }

  std::vector<double> base_vals() const {
    std::vector<double> vals(static_cast<size_t>(P));
    for (int t = 0; t < P; ++t) vals[static_cast<size_t>(t)] = pool[static_cast<size_t>(t)].constant;
    return vals;
  }

  double value_at(const AttackVector& x) const {
    double v = -kInfinity;
    for (const Cut& cut : pool) {
      double c = cut.constant;
      for (int q = 0; q < g.k; ++q)
        for (int i = 0; i < g.n; ++i) c -= cut.coeff(q, i) * x(q, i);
      v = std::max(v, c);
    }
    return v;
  }

  // Greedy descent used to seed the incumbent and witness.
  void greedy() {
    std::vector<double> vals = base_vals();
    Eigen::VectorXi rem = budgets;
    std::vector<int> picks(static_cast<size_t>(g.n), -1);
    std::vector<char> used(static_cast<size_t>(g.n), 0);
    for (;;) {
      int bq = -1, bi = -1;
      double best_after = kInfinity;
      for (int q = 0; q < g.k; ++q) {
        if (rem[q] <= 0) continue;
        for (int i = 0; i < g.n; ++i) {
          if (used[static_cast<size_t>(i)]) continue;
          const double* c = &coef[static_cast<size_t>((q * g.n + i) * P)];
          double after = -kInfinity;
          for (int t = 0; t < P; ++t)
            after = std::max(after, vals[static_cast<size_t>(t)] - c[t]);
          if (after < best_after) {
            best_after = after;
            bq = q;
            bi = i;
          }
        }
      }
      if (bq < 0) break;
      used[static_cast<size_t>(bi)] = 1;
      picks[static_cast<size_t>(bi)] = bq;
      apply(bq, bi, vals, rem, 1.0);
    }
    const double v = peak(vals);
    if (v < best_eta) {
      best_eta = v;
      witness = picks;
    }
  }

  void seed(const AttackVector& x) {
    const double v = value_at(x);
    if (v >= best_eta) return;
    best_eta = v;
    for (int i = 0; i < g.n; ++i) {
      witness[static_cast<size_t>(i)] = -1;
      for (int q = 0; q < g.k; ++q)
        if (x(q, i) == 1) witness[static_cast<size_t>(i)] = q;
    }
  }
};

}  // namespace

MasterResult solve_master(const std::vector<Cut>& pool, const AttackerPolytope& polytope,
                          long node_limit, const AttackVector* warm_start) {
  MasterResult result;
  const GroundSet& g = polytope.ground;
  result.x = AttackVector::Zero(g.k, g.n);
  if (pool.empty()) {
    result.status = MasterStatus::Unbounded;
    return result;
  }
  Search search(pool, polytope, node_limit);
  search.greedy();
  if (warm_start != nullptr && is_feasible(*warm_start, polytope)) search.seed(*warm_start);

  std::vector<double> vals = search.base_vals();
  Eigen::VectorXi rem = polytope.budgets;
  search.optimize(0, vals, rem);
  if (search.limit_hit) {
    result.status = MasterStatus::NodeLimit;
    result.nodes = search.nodes;
    return result;
  }

  // Lexicographic refinement: fix positions to zero in row-major order
  // whenever the optimum stays attainable, otherwise force them to one.
  // The witness (an optimal assignment honoring every fixing so far) lets
  // positions it avoids be banned without a search.
  const double tol = 1e-9 * std::max(1.0, std::abs(search.best_eta));
  const double target = search.best_eta + tol;
  for (int q = 0; q < g.k && !search.limit_hit; ++q)
    for (int i = 0; i < g.n && !search.limit_hit; ++i) {
      if (search.forced[static_cast<size_t>(i)] >= 0) continue;
      search.banned[static_cast<size_t>(q * g.n + i)] = 1;
      if (search.witness[static_cast<size_t>(i)] == q) {
        vals = search.base_vals();
        rem = polytope.budgets;
        if (!search.attainable(0, vals, rem, target) && !search.limit_hit) {
          search.banned[static_cast<size_t>(q * g.n + i)] = 0;
          search.forced[static_cast<size_t>(i)] = q;
        }
      }
    }
  result.nodes = search.nodes;
  if (search.limit_hit) {
    result.status = MasterStatus::NodeLimit;
    return result;
  }
  for (int i = 0; i < g.n; ++i)
    if (search.forced[static_cast<size_t>(i)] >= 0) result.x(search.forced[static_cast<size_t>(i)], i) = 1;
  if (search.value_at(result.x) > target + 1e-9 * std::max(1.0, std::abs(target)))
    throw std::runtime_error("solve_master: lexicographic refinement failed");
  result.status = MasterStatus::Optimal;
  result.eta = search.best_eta;
  return result;
}

}  // namespace ksip
