#include "ksip/defender.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace ksip {

void DefenderProblem::validate() const {
  if (!oracle) throw std::invalid_argument("DefenderProblem: missing oracle");
  const GroundSet& g = oracle->ground();
  if (blocked.rows() != g.k || blocked.cols() != g.n)
    throw std::invalid_argument("DefenderProblem: blocked mask must be k x n");
  if (budgets.size() != g.k) throw std::invalid_argument("DefenderProblem: budgets must have size k");
  if ((budgets.array() < 0).any())
    throw std::invalid_argument("DefenderProblem: budgets must be nonnegative");
}

DefenderSolution greedy_feasible(const DefenderProblem& p) {
  p.validate();
  const GroundSet& g = p.oracle->ground();
  KTuple s(g);
  Eigen::VectorXi used = Eigen::VectorXi::Zero(g.k);
  double value = 0.0;
  Eigen::VectorXd gain;
  for (;;) {
    int best_q = -1, best_i = -1;
    double best_gain = -1.0;
    for (int q = 1; q <= g.k; ++q) {
      if (used[q - 1] >= p.budgets[q - 1]) continue;
      p.oracle->slot_gains(s, value, q, gain);
      for (int i = 0; i < g.n; ++i) {
        if (s.assigned(i) || p.blocked(q - 1, i)) continue;
        if (gain[i] >= 0.0 && gain[i] > best_gain) {
          best_gain = gain[i];
          best_q = q;
          best_i = i;
        }
      }
    }
    if (best_q < 0) break;
    s.assign(best_i, best_q);
    used[best_q - 1] += 1;
    value += best_gain;
  }
  DefenderSolution out{s, p.oracle->evaluate(s), 0, 0.0, DefenderStatus::Optimal};
  out.bound = out.value;
  return out;
}

namespace {

/// Bound restricted to a candidate item list (the items not yet decided by
/// the search); the public additive_gain_bound passes every unassigned item.
double bound_over(const FunctionOracle& f, const KTuple& partial, double partial_value,
                  const Eigen::VectorXi& residual, const BlockedMask& blocked,
                  const std::vector<int>& candidates) {
  const int k = f.ground().k;
  double bound = partial_value;
  std::vector<double> gains;
  for (int q = 1; q <= k; ++q) {
    const int budget = residual[q - 1];
    if (budget <= 0) continue;
    gains.clear();
    for (int i : candidates) {
      if (partial.assigned(i) || blocked(q - 1, i)) continue;
      const double gain = f.evaluate(partial.with(i, q)) - partial_value;
      if (gain > 0.0) gains.push_back(gain);
    }
    const int take = std::min<int>(budget, static_cast<int>(gains.size()));
    std::partial_sort(gains.begin(), gains.begin() + take, gains.end(), std::greater<>());
    for (int t = 0; t < take; ++t) bound += gains[static_cast<size_t>(t)];
  }
  return bound;
}

}  // namespace

double additive_gain_bound(const FunctionOracle& f, const KTuple& partial,
                           const Eigen::VectorXi& residual_budgets, const BlockedMask& blocked) {
  std::vector<int> candidates;
  for (int i = 0; i < f.ground().n; ++i)
    if (!partial.assigned(i)) candidates.push_back(i);
  return bound_over(f, partial, f.evaluate(partial), residual_budgets, blocked, candidates);
}

// Depth-first search over which item is chosen next (in descending fresh
// gain order), so the tree depth is the total budget rather than n.
// Children inherit valid bounds from the parent's gain vector via
// diminishing returns; fresh gains are computed once per expanded node.
namespace {

struct ExactSearch {
  const FunctionOracle& f;
  const DefenderProblem& p;
  const GroundSet& g;
  long node_limit;
  long nodes = 0;
  bool limit_hit = false;
  double inc_value;
  KTuple incumbent;
  KTuple partial;
  Eigen::VectorXi residual;
  double root_bound = 0.0;
  static constexpr double kTol = 1e-12;

  ExactSearch(const DefenderProblem& p_, const KTuple& warm, double warm_value, long limit)
      : f(*p_.oracle),
        p(p_),
        g(f.ground()),
        node_limit(limit),
        inc_value(warm_value),
        incumbent(warm),
        partial(f.ground()),
        residual(p_.budgets) {}

  // cand: items still allowed at this node; value = f(partial).
  void expand(const std::vector<int>& cand, double value, int depth) {
    if (++nodes > node_limit) {
      limit_hit = true;
      return;
    }
    if (cand.empty() || residual.sum() == 0) return;

    // Fresh gains per slot; items with no positive gain in any open slot
    // can be dropped (diminishing returns keeps their gains at zero).
    std::vector<Eigen::VectorXd> gq(static_cast<size_t>(g.k));
    Eigen::VectorXd gain;
    for (int q = 1; q <= g.k; ++q) {
      auto& v = gq[static_cast<size_t>(q - 1)];
      v = Eigen::VectorXd::Zero(g.n);
      if (residual[q - 1] <= 0) continue;
      f.slot_gains(partial, value, q, gain);
      for (int i : cand)
        if (!p.blocked(q - 1, i) && gain[i] > 0.0) v[i] = gain[i];
    }
    std::vector<std::pair<double, int>> keyed;
    keyed.reserve(cand.size());
    for (int i : cand) {
      double best = 0.0;
      for (int q = 1; q <= g.k; ++q) best = std::max(best, gq[static_cast<size_t>(q - 1)][i]);
      if (best > 0.0) keyed.emplace_back(best, i);
    }
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    const int len = static_cast<int>(keyed.size());

    // Suffix top-gain prefix sums per slot: tops(q, pos, r) = sum of the r
    // largest slot-q gains among keyed[pos..].
    const int bmax = residual.maxCoeff();
    std::vector<double> tops(static_cast<size_t>(g.k * (len + 1) * (bmax + 1)), 0.0);
    auto at = [&](int q, int pos, int r) -> double& {
      return tops[static_cast<size_t>((q * (len + 1) + pos) * (bmax + 1) + r)];
    };
    std::vector<double> buf;
    for (int q = 0; q < g.k; ++q) {
      buf.clear();
      for (int pos = len - 1; pos >= 0; --pos) {
        const double c = gq[static_cast<size_t>(q)][keyed[static_cast<size_t>(pos)].second];
        buf.insert(std::lower_bound(buf.begin(), buf.end(), c, std::greater<double>()), c);
        if (static_cast<int>(buf.size()) > bmax) buf.pop_back();
        double acc = 0.0;
        for (int r = 1; r <= bmax; ++r) {
          if (r <= static_cast<int>(buf.size())) acc += buf[static_cast<size_t>(r - 1)];
          at(q, pos, r) = acc;
        }
      }
    }

    double node_bound = value;
    for (int q = 0; q < g.k; ++q) node_bound += at(q, 0, residual[q]);
    if (depth == 0) root_bound = node_bound;
    if (node_bound <= inc_value + kTol) return;

    std::vector<int> child_cand;
    for (int ci = 0; ci < len; ++ci) {
      const int i = keyed[static_cast<size_t>(ci)].second;
      for (int q = 1; q <= g.k; ++q) {
        const double gqi = gq[static_cast<size_t>(q - 1)][i];
        if (gqi <= 0.0 || residual[q - 1] <= 0) continue;
        const double child_value = value + gqi;
        partial.assign(i, q);
        residual[q - 1] -= 1;
        if (child_value > inc_value + kTol) {
          inc_value = child_value;
          incumbent = partial;
        }
        double child_bound = child_value;
        for (int qq = 0; qq < g.k; ++qq) child_bound += at(qq, ci + 1, residual[qq]);
        if (child_bound > inc_value + kTol) {
          child_cand.clear();
          for (int cj = ci + 1; cj < len; ++cj)
            child_cand.push_back(keyed[static_cast<size_t>(cj)].second);
          expand(child_cand, child_value, depth + 1);
        }
        partial.assign(i, 0);
        residual[q - 1] += 1;
        if (limit_hit) return;
      }
    }
  }
};

}  // namespace

DefenderSolution solve_exact(const DefenderProblem& p, long node_limit) {
  p.validate();
  const DefenderSolution warm = greedy_feasible(p);

  ExactSearch search(p, warm.s, warm.value, node_limit);
  std::vector<int> cand(static_cast<size_t>(search.g.n));
  for (int i = 0; i < search.g.n; ++i) cand[static_cast<size_t>(i)] = i;
  search.expand(cand, 0.0, 0);

  DefenderSolution out{search.incumbent, search.inc_value, search.nodes, search.inc_value,
                       DefenderStatus::Optimal};
  if (search.limit_hit) {
    out.status = DefenderStatus::NodeLimit;
    out.bound = std::max(search.root_bound, search.inc_value);
  }
  return out;
}

}  // namespace ksip
