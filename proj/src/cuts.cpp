#include "ksip/cuts.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace ksip {

double cut_rhs(const Cut& cut, const AttackVector& x) {
  return cut.constant - (cut.coeff.array() * x.cast<double>().array()).sum();
}

std::vector<std::vector<int>> sequential_permutation(const FunctionOracle& f, const KTuple& s_hat,
                                                     PermutationMode mode) {
  const GroundSet& g = f.ground();
  std::vector<std::vector<int>> perm(static_cast<size_t>(g.k));
  KTuple prefix(g);
  for (int q = 1; q <= g.k; ++q) {
    std::vector<int> remaining = s_hat.items(q);
    auto& order = perm[static_cast<size_t>(q - 1)];
    if (mode == PermutationMode::IndexOrder) {
      order = remaining;
      for (int i : order) prefix.assign(i, q);
      continue;
    }
    while (!remaining.empty()) {
      int best = -1;
      double best_gain = -1.0;
      for (size_t idx = 0; idx < remaining.size(); ++idx) {
        const double gain = marginal_gain(f, prefix, q, remaining[idx]);
        if (gain > best_gain) {
          best_gain = gain;
          best = static_cast<int>(idx);
        }
      }
      order.push_back(remaining[static_cast<size_t>(best)]);
      prefix.assign(remaining[static_cast<size_t>(best)], q);
      remaining.erase(remaining.begin() + best);
    }
  }
  return perm;
}

Eigen::MatrixXd sequential_coefficients(const FunctionOracle& f, const KTuple& s_hat,
                                        const std::vector<std::vector<int>>& permutation) {
  const GroundSet& g = f.ground();
  if (static_cast<int>(permutation.size()) != g.k)
    throw std::invalid_argument("sequential_coefficients: permutation must have k entries");
  Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(g.k, g.n);
  // Prefix for (q, t): earlier types complete, current type's first t-1
  // items, later types empty.
  KTuple prefix(g);
  double total = 0.0;
  for (int q = 1; q <= g.k; ++q) {
    const auto& order = permutation[static_cast<size_t>(q - 1)];
    {
      std::vector<int> expected = s_hat.items(q);
      std::vector<int> sorted = order;
      std::sort(sorted.begin(), sorted.end());
      if (sorted != expected)
        throw std::invalid_argument("sequential_coefficients: permutation is not a bijection on S_q");
    }
    for (int item : order) {
      const double gain = marginal_gain(f, prefix, q, item);
      coeff(q - 1, item) = gain;
      total += gain;
      prefix.assign(item, q);
    }
  }
  const double whole = f.evaluate(s_hat);
  if (std::abs(total - whole) > 1e-6 * std::max(1.0, std::abs(whole)))
    throw std::logic_error("sequential_coefficients: telescoping identity violated");
  return coeff;
}

Cut cut_basic(const AttackVector& x_hat, const KTuple& s_hat, const FunctionOracle& f) {
  const GroundSet& g = f.ground();
  Cut cut;
  cut.family = CutFamily::Basic;
  cut.generator = x_hat;
  cut.constant = f.evaluate(s_hat);
  cut.coeff = Eigen::MatrixXd::Zero(g.k, g.n);
  const KTuple empty(g);
  for (int q = 1; q <= g.k; ++q)
    for (int i : s_hat.items(q)) cut.coeff(q - 1, i) = marginal_gain(f, empty, q, i);
  return cut;
}

Cut cut_sequential(const AttackVector& x_hat, const KTuple& s_hat, const FunctionOracle& f,
                   const std::vector<std::vector<int>>& permutation) {
  Cut cut;
  cut.family = CutFamily::Sequential;
  cut.generator = x_hat;
  cut.constant = f.evaluate(s_hat);
  cut.coeff = sequential_coefficients(f, s_hat, permutation);
  return cut;
}

Cut cut_sequential(const AttackVector& x_hat, const KTuple& s_hat, const FunctionOracle& f,
                   PermutationMode mode) {
  return cut_sequential(x_hat, s_hat, f, sequential_permutation(f, s_hat, mode));
}

namespace {

/// Sum over scenarios of p_w * sequential coefficients, masked by the
/// attack-success indicators. Shared by the risk-neutral and DRA cuts.
Eigen::MatrixXd weighted_sequential(const std::vector<KTuple>& s_hat, const Eigen::VectorXd& p,
                                    const Eigen::MatrixXi& xi,
                                    const std::vector<const FunctionOracle*>& f,
                                    PermutationMode mode) {
  const GroundSet& g = f.front()->ground();
  Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(g.k, g.n);
  for (size_t w = 0; w < f.size(); ++w) {
    if (p[static_cast<Eigen::Index>(w)] == 0.0) continue;
    const Eigen::MatrixXd sc = sequential_coefficients(
        *f[w], s_hat[w], sequential_permutation(*f[w], s_hat[w], mode));
    for (int q = 0; q < g.k; ++q)
      for (int i = 0; i < g.n; ++i)
        coeff(q, i) += p[static_cast<Eigen::Index>(w)] * sc(q, i) *
                       static_cast<double>(xi(static_cast<Eigen::Index>(w), i));
  }
  return coeff;
}

void check_scenario_inputs(const std::vector<KTuple>& s_hat, const Eigen::MatrixXi& xi,
                           const std::vector<const FunctionOracle*>& f) {
  if (f.empty() || s_hat.size() != f.size() || xi.rows() != static_cast<Eigen::Index>(f.size()))
    throw std::invalid_argument("cut: scenario input sizes disagree");
}

}  // namespace

Cut cut_risk_neutral(const AttackVector& x_hat, const std::vector<KTuple>& s_hat,
                     const Eigen::VectorXd& p_bar, const Eigen::MatrixXi& xi,
                     const std::vector<const FunctionOracle*>& f, PermutationMode mode) {
  check_scenario_inputs(s_hat, xi, f);
  if (!is_distribution(p_bar))
    throw std::invalid_argument("cut_risk_neutral: p_bar is not a distribution");
  Cut cut;
  cut.family = CutFamily::RiskNeutral;
  cut.generator = x_hat;
  cut.constant = 0.0;
  for (size_t w = 0; w < f.size(); ++w)
    cut.constant += p_bar[static_cast<Eigen::Index>(w)] * f[w]->evaluate(s_hat[w]);
  cut.coeff = weighted_sequential(s_hat, p_bar, xi, f, mode);
  return cut;
}

Cut cut_drr(const AttackVector& x_hat, const std::vector<KTuple>& s_hat, const AmbiguitySet& set,
            const Eigen::MatrixXi& xi, const std::vector<const FunctionOracle*>& f) {
  check_scenario_inputs(s_hat, xi, f);
  const GroundSet& g = f.front()->ground();
  const int num_w = static_cast<int>(f.size());

  Eigen::VectorXd values(num_w);
  for (int w = 0; w < num_w; ++w) values[w] = f[static_cast<size_t>(w)]->evaluate(s_hat[static_cast<size_t>(w)]);

  Cut cut;
  cut.family = CutFamily::Drr;
  cut.generator = x_hat;
  cut.constant = separate_min(values, set).objective;
  cut.coeff = Eigen::MatrixXd::Zero(g.k, g.n);

  // Empty-tuple gains per scenario, computed once.
  std::vector<Eigen::MatrixXd> rho0(static_cast<size_t>(num_w));
  for (int w = 0; w < num_w; ++w) {
    const KTuple empty(g);
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(g.k, g.n);
    for (int q = 1; q <= g.k; ++q)
      for (int i = 0; i < g.n; ++i)
        r(q - 1, i) = marginal_gain(*f[static_cast<size_t>(w)], empty, q, i);
    rho0[static_cast<size_t>(w)] = std::move(r);
  }

  // Many (q, i) pairs repeat the same weight pattern within an iteration.
  std::map<std::vector<double>, double> cache;
  for (int q = 1; q <= g.k; ++q) {
    for (int i = 0; i < g.n; ++i) {
      Eigen::VectorXd weights(num_w);
      bool any = false;
      for (int w = 0; w < num_w; ++w) {
        const bool selected = s_hat[static_cast<size_t>(w)].slot(i) == q;
        const double a = selected ? rho0[static_cast<size_t>(w)](q - 1, i) *
                                        static_cast<double>(xi(w, i))
                                  : 0.0;
        weights[w] = a;
        any = any || a != 0.0;
      }
      if (!any) continue;
      std::vector<double> key(weights.data(), weights.data() + num_w);
      auto it = cache.find(key);
      if (it == cache.end())
        it = cache.emplace(std::move(key), drr_cut_coefficient(set, weights)).first;
      cut.coeff(q - 1, i) = it->second;
    }
  }
  return cut;
}

Cut cut_dra(const AttackVector& x_hat, const std::vector<KTuple>& s_hat, const AmbiguitySet& set,
            const Eigen::MatrixXi& xi, const std::vector<const FunctionOracle*>& f,
            PermutationMode mode) {
  check_scenario_inputs(s_hat, xi, f);
  const int num_w = static_cast<int>(f.size());
  Eigen::VectorXd values(num_w);
  for (int w = 0; w < num_w; ++w) values[w] = f[static_cast<size_t>(w)]->evaluate(s_hat[static_cast<size_t>(w)]);
  const SeparationResult sep = separate_max(values, set);
  Cut cut;
  cut.family = CutFamily::Dra;
  cut.generator = x_hat;
  cut.constant = sep.objective;
  cut.coeff = weighted_sequential(s_hat, sep.distribution, xi, f, mode);
  return cut;
}

bool check_tightness(const Cut& cut, const AttackVector& x_hat, double phi_at_x_hat, double tol) {
  return std::abs(cut_rhs(cut, x_hat) - phi_at_x_hat) <=
         tol * std::max(1.0, std::abs(phi_at_x_hat));
}

}  // namespace ksip
