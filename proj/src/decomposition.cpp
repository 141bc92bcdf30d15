#include "ksip/decomposition.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "ksip/defender.hpp"

namespace ksip {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::Deterministic: return "deterministic";
    case Variant::RiskNeutral: return "risk_neutral";
    case Variant::Dra: return "dra";
    case Variant::Drr: return "drr";
  }
  return "unknown";
}

Variant variant_from_name(const std::string& name) {
  if (name == "deterministic") return Variant::Deterministic;
  if (name == "risk_neutral") return Variant::RiskNeutral;
  if (name == "dra") return Variant::Dra;
  if (name == "drr") return Variant::Drr;
  throw std::invalid_argument("unknown variant '" + name + "'");
}

namespace {

struct ScenarioSolves {
  std::vector<KTuple> s_hat;
  Eigen::VectorXd values;
};

/// Deterministic solves treat every attack as successful and use the
/// first scenario's objective only.
bool deterministic(Variant v) { return v == Variant::Deterministic; }

ScenarioSolves solve_scenarios(const Instance& inst, const AttackVector& x, Variant variant,
                               const SolveConfig& config) {
  const GroundSet& g = inst.ground;
  const int num_w = deterministic(variant) ? 1 : inst.num_scenarios();
  ScenarioSolves out{std::vector<KTuple>(static_cast<size_t>(num_w), KTuple(g)),
                     Eigen::VectorXd(num_w)};
  for (int w = 0; w < num_w; ++w) inst.oracle(w);  // populate the cache before the workers race
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&]() {
    for (;;) {
      const int w = next.fetch_add(1);
      if (w >= num_w || failed.load()) return;
      DefenderProblem p;
      auto oracle = inst.oracle(w);
      p.oracle = oracle.get();
      p.budgets = inst.defender_budgets;
      p.blocked = BlockedMask::Constant(g.k, g.n, false);
      for (int q = 0; q < g.k; ++q)
        for (int i = 0; i < g.n; ++i)
          p.blocked(q, i) = x(q, i) == 1 && (deterministic(variant) || inst.xi(w, i) == 1);
      const DefenderSolution sol = solve_exact(p, config.defender_node_limit);
      if (sol.status != DefenderStatus::Optimal) {
        failed.store(true);
        return;
      }
      out.s_hat[static_cast<size_t>(w)] = sol.s;
      out.values[w] = sol.value;
    }
  };
  const int nthreads = std::max(1, std::min(config.threads, num_w));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failed.load())
    throw std::runtime_error("solve: defender subproblem hit its node guard without certifying");
  return out;
}

std::vector<const FunctionOracle*> oracle_ptrs(const Instance& inst, int num_w) {
  std::vector<const FunctionOracle*> out(static_cast<size_t>(num_w));
  for (int w = 0; w < num_w; ++w) out[static_cast<size_t>(w)] = inst.oracle(w).get();
  return out;
}

struct PhiResult {
  double phi = 0.0;
  Eigen::VectorXd p_hat;  // empty for deterministic
};

PhiResult aggregate_phi(const Instance& inst, Variant variant, const Eigen::VectorXd& values,
                        const AmbiguitySet* set) {
  PhiResult out;
  switch (variant) {
    case Variant::Deterministic:
      out.phi = values[0];
      break;
    case Variant::RiskNeutral:
      out.phi = inst.reference_p.dot(values);
      out.p_hat = inst.reference_p;
      break;
    case Variant::Drr: {
      const SeparationResult sep = separate_min(values, *set);
      out.phi = sep.objective;
      out.p_hat = sep.distribution;
      break;
    }
    case Variant::Dra: {
      const SeparationResult sep = separate_max(values, *set);
      out.phi = sep.objective;
      out.p_hat = sep.distribution;
      break;
    }
  }
  return out;
}

std::vector<int> encode_attack(const AttackVector& x) {
  return std::vector<int>(x.data(), x.data() + x.size());
}

}  // namespace

SolveReport solve(const Instance& inst, const SolveConfig& config) {
  inst.validate();
  const auto start = std::chrono::steady_clock::now();
  const GroundSet& g = inst.ground;
  const Variant variant = config.variant;
  const bool needs_set = variant == Variant::Dra || variant == Variant::Drr;
  AmbiguitySet set = inst.ambiguity();

  SolveReport report;
  report.variant = variant;
  report.x_star = AttackVector::Zero(g.k, g.n);

  AttackerPolytope polytope(g, inst.attacker_budgets);
  std::vector<Cut> pool;
  std::set<std::vector<int>> visited;

  AttackVector x_hat = AttackVector::Zero(g.k, g.n);
  double theta_ub = kInf;
  double theta_lb = -kInf;

  const int num_w = deterministic(variant) ? 1 : inst.num_scenarios();
  const auto oracles = oracle_ptrs(inst, num_w);
  const Eigen::MatrixXi xi_eff = deterministic(variant)
                                     ? Eigen::MatrixXi::Ones(1, g.n).eval()
                                     : inst.xi.topRows(num_w).eval();
  const Eigen::VectorXd p_det = Eigen::VectorXd::Ones(1);

  const bool trace = std::getenv("KSIP_TRACE") != nullptr;
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    const auto t0 = std::chrono::steady_clock::now();
    visited.insert(encode_attack(x_hat));
    const ScenarioSolves scen = solve_scenarios(inst, x_hat, variant, config);
    const auto t1 = std::chrono::steady_clock::now();
    const PhiResult phi = aggregate_phi(inst, variant, scen.values, needs_set ? &set : nullptr);

    if (phi.phi < theta_ub) {
      theta_ub = phi.phi;
      report.x_star = x_hat;
    }

    Cut cut;
    switch (variant) {
      case Variant::Deterministic:
        cut = cut_sequential(x_hat, scen.s_hat[0], *oracles[0], config.permutation);
        break;
      case Variant::RiskNeutral:
        cut = cut_risk_neutral(x_hat, scen.s_hat, inst.reference_p, xi_eff, oracles,
                               config.permutation);
        break;
      case Variant::Drr:
        cut = cut_drr(x_hat, scen.s_hat, set, xi_eff, oracles);
        break;
      case Variant::Dra:
        cut = cut_dra(x_hat, scen.s_hat, set, xi_eff, oracles, config.permutation);
        break;
    }
    pool.push_back(cut);
    const auto t2 = std::chrono::steady_clock::now();

    const MasterResult master = solve_master(pool, polytope, config.master_node_limit, &x_hat);
    if (trace) {
      const auto t3 = std::chrono::steady_clock::now();
      std::fprintf(stderr, "trace it=%d scen=%.3f cut=%.3f master=%.3f nodes=%ld\n", iter,
                   std::chrono::duration<double>(t1 - t0).count(),
                   std::chrono::duration<double>(t2 - t1).count(),
                   std::chrono::duration<double>(t3 - t2).count(), master.nodes);
    }
    if (master.status != MasterStatus::Optimal)
      throw std::runtime_error("solve: master problem did not certify optimality");
    theta_lb = master.eta;

    IterationLog log;
    log.x_hat = x_hat;
    log.phi = phi.phi;
    log.theta_ub = theta_ub;
    log.theta_lb = theta_lb;
    log.p_hat = phi.p_hat;
    log.cut_family = cut.family;
    report.iterations.push_back(std::move(log));

    const double gap = theta_ub - theta_lb;
    const double denom = config.relative_gap ? std::max(1.0, std::abs(theta_ub)) : 1.0;
    if (gap <= config.gap_tol * denom) {
      report.converged = true;
      break;
    }
    // A revisited master solution admits no separating cut: the incumbent
    // is optimal.
    if (visited.count(encode_attack(master.x))) {
      theta_lb = theta_ub;
      report.converged = true;
      IterationLog closing;
      closing.x_hat = master.x;
      closing.phi = theta_ub;
      closing.theta_ub = theta_ub;
      closing.theta_lb = theta_lb;
      report.iterations.push_back(std::move(closing));
      break;
    }
    x_hat = master.x;
  }

  report.theta_ub = theta_ub;
  report.theta_lb = theta_lb;
  report.cuts = std::move(pool);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!report.converged)
    throw std::runtime_error("solve: iteration guard exceeded before the gap closed");
  return report;
}

double evaluate_phi(const Instance& inst, const AttackVector& x, Variant variant, int threads) {
  SolveConfig config;
  config.threads = threads;
  const ScenarioSolves scen = solve_scenarios(inst, x, variant, config);
  const bool needs_set = variant == Variant::Dra || variant == Variant::Drr;
  AmbiguitySet set = inst.ambiguity();
  return aggregate_phi(inst, variant, scen.values, needs_set ? &set : nullptr).phi;
}

ValueMetrics compute_value_metrics(const Instance& inst, const AttackVector& x_dt,
                                   const AttackVector& x_rn, const AttackVector& x_ra,
                                   const AttackVector& x_rr, int threads) {
  ValueMetrics m;
  m.vss = evaluate_phi(inst, x_dt, Variant::RiskNeutral, threads) -
          evaluate_phi(inst, x_rn, Variant::RiskNeutral, threads);
  m.vas = evaluate_phi(inst, x_dt, Variant::Dra, threads) -
          evaluate_phi(inst, x_ra, Variant::Dra, threads);
  m.vrs = evaluate_phi(inst, x_dt, Variant::Drr, threads) -
          evaluate_phi(inst, x_rr, Variant::Drr, threads);
  return m;
}

std::vector<SweepRow> epsilon_sweep(const Instance& inst, const std::vector<double>& radii,
                                    const SolveConfig& base_config) {
  std::vector<SweepRow> rows;
  SolveConfig config = base_config;
  config.variant = Variant::RiskNeutral;
  const double phi_rn = solve(inst, config).theta_ub;
  for (double eps : radii) {
    if (eps < 0) throw std::invalid_argument("epsilon_sweep: radii must be nonnegative");
    Instance scaled = inst;
    scaled.ambiguity_epsilon = eps;
    SweepRow row;
    row.epsilon = eps;
    row.phi_rn = phi_rn;
    config.variant = Variant::Dra;
    row.phi_dra = solve(scaled, config).theta_ub;
    config.variant = Variant::Drr;
    row.phi_drr = solve(scaled, config).theta_ub;
    rows.push_back(row);
  }
  return rows;
}

namespace {

nlohmann::json attack_to_json(const AttackVector& x) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index q = 0; q < x.rows(); ++q) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index i = 0; i < x.cols(); ++i) row.push_back(x(q, i));
    rows.push_back(std::move(row));
  }
  return rows;
}

const char* family_name(CutFamily f) {
  switch (f) {
    case CutFamily::Basic: return "basic";
    case CutFamily::Sequential: return "sequential";
    case CutFamily::RiskNeutral: return "risk_neutral";
    case CutFamily::Drr: return "drr";
    case CutFamily::Dra: return "dra";
  }
  return "unknown";
}

}  // namespace

std::string report_to_json(const SolveReport& report) {
  nlohmann::json j;
  j["variant"] = variant_name(report.variant);
  j["theta_ub"] = report.theta_ub;
  j["theta_lb"] = report.theta_lb;
  j["converged"] = report.converged;
  j["iterations"] = report.iterations.size();
  j["wall_seconds"] = report.wall_seconds;
  j["x_star"] = attack_to_json(report.x_star);
  nlohmann::json iters = nlohmann::json::array();
  for (const IterationLog& it : report.iterations) {
    nlohmann::json e;
    e["x_hat"] = attack_to_json(it.x_hat);
    e["phi"] = it.phi;
    e["theta_ub"] = it.theta_ub;
    e["theta_lb"] = it.theta_lb;
    e["cut"] = family_name(it.cut_family);
    if (it.p_hat.size()) {
      nlohmann::json p = nlohmann::json::array();
      for (Eigen::Index w = 0; w < it.p_hat.size(); ++w) p.push_back(it.p_hat[w]);
      e["p_hat"] = std::move(p);
    }
    iters.push_back(std::move(e));
  }
  j["log"] = std::move(iters);
  nlohmann::json cuts = nlohmann::json::array();
  for (const Cut& c : report.cuts) {
    nlohmann::json e;
    e["family"] = family_name(c.family);
    e["constant"] = c.constant;
    e["generator"] = attack_to_json(c.generator);
    nlohmann::json coeff = nlohmann::json::array();
    for (Eigen::Index q = 0; q < c.coeff.rows(); ++q) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index i = 0; i < c.coeff.cols(); ++i) row.push_back(c.coeff(q, i));
      coeff.push_back(std::move(row));
    }
    e["coeff"] = std::move(coeff);
    cuts.push_back(std::move(e));
  }
  j["cuts"] = std::move(cuts);
  return j.dump(2);
}

}  // namespace ksip
