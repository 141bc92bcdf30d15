#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "ksip/cuts.hpp"
#include "ksip/instances.hpp"
#include "ksip/master.hpp"

namespace ksip {

enum class Variant { Deterministic, RiskNeutral, Dra, Drr };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct SolveConfig {
  Variant variant = Variant::Drr;
  double gap_tol = 1e-6;
  bool relative_gap = false;
  int max_iterations = 100000;
  PermutationMode permutation = PermutationMode::GreedyGain;
  int threads = 1;
  long defender_node_limit = 10'000'000;
  long master_node_limit = 50'000'000;
};

struct IterationLog {
  AttackVector x_hat;
  double phi = 0.0;
  double theta_ub = 0.0;
  double theta_lb = 0.0;
  Eigen::VectorXd p_hat;  // extremal distribution where applicable
  CutFamily cut_family = CutFamily::Sequential;
};

struct SolveReport {
  Variant variant = Variant::Drr;
  double theta_ub = 0.0;
  double theta_lb = 0.0;
  AttackVector x_star;
  std::vector<IterationLog> iterations;
  std::vector<Cut> cuts;
  bool converged = false;
  double wall_seconds = 0.0;

  double gap() const { return theta_ub - theta_lb; }
};

/// Cutting-plane decomposition: alternates exact scenario defender
/// solves, distribution separation, cut generation, and the attacker
/// master problem until the bound gap closes. The returned upper bound
/// certifies x_star for the selected variant.
SolveReport solve(const Instance& instance, const SolveConfig& config);

/// Objective of the selected variant at a fixed attack (scenario solves
/// plus aggregation; no master loop).
double evaluate_phi(const Instance& instance, const AttackVector& x, Variant variant,
                    int threads = 1);

struct ValueMetrics {
  double vss = 0.0;  // Phi_N(x_DT) - Phi_N(x_RN)
  double vas = 0.0;  // Phi_A(x_DT) - Phi_A(x_RA)
  double vrs = 0.0;  // Phi_R(x_DT) - Phi_R(x_RR)
};

ValueMetrics compute_value_metrics(const Instance& instance, const AttackVector& x_dt,
                                   const AttackVector& x_rn, const AttackVector& x_ra,
                                   const AttackVector& x_rr, int threads = 1);

struct SweepRow {
  double epsilon = 0.0;
  double phi_dra = 0.0;
  double phi_rn = 0.0;
  double phi_drr = 0.0;
};

/// Solves DRA / risk-neutral / DRR for each ambiguity radius.
std::vector<SweepRow> epsilon_sweep(const Instance& instance, const std::vector<double>& radii,
                                    const SolveConfig& base_config = {});

std::string report_to_json(const SolveReport& report);

}  // namespace ksip
