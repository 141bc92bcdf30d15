// Command-line front end: instance generation, variant solves, metric
// comparison, and ambiguity-radius sweeps. Output is machine-first
// (JSON / CSV); the one-line solve summary is plain text.
#include <CLI11.hpp>

#include <Eigen/Dense>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ksip/decomposition.hpp"
#include "ksip/instances.hpp"

using namespace ksip;

namespace {

int run_generate_coverage(int n, int k, const std::vector<double>& radius, int scenarios,
                          std::uint64_t seed, double success_prob, const std::string& ambiguity,
                          double epsilon, const std::string& out) {
  if (static_cast<int>(radius.size()) != k) {
    std::cerr << "generate coverage: need exactly k radius values\n";
    return 1;
  }
  Eigen::VectorXd radii(k);
  for (int q = 0; q < k; ++q) radii[q] = radius[static_cast<size_t>(q)];
  Instance inst = gen_coverage(n, k, radii, scenarios, seed, success_prob);
  inst.ambiguity_kind = ambiguity == "moment" ? AmbiguityKind::Moment : AmbiguityKind::Wasserstein;
  inst.ambiguity_epsilon = epsilon;
  inst.validate();
  save_instance(inst, out);
  std::cout << "wrote " << out << " (n=" << n << ", k=" << k << ", scenarios=" << scenarios
            << ")\n";
  return 0;
}

int run_generate_feature(const std::string& data_path, double delta, int scenarios,
                         std::uint64_t seed, double success_prob, const std::string& ambiguity,
                         double epsilon, const std::string& out) {
  const Eigen::MatrixXd data = load_csv_matrix(data_path);
  Instance inst = gen_feature_scenarios(data, delta, scenarios, seed, success_prob);
  inst.ambiguity_kind = ambiguity == "moment" ? AmbiguityKind::Moment : AmbiguityKind::Wasserstein;
  inst.ambiguity_epsilon = epsilon;
  inst.validate();
  save_instance(inst, out);
  std::cout << "wrote " << out << " (n=" << inst.ground.n << ", scenarios=" << scenarios << ")\n";
  return 0;
}

int run_solve(const std::string& instance_path, const std::string& variant,
              const std::string& ambiguity, double epsilon, double gap_tol, int threads,
              const std::string& permutation, const std::string& report_path) {
  Instance inst = load_instance(instance_path);
  if (!ambiguity.empty())
    inst.ambiguity_kind =
        ambiguity == "moment" ? AmbiguityKind::Moment : AmbiguityKind::Wasserstein;
  if (epsilon >= 0.0) inst.ambiguity_epsilon = epsilon;
  inst.validate();
  SolveConfig cfg;
  cfg.variant = variant_from_name(variant);
  cfg.gap_tol = gap_tol;
  cfg.threads = threads;
  cfg.permutation =
      permutation == "index" ? PermutationMode::IndexOrder : PermutationMode::GreedyGain;
  if (cfg.variant == Variant::Deterministic && inst.num_scenarios() > 1)
    std::cerr << "warning: deterministic variant on a multi-scenario instance uses the first "
                 "scenario's objective with every attack succeeding\n";
  const SolveReport rep = solve(inst, cfg);
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    out << report_to_json(rep) << '\n';
  }
  std::cout << variant_name(rep.variant) << " objective=" << rep.theta_ub
            << " gap=" << rep.gap() << " iterations=" << rep.iterations.size()
            << " cuts=" << rep.cuts.size() << " time_s=" << rep.wall_seconds << '\n';
  return rep.converged ? 0 : 2;
}

int run_compare(const std::string& instance_path, double gap_tol, int threads) {
  const Instance inst = load_instance(instance_path);
  AttackVector x[4];
  double obj[4];
  const Variant variants[4] = {Variant::Deterministic, Variant::RiskNeutral, Variant::Dra,
                               Variant::Drr};
  bool all_converged = true;
  for (int v = 0; v < 4; ++v) {
    SolveConfig cfg;
    cfg.variant = variants[v];
    cfg.gap_tol = gap_tol;
    cfg.threads = threads;
    const SolveReport rep = solve(inst, cfg);
    all_converged = all_converged && rep.converged;
    x[v] = rep.x_star;
    obj[v] = rep.theta_ub;
  }
  const ValueMetrics m = compute_value_metrics(inst, x[0], x[1], x[2], x[3], threads);
  std::cout << "phi_dt=" << obj[0] << " phi_rn=" << obj[1] << " phi_dra=" << obj[2]
            << " phi_drr=" << obj[3] << '\n';
  std::cout << "vss=" << m.vss << " vas=" << m.vas << " vrs=" << m.vrs << '\n';
  return all_converged ? 0 : 2;
}

int run_sweep(const std::string& instance_path, const std::vector<double>& radii, double gap_tol,
              int threads, const std::string& out_path) {
  const Instance inst = load_instance(instance_path);
  SolveConfig cfg;
  cfg.gap_tol = gap_tol;
  cfg.threads = threads;
  const auto rows = epsilon_sweep(inst, radii, cfg);
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    out = &file;
  }
  *out << "epsilon,phi_dra,phi_rn,phi_drr\n";
  for (const SweepRow& r : rows)
    *out << r.epsilon << ',' << r.phi_dra << ',' << r.phi_rn << ',' << r.phi_drr << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact solver for k-submodular interdiction games"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "Generate an instance file");
  generate->require_subcommand(1);
  int n = 10, k = 1, scenarios = 1;
  std::uint64_t seed = 0;
  double success_prob = 0.75, epsilon = 1.0, delta = 0.1;
  std::string ambiguity = "wasserstein", gen_out = "instance.json", sweep_out, data_path;
  std::vector<double> radius;

  auto* gcov = generate->add_subcommand("coverage", "Weighted-coverage instance");
  gcov->add_option("--n", n, "Number of sites")->required();
  gcov->add_option("--k", k, "Number of sensor types (1 or 2)");
  gcov->add_option("--radius", radius, "Coverage radius per type")->required();
  gcov->add_option("--scenarios", scenarios, "Number of scenarios");
  gcov->add_option("--seed", seed, "Generator seed")->required();
  gcov->add_option("--success-prob", success_prob, "Attack success probability");
  gcov->add_option("--ambiguity", ambiguity, "moment or wasserstein")
      ->check(CLI::IsMember({"moment", "wasserstein"}));
  gcov->add_option("--epsilon", epsilon, "Ambiguity radius");
  gcov->add_option("-o,--output", gen_out, "Output path");

  auto* gfeat = generate->add_subcommand("feature", "Feature-selection instance from CSV data");
  gfeat->add_option("--data", data_path, "Headered numeric CSV")->required();
  gfeat->add_option("--delta", delta, "Per-entry perturbation half-width");
  gfeat->add_option("--scenarios", scenarios, "Number of scenarios");
  gfeat->add_option("--seed", seed, "Generator seed")->required();
  gfeat->add_option("--success-prob", success_prob, "Attack success probability");
  gfeat->add_option("--ambiguity", ambiguity, "moment or wasserstein")
      ->check(CLI::IsMember({"moment", "wasserstein"}));
  gfeat->add_option("--epsilon", epsilon, "Ambiguity radius");
  gfeat->add_option("-o,--output", gen_out, "Output path");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Solve one variant to optimality");
  std::string instance_path, variant = "drr", report_path, solve_ambiguity,
              permutation = "greedy";
  double gap_tol = 1e-6, solve_eps = -1.0;
  int threads = 1;
  solve_cmd->add_option("instance", instance_path, "Instance JSON")->required();
  solve_cmd->add_option("--variant", variant, "deterministic, risk_neutral, dra, or drr")
      ->check(CLI::IsMember({"deterministic", "risk_neutral", "dra", "drr"}));
  solve_cmd->add_option("--ambiguity", solve_ambiguity, "Override the instance ambiguity family")
      ->check(CLI::IsMember({"moment", "wasserstein"}));
  solve_cmd->add_option("--eps", solve_eps, "Override the ambiguity radius");
  solve_cmd->add_option("--gap-tol", gap_tol, "Termination gap");
  solve_cmd->add_option("--threads", threads, "Concurrent scenario solves")
      ->envname("KSIP_THREADS");
  solve_cmd->add_option("--permutation", permutation, "Sequential-cut order: greedy or index")
      ->check(CLI::IsMember({"greedy", "index"}));
  solve_cmd->add_option("-o,--report", report_path, "Write the full JSON report here");

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "Solve all variants and report VSS/VAS/VRS");
  compare_cmd->add_option("instance", instance_path, "Instance JSON")->required();
  compare_cmd->add_option("--gap-tol", gap_tol, "Termination gap");
  compare_cmd->add_option("--threads", threads, "Concurrent scenario solves")
      ->envname("KSIP_THREADS");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Solve dra/rn/drr across ambiguity radii");
  std::vector<double> radii;
  sweep_cmd->add_option("instance", instance_path, "Instance JSON")->required();
  sweep_cmd->add_option("--radii", radii, "Ambiguity radii")->required();
  sweep_cmd->add_option("--gap-tol", gap_tol, "Termination gap");
  sweep_cmd->add_option("--threads", threads, "Concurrent scenario solves")
      ->envname("KSIP_THREADS");
  sweep_cmd->add_option("-o,--output", sweep_out, "CSV output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gcov->parsed())
      return run_generate_coverage(n, k, radius, scenarios, seed, success_prob, ambiguity,
                                   epsilon, gen_out);
    if (gfeat->parsed())
      return run_generate_feature(data_path, delta, scenarios, seed, success_prob, ambiguity,
                                  epsilon, gen_out);
    if (solve_cmd->parsed())
      return run_solve(instance_path, variant, solve_ambiguity, solve_eps, gap_tol, threads,
                       permutation, report_path);
    if (compare_cmd->parsed()) return run_compare(instance_path, gap_tol, threads);
    if (sweep_cmd->parsed()) return run_sweep(instance_path, radii, gap_tol, threads, sweep_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
