#include "ksip/lp.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace ksip {

namespace {

constexpr double kPivotTol = 1e-9;

struct Tableau {
  Eigen::MatrixXd t;        // m x (ncols + 1), last column is rhs
  Eigen::RowVectorXd obj;   // reduced cost row, last entry is -objective value
  std::vector<int> basis;   // basic variable per row

  int rows() const { return static_cast<int>(t.rows()); }
  int cols() const { return static_cast<int>(t.cols()) - 1; }

  void pivot(int r, int j) {
    t.row(r) /= t(r, j);
    for (int i = 0; i < rows(); ++i)
      if (i != r && std::abs(t(i, j)) > 0.0) t.row(i) -= t(i, j) * t.row(r);
    obj -= obj[j] * t.row(r);
    basis[r] = j;
  }
};

enum class IterResult { Optimal, Unbounded, IterationLimit };

// Bland's rule: entering = lowest eligible column, leaving = min ratio with
// lowest basic index on ties. Columns >= art_start are phase-1 artificials
// pinned at zero; if the entering column touches such a row the artificial
// leaves first, so it can never drift away from zero during phase 2.
IterResult iterate(Tableau& tab, const std::vector<bool>& allowed, const LpOptions& opts,
                   long& iters, int art_start, long iter_limit) {
  const int m = tab.rows();
  const int ncols = tab.cols();
  // Dantzig pricing by default; after a long degenerate streak switch to
  // Bland's rule (lowest eligible index) until a pivot makes real progress.
  int degen_streak = 0;
  const int bland_trigger = 100 + m;
  for (;;) {
    if (++iters > iter_limit) return IterResult::IterationLimit;
    const bool bland = degen_streak >= bland_trigger;
    int enter = -1;
    double best_rc = -opts.opt_tol;
    for (int j = 0; j < ncols; ++j) {
      if (!allowed[j]) continue;
      if (tab.obj[j] < best_rc) {
        enter = j;
        if (bland) break;
        best_rc = tab.obj[j];
      }
    }
    if (enter < 0) return IterResult::Optimal;
    int leave = -1;
    double step = 0.0;
    for (int r = 0; r < m; ++r)
      if (tab.basis[r] >= art_start && std::abs(tab.t(r, enter)) > 1e-9)
        if (leave < 0 || tab.basis[r] < tab.basis[leave]) leave = r;
    if (leave < 0) {
      double best_ratio = 0.0;
      for (int r = 0; r < m; ++r) {
        const double a = tab.t(r, enter);
        if (a <= kPivotTol) continue;
        const double ratio = tab.t(r, ncols) / a;
        if (leave < 0 || ratio < best_ratio - 1e-15 ||
            (std::abs(ratio - best_ratio) <= 1e-15 && tab.basis[r] < tab.basis[leave])) {
          leave = r;
          best_ratio = ratio;
        }
      }
      step = leave >= 0 ? best_ratio : 0.0;
    }
    if (leave < 0) return IterResult::Unbounded;
    tab.pivot(leave, enter);
    if (step > 1e-12)
      degen_streak = 0;
    else
      ++degen_streak;
  }
}

// Rebuild the tableau from the original standard-form data a0 = [A | b] for
// the current basis. Long elimination sequences accumulate rounding drift;
// this resets it to a single LU solve's worth of error. Returns false when
// the basis matrix is numerically singular (tableau left untouched).
bool refactorize(Tableau& tab, const Eigen::MatrixXd& a0, const Eigen::RowVectorXd& cost_full) {
  const int m = tab.rows();
  Eigen::MatrixXd basis_mat(m, m);
  for (int r = 0; r < m; ++r) basis_mat.col(r) = a0.col(tab.basis[static_cast<size_t>(r)]);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(basis_mat);
  if (!lu.isInvertible()) return false;
  tab.t = lu.solve(a0);
  Eigen::VectorXd cb(m);
  for (int r = 0; r < m; ++r) cb[r] = cost_full[tab.basis[static_cast<size_t>(r)]];
  const Eigen::VectorXd y = basis_mat.transpose().fullPivLu().solve(cb);
  tab.obj = cost_full - y.transpose() * a0;
  return true;
}

// One simplex phase with chunked refactorization: iterate, refresh the
// tableau, and stop only when the refreshed reduced costs confirm optimality.
IterResult run_phase(Tableau& tab, const Eigen::MatrixXd& a0,
                     const Eigen::RowVectorXd& cost_full, const std::vector<bool>& allowed,
                     const LpOptions& opts, long& iters, int art_start) {
  constexpr long kChunk = 500;
  constexpr int kMaxRounds = 200;
  tab.obj = cost_full;
  for (int r = 0; r < tab.rows(); ++r) {
    const double cb = tab.obj[tab.basis[static_cast<size_t>(r)]];
    if (cb != 0.0) tab.obj -= cb * tab.t.row(r);
  }
  long pivots_since_refactor = 0;
  for (int round = 0; round < kMaxRounds; ++round) {
    const long chunk_end = std::min(opts.max_iterations, iters + kChunk);
    const long before = iters;
    const IterResult res = iterate(tab, allowed, opts, iters, art_start, chunk_end);
    pivots_since_refactor += iters - before;
    if (res == IterResult::Unbounded) return res;
    if (res == IterResult::IterationLimit && iters >= opts.max_iterations) return res;
    if (res == IterResult::Optimal && pivots_since_refactor == 0) return res;
    pivots_since_refactor = 0;
    if (!refactorize(tab, a0, cost_full)) {
      if (std::getenv("KSIP_LP_DEBUG"))
        std::fprintf(stderr, "lp debug: singular refactorization round=%d iters=%ld\n", round,
                     iters);
      return IterResult::IterationLimit;
    }
    if (res == IterResult::Optimal) {
      bool clean = true;
      double worst = 0.0;
      int worst_j = -1;
      for (int j = 0; j < tab.cols(); ++j)
        if (allowed[static_cast<size_t>(j)] && tab.obj[j] < worst) {
          worst = tab.obj[j];
          worst_j = j;
        }
      clean = worst >= -opts.opt_tol;
      if (clean) return IterResult::Optimal;
      if (std::getenv("KSIP_LP_DEBUG"))
        std::fprintf(stderr, "lp debug: round=%d iters=%ld worst_rc=%g at j=%d\n", round, iters,
                     worst, worst_j);
    }
  }
  return IterResult::IterationLimit;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opts) {
  const int ns = lp.num_vars();
  const int morig = lp.num_rows();
  if (lp.a.rows() != morig || lp.a.cols() != ns ||
      static_cast<int>(lp.row_sense.size()) != morig)
    throw std::invalid_argument("solve_lp: inconsistent dimensions");
  if (!lp.c.allFinite() || !lp.a.allFinite() || !lp.b.allFinite())
    throw std::invalid_argument("solve_lp: non-finite problem data");

  Eigen::VectorXd lower = lp.lower.size() ? lp.lower : Eigen::VectorXd::Zero(ns);
  Eigen::VectorXd upper = lp.upper.size() ? lp.upper : Eigen::VectorXd::Constant(ns, kInf);
  if (lower.size() != ns || upper.size() != ns)
    throw std::invalid_argument("solve_lp: bound vector size mismatch");

  const bool maximize = lp.sense == ObjSense::Max;
  Eigen::VectorXd c = maximize ? Eigen::VectorXd(-lp.c) : lp.c;

  // Shift finite lower bounds, split free variables, turn finite upper
  // bounds into extra <= rows. Internal variables z >= 0.
  struct VarMap {
    int pos;         // column of the positive part
    int neg = -1;    // column of the negative part (free variables)
    double shift = 0.0;
  };
  std::vector<VarMap> vmap(ns);
  int nz = 0;
  for (int j = 0; j < ns; ++j) {
    vmap[j].pos = nz++;
    if (std::isinf(lower[j])) {
      vmap[j].neg = nz++;
    } else {
      vmap[j].shift = lower[j];
    }
  }
  std::vector<int> upper_rows;
  for (int j = 0; j < ns; ++j)
    if (std::isfinite(upper[j])) upper_rows.push_back(j);

  const int m = morig + static_cast<int>(upper_rows.size());
  Eigen::MatrixXd az = Eigen::MatrixXd::Zero(m, nz);
  Eigen::VectorXd bz(m);
  Eigen::VectorXd cz = Eigen::VectorXd::Zero(nz);
  std::vector<RowSense> sense(static_cast<size_t>(m));
  double obj_shift = 0.0;

  for (int j = 0; j < ns; ++j) {
    cz[vmap[j].pos] = c[j];
    if (vmap[j].neg >= 0) cz[vmap[j].neg] = -c[j];
    obj_shift += c[j] * vmap[j].shift;
  }
  for (int r = 0; r < morig; ++r) {
    double rhs = lp.b[r];
    for (int j = 0; j < ns; ++j) {
      az(r, vmap[j].pos) = lp.a(r, j);
      if (vmap[j].neg >= 0) az(r, vmap[j].neg) = -lp.a(r, j);
      rhs -= lp.a(r, j) * vmap[j].shift;
    }
    bz[r] = rhs;
    sense[static_cast<size_t>(r)] = lp.row_sense[static_cast<size_t>(r)];
  }
  for (size_t u = 0; u < upper_rows.size(); ++u) {
    const int r = morig + static_cast<int>(u);
    const int j = upper_rows[u];
    az(r, vmap[j].pos) = 1.0;
    if (vmap[j].neg >= 0) az(r, vmap[j].neg) = -1.0;
    bz[r] = upper[j] - vmap[j].shift;
    sense[static_cast<size_t>(r)] = RowSense::Le;
  }

  // Normalize to b >= 0, remembering flips for dual recovery.
  std::vector<double> row_flip(static_cast<size_t>(m), 1.0);
  for (int r = 0; r < m; ++r) {
    if (bz[r] < 0.0) {
      az.row(r) = -az.row(r);
      bz[r] = -bz[r];
      row_flip[static_cast<size_t>(r)] = -1.0;
      if (sense[static_cast<size_t>(r)] == RowSense::Le)
        sense[static_cast<size_t>(r)] = RowSense::Ge;
      else if (sense[static_cast<size_t>(r)] == RowSense::Ge)
        sense[static_cast<size_t>(r)] = RowSense::Le;
    }
  }

  // Columns: structural | slack/surplus | artificial.
  std::vector<int> slack_col(static_cast<size_t>(m), -1), art_col(static_cast<size_t>(m), -1);
  int ncols = nz;
  for (int r = 0; r < m; ++r)
    if (sense[static_cast<size_t>(r)] != RowSense::Eq) slack_col[static_cast<size_t>(r)] = ncols++;
  const int first_art = ncols;
  for (int r = 0; r < m; ++r)
    if (sense[static_cast<size_t>(r)] != RowSense::Le) art_col[static_cast<size_t>(r)] = ncols++;

  Tableau tab;
  tab.t = Eigen::MatrixXd::Zero(m, ncols + 1);
  tab.t.block(0, 0, m, nz) = az;
  tab.t.col(ncols) = bz;
  tab.basis.assign(static_cast<size_t>(m), -1);
  for (int r = 0; r < m; ++r) {
    const RowSense rs = sense[static_cast<size_t>(r)];
    if (rs != RowSense::Eq)
      tab.t(r, slack_col[static_cast<size_t>(r)]) = rs == RowSense::Le ? 1.0 : -1.0;
    if (rs == RowSense::Le) {
      tab.basis[static_cast<size_t>(r)] = slack_col[static_cast<size_t>(r)];
    } else {
      tab.t(r, art_col[static_cast<size_t>(r)]) = 1.0;
      tab.basis[static_cast<size_t>(r)] = art_col[static_cast<size_t>(r)];
    }
  }

  LpSolution sol;
  long iters = 0;
  const Eigen::MatrixXd a0 = tab.t;  // pristine [A | b] for refactorization

  // Phase 1: minimize the sum of artificials.
  if (first_art < ncols) {
    Eigen::RowVectorXd cost1 = Eigen::RowVectorXd::Zero(ncols + 1);
    for (int j = first_art; j < ncols; ++j) cost1[j] = 1.0;
    std::vector<bool> allowed(static_cast<size_t>(ncols), true);
    const IterResult res = run_phase(tab, a0, cost1, allowed, opts, iters, ncols);
    if (res != IterResult::Optimal) {
      if (std::getenv("KSIP_LP_DEBUG")) std::fprintf(stderr, "lp debug: phase1 %d iters=%ld\n", (int)res, iters);
      sol.status = LpStatus::NumericalFailure;
      return sol;
    }
    const double infeas = -tab.obj[ncols];
    if (infeas > opts.feas_tol) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    // Drive remaining artificials out of the basis where possible.
    for (int r = 0; r < m; ++r) {
      if (tab.basis[static_cast<size_t>(r)] < first_art) continue;
      int piv = -1;
      double best = kPivotTol;
      for (int j = 0; j < first_art; ++j)
        if (std::abs(tab.t(r, j)) > best) {
          piv = j;
          best = std::abs(tab.t(r, j));
        }
      if (piv >= 0) tab.pivot(r, piv);
      // else: redundant row; the artificial stays basic at value zero
    }
  }

  // Phase 2.
  Eigen::RowVectorXd cost2 = Eigen::RowVectorXd::Zero(ncols + 1);
  cost2.head(nz) = cz.transpose();
  std::vector<bool> allowed(static_cast<size_t>(ncols), true);
  for (int j = first_art; j < ncols; ++j) allowed[static_cast<size_t>(j)] = false;
  const IterResult res = run_phase(tab, a0, cost2, allowed, opts, iters, first_art);
  if (res == IterResult::IterationLimit) {
    if (std::getenv("KSIP_LP_DEBUG")) std::fprintf(stderr, "lp debug: phase2 iteration limit iters=%ld\n", iters);
    sol.status = LpStatus::NumericalFailure;
    return sol;
  }
  if (res == IterResult::Unbounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  // Recover primal values.
  Eigen::VectorXd z = Eigen::VectorXd::Zero(ncols);
  for (int r = 0; r < m; ++r) z[tab.basis[static_cast<size_t>(r)]] = tab.t(r, ncols);
  sol.x.resize(ns);
  for (int j = 0; j < ns; ++j) {
    double v = z[vmap[j].pos] + vmap[j].shift;
    if (vmap[j].neg >= 0) v -= z[vmap[j].neg];
    sol.x[j] = v;
  }
  const double internal_obj = cz.dot(z.head(nz)) + obj_shift;
  sol.objective = maximize ? -internal_obj : internal_obj;

  // Duals from the final basis: solve B'y = c_B against the standard-form
  // columns, then undo row flips and the max-sense negation.
  Eigen::MatrixXd basis_mat(m, m);
  Eigen::VectorXd cb(m);
  for (int r = 0; r < m; ++r) {
    const int bj = tab.basis[static_cast<size_t>(r)];
    Eigen::VectorXd col = Eigen::VectorXd::Zero(m);
    if (bj < nz) {
      col = az.col(bj);
      cb[r] = cz[bj];
    } else if (bj < first_art) {
      int row = -1;
      for (int rr = 0; rr < m; ++rr)
        if (slack_col[static_cast<size_t>(rr)] == bj) row = rr;
      col[row] = sense[static_cast<size_t>(row)] == RowSense::Le ? 1.0 : -1.0;
      cb[r] = 0.0;
    } else {
      int row = -1;
      for (int rr = 0; rr < m; ++rr)
        if (art_col[static_cast<size_t>(rr)] == bj) row = rr;
      col[row] = 1.0;
      cb[r] = 0.0;
    }
    basis_mat.col(r) = col;
  }
  Eigen::VectorXd y = basis_mat.transpose().fullPivLu().solve(cb);
  sol.dual.resize(morig);
  for (int r = 0; r < morig; ++r)
    sol.dual[r] = (maximize ? -1.0 : 1.0) * row_flip[static_cast<size_t>(r)] * y[r];

  // Certify feasibility of the reported point before claiming optimality.
  for (int r = 0; r < morig; ++r) {
    const double act = lp.a.row(r).dot(sol.x);
    const double resid = act - lp.b[r];
    const double scale = std::max(1.0, std::abs(lp.b[r]));
    const RowSense rs = lp.row_sense[static_cast<size_t>(r)];
    const bool ok = (rs == RowSense::Eq && std::abs(resid) <= opts.feas_tol * scale * 10) ||
                    (rs == RowSense::Le && resid <= opts.feas_tol * scale * 10) ||
                    (rs == RowSense::Ge && resid >= -opts.feas_tol * scale * 10);
    if (!ok) {
      if (std::getenv("KSIP_LP_DEBUG"))
        std::fprintf(stderr, "lp debug: certification row %d resid=%g sense=%d\n", r, resid,
                     (int)rs);
      sol.status = LpStatus::NumericalFailure;
      return sol;
    }
  }
  sol.status = LpStatus::Optimal;
  return sol;
}

}  // namespace ksip
