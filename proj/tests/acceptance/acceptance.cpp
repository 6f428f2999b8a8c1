// Acceptance suite: one PASS/FAIL line per criterion, with the measured
// quantities behind the verdict. Exit status 1 when any criterion fails.

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "accurt/arnoldi.hpp"
#include "accurt/dense.hpp"
#include "accurt/factorization.hpp"
#include "accurt/iterative.hpp"
#include "accurt/oracle.hpp"
#include "accurt/problems.hpp"
#include "accurt/restart.hpp"
#include "instances.hpp"

using namespace accurt;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool report(int id, const std::function<void(Verdict&)>& body, double limit_s) {
  Verdict v;
  const auto start = Clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.require(false, std::string("exception: ") + e.what());
  }
  const double elapsed = seconds_since(start);
  if (limit_s > 0) {
    std::ostringstream what;
    what << "runtime " << elapsed << " s > " << limit_s << " s";
    v.require(elapsed <= limit_s, what.str());
  }
  std::printf("criterion %d: %s (%.1f s)%s\n", id, v.pass ? "PASS" : "FAIL", elapsed,
              v.detail.str().c_str());
  std::fflush(stdout);
  return v.pass;
}

constexpr double kT = 1.0;

double dense_spectral_radius(const Matrix& m) {
  return Eigen::EigenSolver<Matrix>(m, false).eigenvalues().cwiseAbs().maxCoeff();
}

ShiftedSolver lu_solver(const Factorization& lu) {
  return [&lu](const Vector& b) {
    SolveResult r;
    r.x = lu.solve(b);
    r.stats.converged = true;
    return r;
  };
}

struct Instance {
  std::string name;
  SparseMatrix a;
  Vector v;
};

// ---- 1 ---------------------------------------------------------------------

void residual_identity(Verdict& v) {
  const std::vector<Instance> instances = {
      {"conv-diff 12", convection_diffusion_matrix(12, 200.0), conv_diff_initial(12)},
      {"maxwell 8", maxwell_yee_matrix(8).a, maxwell_initial(8)},
  };
  double worst = 0.0;
  std::string worst_where;
  Index compared = 0;
  // Diagnostic only: |formula - explicit| in units of the round-off level
  // eps (||A||_1 + 1/gamma) ||u(s)|| of the explicit assembly.
  double worst_units = 0.0;
  for (const auto& inst : instances) {
    const Factorization lu = lu_factorize_shifted(inst.a, kT / 20.0);
    const ShiftedSolver solve = lu_solver(lu);
    for (KrylovMode mode : {KrylovMode::shift_invert, KrylovMode::polynomial}) {
      ArnoldiState st = mode == KrylovMode::polynomial
                            ? ArnoldiState::polynomial(inst.v, 10)
                            : ArnoldiState::shift_invert(inst.v, kT / 20.0, 10);
      for (Index k = 1; k <= 10 && !st.exact(); ++k) {
        if (mode == KrylovMode::polynomial)
          arnoldi_step_polynomial(st, inst.a);
        else
          arnoldi_step_sai(st, inst.a, solve);
        const Matrix h = projected_matrix(st);
        for (int j = 1; j <= 20; ++j) {
          const double s = kT * j / 20.0;
          const double formula = residual_norm(st, h, s);
          const double direct = testing::explicit_residual(inst.a, st, h, s);
          const double rel = std::abs(formula - direct) / direct;
          ++compared;
          const double scale =
              inst.a.norm1() + (mode == KrylovMode::shift_invert ? 20.0 / kT : 0.0);
          worst_units = std::max(worst_units, std::abs(formula - direct) /
                                                  (std::numeric_limits<double>::epsilon() * scale *
                                                   projected_solution(h, st.beta(), s).norm()));
          if (!(rel <= worst)) {
            worst = rel;
            std::ostringstream where;
            where << inst.name << (mode == KrylovMode::polynomial ? " poly" : " sai") << " k=" << k
                  << " s=" << s << " formula=" << formula << " explicit=" << direct;
            worst_where = where.str();
          }
        }
      }
    }
  }
  v.detail << " " << compared << " comparisons, worst relative difference " << worst << " at "
           << worst_where << "; largest absolute difference " << worst_units
           << " x round-off level";
  v.require(worst <= 1e-8, "relative difference above 1e-8");
}

// ---- 2, 3 -------------------------------------------------------------------

/// Desk matrices whose symmetric part is verified positive semidefinite.
std::vector<Instance> accretive_desk_instances(std::ostringstream& log) {
  std::vector<Instance> candidates = {
      {"conv-diff 12 Pe200", convection_diffusion_matrix(12, 200.0), conv_diff_initial(12)},
      {"conv-diff 14 Pe1000", convection_diffusion_matrix(14, 1000.0), conv_diff_initial(14)},
      {"conv-diff 22 Pe200", convection_diffusion_matrix(22, 200.0), conv_diff_initial(22)},
  };
  for (std::uint64_t seed = 1; seed <= 4; ++seed)
    candidates.push_back({"random " + std::to_string(seed),
                          testing::random_accretive(40, seed, 1.0, 2.0 * seed),
                          testing::random_unit_vector(40, seed)});
  std::vector<Instance> out;
  for (auto& c : candidates) {
    const Matrix d = c.a.to_dense();
    if (testing::min_symmetric_eigenvalue(d) >= -1e-12 * spectral_norm(d))
      out.push_back(std::move(c));
  }
  log << " " << out.size() << "/" << candidates.size() << " instances verified accretive;";
  return out;
}

void lemma_one(Verdict& v) {
  const auto instances = accretive_desk_instances(v.detail);
  double min_omega = std::numeric_limits<double>::infinity();
  double worst_ratio = 0.0;
  std::string worst_where;
  Index checked = 0;
  for (const auto& inst : instances) {
    for (double gamma : {kT / 20.0, kT / 40.0, kT / 80.0}) {
      const Factorization lu = lu_factorize_shifted(inst.a, gamma);
      const ShiftedSolver solve = lu_solver(lu);
      ArnoldiState st = ArnoldiState::shift_invert(inst.v, gamma, 10);
      for (Index k = 1; k <= 10 && !st.exact(); ++k) {
        arnoldi_step_sai(st, inst.a, solve);
        const Matrix h = projected_matrix(st);
        const double wk = omega_k(st.square_hessenberg(), gamma);
        min_omega = std::min(min_omega, wk);
        for (double s : {0.1, 1.0, 10.0}) {
          const double ratio = spectral_norm(expm(Matrix(-s * h))) / std::exp(-s * wk);
          ++checked;
          if (ratio > worst_ratio) {
            worst_ratio = ratio;
            std::ostringstream where;
            where << inst.name << " gamma=" << gamma << " k=" << k << " s=" << s;
            worst_where = where.str();
          }
        }
      }
    }
  }
  v.detail << " " << checked << " checks, min omega_k " << min_omega
           << ", worst ||exp(-sH_k)|| / e^{-s omega_k} = " << worst_ratio << " at " << worst_where;
  v.require(min_omega >= -1e-12, "omega_k below -1e-12");
  v.require(worst_ratio <= 1.0 + 1e-10, "semigroup norm exceeds e^{-s omega_k}");
}

void proposition_one(Verdict& v) {
  const auto instances = accretive_desk_instances(v.detail);
  double worst = std::numeric_limits<double>::infinity();
  std::string worst_where;
  Index checked = 0, violations = 0;
  for (const auto& inst : instances) {
    for (double gamma : {kT / 20.0, kT / 40.0, kT / 80.0}) {
      const Factorization lu = lu_factorize_shifted(inst.a, gamma);
      const ShiftedSolver solve = lu_solver(lu);
      ArnoldiState st = ArnoldiState::shift_invert(inst.v, gamma, 10);
      for (Index k = 1; k <= 10 && !st.exact(); ++k) {
        arnoldi_step_sai(st, inst.a, solve);
        const Matrix h = projected_matrix(st);
        for (int j = 1; j <= 50; ++j) {
          const double s = kT * j / 50.0;
          const double norm = residual_norm(st, h, s);
          const double bound = residual_bound(st, h, s);
          ++checked;
          const double margin = norm > 0 ? bound / norm : std::numeric_limits<double>::infinity();
          if (margin < worst) {
            worst = margin;
            std::ostringstream where;
            where << inst.name << " gamma=" << gamma << " k=" << k << " s=" << s
                  << " bound=" << bound << " residual=" << norm;
            worst_where = where.str();
          }
          if (!(bound >= norm)) ++violations;
        }
      }
    }
  }
  v.detail << " " << checked << " checks, " << violations
           << " with bound < residual, smallest bound/residual " << worst << " at " << worst_where;
  v.require(violations == 0, "bound below residual");
}

// ---- 4 ---------------------------------------------------------------------

void proposition_two(Verdict& v) {
  double max_rho = 0.0;
  Index pairs = 0, compared = 0, violations = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Index n = 10 + static_cast<Index>(seed);
    const Matrix d =
        testing::random_accretive(n, seed, 1.0, 0.25 * static_cast<double>(seed)).to_dense();
    if (testing::min_symmetric_eigenvalue(d) < -1e-12) {
      v.require(false, "random instance not accretive");
      continue;
    }
    const Matrix id = Matrix::Identity(n, n);
    const double rho_a = dense_spectral_radius(d);
    for (double gamma : {0.05, 0.2, 1.0, 5.0}) {
      for (double ratio : {1.0, 0.8, 0.5, 0.25, 0.1, 0.01}) {
        const double gt = ratio * gamma;
        const Matrix g = id - (id + gamma * d).partialPivLu().solve(id + gt * d);
        const double rho_g = dense_spectral_radius(g);
        ++pairs;
        max_rho = std::max(max_rho, rho_g);
        const double plain = dense_spectral_radius(-gt * d);
        if (prefer_preconditioner(gt, gamma, rho_a) && plain < 1.0) {
          ++compared;
          if (!(rho_g < plain)) ++violations;
        }
      }
    }
  }
  v.detail << " " << pairs << " shift pairs, max rho(G) " << max_rho << "; " << compared
           << " pairs meet the criterion, " << violations << " not faster";
  v.require(max_rho < 1.0, "rho(G) >= 1");
  v.require(violations == 0, "preconditioned iteration not faster");
  v.require(compared > 0, "criterion never met");
}

// ---- 5, 6, 9 ---------------------------------------------------------------

struct RunOutcome {
  std::optional<RunReport> report;
  std::string failure;
  double seconds = 0.0;
  /// Largest ||next_start - V_k exp(-delta H_k) beta e_1|| over the restarts.
  double restart_mismatch = 0.0;
  Index restart_events = 0;
};

/// Independent recomputation of the restart vector: H_k from H~_k by a dense
/// inverse and the exponential from Eigen's MatrixFunctions module.
double restart_vector_mismatch(const RestartEvent& e) {
  const ArnoldiState& st = e.state;
  const Index k = st.steps();
  Matrix h;
  if (st.mode() == KrylovMode::shift_invert) {
    const Matrix ht = st.square_hessenberg();
    h = (ht.inverse() - Matrix::Identity(k, k)) / st.gamma();
  } else {
    h = st.square_hessenberg();
  }
  Vector e1 = Vector::Zero(k);
  e1(0) = st.beta();
  const Matrix ex = (-e.delta * h).exp();
  const Vector y = st.basis_matrix(k) * (ex * e1);
  return (y - e.next_start).norm() / std::max(1.0, y.norm());
}

RunOutcome observed_run(const SparseMatrix& a, const Vector& v, const AccuRTConfig& cfg) {
  RunOutcome out;
  const auto start = Clock::now();
  const RunObserver observer = [&out](const RestartEvent& e) {
    out.restart_mismatch = std::max(out.restart_mismatch, restart_vector_mismatch(e));
    ++out.restart_events;
  };
  try {
    out.report = run(a, v, kT, cfg, observer);
  } catch (const RunError& e) {
    out.report = e.report();
    out.failure = e.what();
  } catch (const std::exception& e) {
    out.failure = e.what();
  }
  out.seconds = seconds_since(start);
  return out;
}

struct TableOneDesk {
  RunOutcome accurt_run;
  RunOutcome rt_run;
  std::optional<Reference> reference;
  std::string reference_failure;
  double reference_seconds = 0.0;
};

TableOneDesk table_one_desk() {
  const SparseMatrix a = convection_diffusion_matrix(102, 200.0);
  const Vector v = conv_diff_initial(102);
  TableOneDesk d;
  AccuRTConfig cfg;
  cfg.tol = 1e-8;
  cfg.k_max = 10;
  cfg.backend = Backend::direct_lu;
  cfg.mode = RestartMode::accurt;
  cfg.gamma0 = kT / 20.0;
  d.accurt_run = observed_run(a, v, cfg);
  cfg.mode = RestartMode::rt;
  cfg.gamma0 = kT / 10.0;
  d.rt_run = observed_run(a, v, cfg);
  const auto start = Clock::now();
  try {
    d.reference = reference_solution(a, v, kT);
  } catch (const std::exception& e) {
    d.reference_failure = e.what();
  }
  d.reference_seconds = seconds_since(start);
  return d;
}

std::string describe(const RunOutcome& r) {
  std::ostringstream s;
  if (r.report) {
    s << "restarts=" << r.report->restarts.size() << " steps=" << r.report->total_steps
      << " inner=" << r.report->total_inner_iterations << " final_gamma=" << r.report->final_gamma
      << " converged=" << r.report->converged << " warning=" << r.report->accuracy_warning;
  }
  if (!r.failure.empty()) s << " error='" << r.failure << "'";
  s << " (" << r.seconds << " s)";
  return s.str();
}

void accuracy_contract(Verdict& v, const TableOneDesk& d) {
  const double tol = 1e-8;
  v.detail << " accurt: " << describe(d.accurt_run) << "; rt: " << describe(d.rt_run);
  v.require(d.reference.has_value(), "reference failed: " + d.reference_failure);
  if (!d.reference) return;
  v.detail << "; reference " << to_string(d.reference->method) << " accuracy "
           << d.reference->accuracy;

  std::optional<double> accurt_error;
  const auto& ar = d.accurt_run.report;
  if (ar && ar->converged && ar->solution.size() > 0) {
    accurt_error = true_error(ar->solution, *d.reference);
    v.detail << "; accurt error " << *accurt_error;
  }
  v.require(accurt_error.has_value(), "accurt run did not converge");
  if (accurt_error) v.require(*accurt_error <= 10 * tol, "accurt error above 10 tol");

  const auto& rr = d.rt_run.report;
  if (!(rr && rr->converged && rr->solution.size() > 0)) {
    v.require(false, "rt run did not finish");
    return;
  }
  const double rt_error = true_error(rr->solution, *d.reference);
  v.detail << "; rt error " << rt_error;
  const bool meets = rt_error <= tol;
  const bool warned_and_worse =
      rr->accuracy_warning && accurt_error.has_value() && rt_error > *accurt_error;
  v.require(meets || warned_and_worse, "rt neither meets tol nor warns with a larger error");
}

void single_factorization(Verdict& v, const TableOneDesk& d) {
  const auto& r = d.accurt_run.report;
  v.require(r.has_value(), "no accurt report");
  if (!r) return;
  Index max_inner = 0;
  bool solvers_ok = true;
  bool halved = false;
  for (const auto& rec : r->restarts) {
    max_inner = std::max(max_inner, rec.max_inner_per_step);
    const bool at_gamma0 = rec.gamma == r->initial_gamma;
    if (!at_gamma0) halved = true;
    const InnerSolver expected = at_gamma0 ? InnerSolver::direct_lu : InnerSolver::gmres_lu;
    if (rec.solver != expected) solvers_ok = false;
  }
  v.detail << " lu_factorizations=" << r->lu_factorizations
           << " ilut_factorizations=" << r->ilut_factorizations << " halved=" << halved
           << " max inner iterations per step=" << max_inner;
  v.require(r->lu_factorizations == 1 && r->ilut_factorizations == 0,
            "not exactly one factorization");
  v.require(solvers_ok, "post-halving steps not on GMRES(10) with the LU preconditioner");
  v.require(max_inner <= 50, "more than 50 inner iterations in one step");
  v.require(d.accurt_run.failure.empty(), "run ended with an error");
}

void bookkeeping(Verdict& v, const TableOneDesk& d) {
  const double tol = 1e-8;
  for (const auto* run : {&d.accurt_run, &d.rt_run}) {
    const char* name = run == &d.accurt_run ? "accurt" : "rt";
    if (!run->report) {
      v.require(false, std::string(name) + ": no report");
      continue;
    }
    const RunReport& r = *run->report;
    double sum = 0.0;
    for (const auto& rec : r.restarts) sum += rec.delta;
    v.detail << " " << name << ": sum(delta)=" << r.delta_sum << " t_remaining=" << r.t_remaining
             << " restart events=" << run->restart_events
             << " worst restart vector mismatch=" << run->restart_mismatch;
    v.require(sum == r.delta_sum, std::string(name) + ": delta_sum is not the sum of deltas");
    v.require(r.delta_sum + r.t_remaining == kT, std::string(name) + ": sum + remaining != t");
    v.require(run->restart_mismatch <= 1e-12, std::string(name) + ": restart vector mismatch");
  }
  const auto& ar = d.accurt_run.report;
  if (!(ar && ar->converged) || ar->final_checkpoints.empty()) {
    v.require(false, "accurt run has no final checkpoints");
    return;
  }
  double worst = 0.0;
  for (double c : ar->final_checkpoints) worst = std::max(worst, c);
  v.detail << " accurt worst final checkpoint residual " << worst;
  v.require(worst <= tol * (1 + 1e-6), "final checkpoint residual above tol");
}

// ---- 7 ---------------------------------------------------------------------

void generator_fidelity(Verdict& v) {
  const Index conv_n = convection_diffusion_matrix(802, 200.0).size();
  const Index mx40 = YeeLayout(40).size();
  const Index mx80 = YeeLayout(80).size();
  const Index mx40_built = maxwell_yee_matrix(40).a.size();
  v.detail << " conv-diff 802: " << conv_n << "; maxwell 40: " << mx40 << " (built "
           << mx40_built << "); maxwell 80: " << mx80;
  v.require(conv_n == 640000, "conv-diff dimension");
  v.require(mx40 == 413526 && mx40_built == 413526, "maxwell 40 dimension");
  v.require(mx80 == 3188646, "maxwell 80 dimension");

  ConvDiffOptions options;
  options.include_diffusion = false;
  double skew_defect = 0.0;
  for (Index nx : {12, 102}) {
    for (double pe : {200.0, 1000.0}) {
      const SparseMatrix conv = convection_diffusion_matrix(nx, pe, options);
      const auto& c = conv.eigen();
      const SparseMatrix::Storage sum = c + SparseMatrix::Storage(c.transpose());
      for (Index i = 0; i < sum.nonZeros(); ++i)
        skew_defect = std::max(skew_defect, std::abs(sum.valuePtr()[i]));
    }
  }
  v.detail << "; convection-only max|C + C^T| = " << skew_defect;
  v.require(skew_defect == 0.0, "convection part not exactly skew");

  const MaxwellProblem m = maxwell_yee_matrix(8);
  const SparseMatrix::Storage scaled =
      m.scaling.cwiseInverse().asDiagonal() * m.a.eigen() * m.scaling.asDiagonal();
  const SparseMatrix::Storage msum = scaled + SparseMatrix::Storage(scaled.transpose());
  double mdefect = 0.0;
  for (Index i = 0; i < msum.nonZeros(); ++i)
    mdefect = std::max(mdefect, std::abs(msum.valuePtr()[i]));
  v.detail << "; maxwell 8 max|S + S^T| = " << mdefect;
  v.require(mdefect <= 1e-12, "scaled maxwell operator not skew");
}

// ---- 8 ---------------------------------------------------------------------

void oracle_cross_check(Verdict& v) {
  std::vector<Instance> instances = {
      {"conv-diff 12", convection_diffusion_matrix(12, 200.0), conv_diff_initial(12)},
      {"conv-diff 22 Pe1000", convection_diffusion_matrix(22, 1000.0), conv_diff_initial(22)},
      {"random 200", testing::random_accretive(200, 5, 20.0, 20.0),
       testing::random_unit_vector(200, 5)},
      {"random 400", testing::random_accretive(400, 6, 50.0, 10.0),
       testing::random_unit_vector(400, 6)},
  };
  double worst = 0.0;
  for (const auto& inst : instances) {
    const Reference dense = reference_solution(inst.a, inst.v, kT, ReferenceMethod::dense_expm);
    const Reference krylov =
        reference_solution(inst.a, inst.v, kT, ReferenceMethod::polynomial_krylov);
    const double diff = (dense.solution - krylov.solution).norm();
    worst = std::max(worst, diff);
    v.detail << " " << inst.name << ": " << diff << " (k=" << krylov.krylov_steps << ");";
  }
  v.require(worst <= 1e-11, "dense and Krylov references differ by more than 1e-11");
}

// ---- 10 --------------------------------------------------------------------

void curve_minima(Verdict& v) {
  const SparseMatrix a = convection_diffusion_matrix(102, 200.0);
  const Vector b = conv_diff_initial(102);
  auto curve = [&](double gamma) {
    const ArnoldiState st = testing::sai_state(a, b, gamma, 10);
    return residual_samples(st, projected_matrix(st), kT, 500);
  };
  const ResidualSamples wide = curve(kT / 20.0);
  const ResidualSamples narrow = curve(kT / 80.0);
  double min_wide = std::numeric_limits<double>::infinity();
  for (double r : wide.norms) min_wide = std::min(min_wide, r);
  double min_narrow = std::numeric_limits<double>::infinity();
  double at = 0.0;
  for (std::size_t j = 0; j < narrow.times.size(); ++j) {
    if (narrow.times[j] > kT / 2) break;
    if (narrow.norms[j] < min_narrow) {
      min_narrow = narrow.norms[j];
      at = narrow.times[j];
    }
  }
  v.detail << " min ||r_10|| gamma=t/20 over (0,t]: " << min_wide
           << "; gamma=t/80 over (0,t/2]: " << min_narrow << " at s=" << at;
  v.require(min_narrow < min_wide, "smaller shift does not give a smaller residual minimum");
}

}  // namespace

int main() {
  set_spmv_threads(1);
  bool all = true;
  all &= report(1, residual_identity, 10);
  all &= report(2, lemma_one, 5);
  all &= report(3, proposition_one, 10);
  all &= report(4, proposition_two, 5);

  const auto start = Clock::now();
  const TableOneDesk desk = table_one_desk();
  const double suite_seconds = seconds_since(start);
  all &= report(
      5,
      [&](Verdict& v) {
        accuracy_contract(v, desk);
        v.detail << "; suite time " << suite_seconds << " s";
        v.require(suite_seconds <= 120, "suite runtime above 2 min");
      },
      0);
  all &= report(6, [&](Verdict& v) { single_factorization(v, desk); }, 0);
  all &= report(7, generator_fidelity, 30);
  all &= report(8, oracle_cross_check, 10);
  all &= report(9, [&](Verdict& v) { bookkeeping(v, desk); }, 0);
  all &= report(10, curve_minima, 60);
  return all ? 0 : 1;
}
