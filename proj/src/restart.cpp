#include "accurt/restart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace accurt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> checkpoint_residuals(const ArnoldiState& state, const Matrix& h, double t_end,
                                         Index count) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Index j = 1; j <= count; ++j) {
    const double s = j == count ? t_end : static_cast<double>(j) * t_end / static_cast<double>(count);
    out.push_back(residual_norm(state, h, s));
  }
  return out;
}

class Engine {
 public:
  Engine(const SparseMatrix& a, const Vector& v, double t, const AccuRTConfig& config,
         const RunObserver& observer)
      : a_(a), v_(v), t_(t), cfg_(config), observer_(observer) {}

  RunReport run() {
    cfg_.validate();
    if (!(t_ > 0) || !std::isfinite(t_)) throw InvalidArgument("run: t must be positive and finite");
    if (a_.size() != v_.size()) throw DimensionError("run: matrix and vector sizes differ");
    const double beta = v_.norm();
    if (!(beta > 0) || !std::isfinite(beta)) {
      throw InvalidArgument("run: starting vector must be nonzero and finite");
    }

    gamma0_ = cfg_.initial_gamma(t_);
    if (!(gamma0_ > 0) || !std::isfinite(gamma0_)) {
      throw InvalidArgument("run: initial gamma must be positive");
    }
    inner_tol_ = cfg_.inner_tolerance(t_);
    report_.mode = cfg_.mode;
    report_.backend = cfg_.backend;
    report_.t = t_;
    report_.tol = cfg_.tol;
    report_.k_max = cfg_.k_max;
    report_.initial_gamma = cfg_.mode == RestartMode::polynomial ? 0.0 : gamma0_;
    report_.t_remaining = t_;
    prepare_factorizations();

    double gamma = report_.initial_gamma;
    bool gamma_changed = false;
    bool restrict_scan = false;
    Vector start = v_;
    double t_rem = t_;

    while (true) {
      if (static_cast<Index>(report_.restarts.size()) >= cfg_.max_restarts) {
        fail("run: no convergence within " + std::to_string(cfg_.max_restarts) + " restarts");
      }
      RestartRecord rec;
      rec.gamma = gamma;
      rec.t_before = t_rem;
      rec.residual_min = kNaN;
      rec.scan_end = kNaN;

      ArnoldiState state = cfg_.mode == RestartMode::polynomial
                               ? ArnoldiState::polynomial(start, cfg_.k_max)
                               : ArnoldiState::shift_invert(start, gamma, cfg_.k_max);
      const ShiftedSolver solver = make_solver(gamma, gamma_changed, rec.solver);

      Matrix h;
      for (Index k = 1; k <= cfg_.k_max; ++k) {
        step(state, solver, rec);
        h = projected_matrix(state);
        const auto checkpoints = checkpoint_residuals(state, h, t_rem, cfg_.checkpoint_count);
        const double resnorm = *std::max_element(checkpoints.begin(), checkpoints.end());
        // An invariant subspace gives the exact solution whatever k is.
        if (state.exact() || (resnorm <= cfg_.tol && k > 1)) {
          rec.steps = state.steps();
          rec.converged = true;
          const Vector u = projected_solution(h, state.beta(), t_rem);
          report_.final_checkpoints = checkpoints;
          Vector y = assemble_iterate(state, u);
          if (observer_) observer_(RestartEvent{state, h, t_rem, t_rem, y, true});
          finish(rec, std::move(y), gamma);
          return std::move(report_);
        }
      }
      rec.steps = state.steps();

      const double scan_end = restrict_scan ? t_rem / 2.0 : t_rem;
      const ResidualSamples samples = residual_samples(state, h, scan_end, cfg_.scan_count);
      const auto min_it = std::min_element(samples.norms.begin(), samples.norms.end());
      rec.scan_end = scan_end;
      rec.residual_min = *min_it;

      double delta = find_delta(samples, cfg_.tol);
      if (delta == 0.0) {
        if (cfg_.mode == RestartMode::accurt) {
          if (gamma / cfg_.gamma_halving < gamma0_ * cfg_.min_gamma_ratio) {
            push(rec);
            fail("run: shift would fall below " + std::to_string(cfg_.min_gamma_ratio) +
                 " times its initial value");
          }
          gamma /= cfg_.gamma_halving;
          gamma_changed = true;
          restrict_scan = true;
          rec.gamma_halved = true;
          push(rec);
          continue;
        }
        delta = samples.times[static_cast<std::size_t>(min_it - samples.norms.begin())];
        rec.accuracy_warning = true;
        report_.accuracy_warning = true;
      } else {
        restrict_scan = false;
      }

      const Vector u = projected_solution(h, state.beta(), delta);
      Vector next = assemble_iterate(state, u);
      const double delta_sum = report_.delta_sum + delta;
      const bool last = delta == t_rem || t_ - delta_sum <= 0.0;
      if (observer_) observer_(RestartEvent{state, h, delta, t_rem, next, last});
      rec.delta = delta;
      report_.delta_sum = delta_sum;
      t_rem = t_ - delta_sum;
      report_.t_remaining = t_rem;
      if (last) {
        rec.converged = true;
        report_.final_checkpoints = checkpoint_residuals(state, h, delta, cfg_.checkpoint_count);
        finish(rec, std::move(next), gamma);
        return std::move(report_);
      }
      push(rec);
      start = std::move(next);
    }
  }

 private:
  void prepare_factorizations() {
    if (cfg_.mode == RestartMode::polynomial) return;
    if (cfg_.backend == Backend::direct_lu) {
      lu_ = lu_factorize_shifted(a_, gamma0_);
      report_.lu_factorizations = 1;
    } else if (cfg_.backend == Backend::gmres_ilut) {
      ilut_ = ilut_factorize_shifted(a_, gamma0_, cfg_.ilut_drop, cfg_.ilut_rule);
      report_.ilut_factorizations = 1;
      if (cfg_.auto_precondition) rho_ = spectral_radius_estimate(a_);
    }
  }

  ShiftedSolver make_solver(double gamma, bool gamma_changed, InnerSolver& kind) {
    if (cfg_.mode == RestartMode::polynomial) {
      kind = InnerSolver::none;
      return {};
    }
    if (cfg_.backend == Backend::direct_lu && !gamma_changed) {
      kind = InnerSolver::direct_lu;
      const Factorization* lu = &*lu_;
      return [lu](const Vector& b) {
        SolveResult r;
        r.x = lu->solve(b);
        r.stats.converged = true;
        return r;
      };
    }
    const Factorization* precond = nullptr;
    if (cfg_.backend == Backend::direct_lu) {
      kind = InnerSolver::gmres_lu;
      precond = &*lu_;
    } else if (cfg_.backend == Backend::gmres_ilut &&
               (!cfg_.auto_precondition || prefer_preconditioner(gamma, gamma0_, rho_))) {
      kind = InnerSolver::gmres_ilut;
      precond = &*ilut_;
    } else {
      kind = InnerSolver::gmres_plain;
    }
    GmresOptions opts;
    opts.restart = cfg_.gmres_restart;
    opts.tol = inner_tol_;
    opts.max_outer = cfg_.gmres_max_outer;
    const SparseMatrix* a = &a_;
    return [a, gamma, opts, precond](const Vector& b) {
      const LinearOperator op = LinearOperator::shifted(*a, gamma);
      return gmres_restarted(op, b, Vector::Zero(b.size()), opts, precond);
    };
  }

  void step(ArnoldiState& state, const ShiftedSolver& solver, RestartRecord& rec) {
    try {
      if (state.mode() == KrylovMode::polynomial) {
        arnoldi_step_polynomial(state, a_);
      } else {
        arnoldi_step_sai(state, a_, solver);
      }
    } catch (const NonConvergenceError& e) {
      rec.steps = state.steps();
      rec.inner_iterations = state.inner_iterations() + e.best().stats.iterations;
      rec.max_inner_per_step = std::max(state.max_inner_per_step(), e.best().stats.iterations);
      push(rec);
      fail(std::string("run: inner solve failed: ") + e.what());
    }
    rec.inner_iterations = state.inner_iterations();
    rec.max_inner_per_step = state.max_inner_per_step();
  }

  void push(const RestartRecord& rec) {
    report_.restarts.push_back(rec);
    report_.total_steps += rec.steps;
    report_.total_inner_iterations += rec.inner_iterations;
  }

  void finish(const RestartRecord& rec, Vector solution, double gamma) {
    push(rec);
    report_.final_gamma = gamma;
    report_.converged = true;
    report_.solution = std::move(solution);
  }

  [[noreturn]] void fail(const std::string& what) {
    report_.final_gamma = report_.restarts.empty() ? report_.initial_gamma
                                                   : report_.restarts.back().gamma;
    throw RunError(what, std::move(report_));
  }

  const SparseMatrix& a_;
  const Vector& v_;
  double t_;
  const AccuRTConfig& cfg_;
  const RunObserver& observer_;
  double gamma0_ = 0.0;
  double inner_tol_ = 0.0;
  double rho_ = 0.0;
  std::optional<Factorization> lu_;
  std::optional<Factorization> ilut_;
  RunReport report_;
};

}  // namespace

void AccuRTConfig::validate() const {
  if (!(tol > 0) || !std::isfinite(tol)) throw InvalidArgument("config: tol must be positive");
  if (k_max < 2) throw InvalidArgument("config: k_max must be >= 2");
  if (k_max > kExpmSizeCap) {
    throw InvalidArgument("config: k_max must be <= " + std::to_string(kExpmSizeCap));
  }
  if (gamma0 && !(*gamma0 > 0 && std::isfinite(*gamma0))) {
    throw InvalidArgument("config: gamma0 must be positive");
  }
  if (checkpoint_count < 1) throw InvalidArgument("config: checkpoint_count must be >= 1");
  if (scan_count < 1) throw InvalidArgument("config: scan_count must be >= 1");
  if (!(min_gamma_ratio > 0 && min_gamma_ratio < 1)) {
    throw InvalidArgument("config: min_gamma_ratio must lie in (0, 1)");
  }
  if (!(gamma_halving > 1) || !std::isfinite(gamma_halving)) {
    throw InvalidArgument("config: gamma_halving must be > 1");
  }
  if (inner_tol && !(*inner_tol > 0 && *inner_tol < 1)) {
    throw InvalidArgument("config: inner_tol must lie in (0, 1)");
  }
  if (max_restarts < 1) throw InvalidArgument("config: max_restarts must be >= 1");
  if (gmres_restart < 1) throw InvalidArgument("config: gmres_restart must be >= 1");
  if (gmres_max_outer < 1) throw InvalidArgument("config: gmres_max_outer must be >= 1");
  if (!(ilut_drop >= 0) || !std::isfinite(ilut_drop)) {
    throw InvalidArgument("config: ilut_drop must be >= 0");
  }
}

double AccuRTConfig::inner_tolerance(double t) const {
  if (inner_tol) return *inner_tol;
  return std::max(1e-2 * tol / std::max(1.0, t), 1e-12);
}

double find_delta(const ResidualSamples& samples, double tol) {
  if (samples.times.empty() || samples.times.size() != samples.norms.size()) {
    throw InvalidArgument("find_delta: samples must be nonempty and consistent");
  }
  double delta = 0.0;
  for (std::size_t j = 0; j < samples.times.size(); ++j) {
    if (samples.norms[j] <= tol) delta = std::max(delta, samples.times[j]);
  }
  return delta;
}

RunReport run(const SparseMatrix& a, const Vector& v, double t, const AccuRTConfig& config,
              const RunObserver& observer) {
  return Engine(a, v, t, config, observer).run();
}

RunReport resume_with_gamma(const SparseMatrix& a, const Vector& v, double t,
                            const AccuRTConfig& config, double gamma_detected,
                            const RunObserver& observer) {
  if (!(gamma_detected > 0) || !std::isfinite(gamma_detected)) {
    throw InvalidArgument("resume_with_gamma: gamma must be positive");
  }
  AccuRTConfig cfg = config;
  cfg.gamma0 = gamma_detected;
  return run(a, v, t, cfg, observer);
}

const char* to_string(RestartMode mode) {
  switch (mode) {
    case RestartMode::rt: return "rt";
    case RestartMode::accurt: return "accurt";
    case RestartMode::polynomial: return "polynomial";
  }
  return "?";
}

const char* to_string(Backend backend) {
  switch (backend) {
    case Backend::direct_lu: return "direct-lu";
    case Backend::gmres_ilut: return "gmres-ilut";
    case Backend::gmres_unpreconditioned: return "gmres-unpreconditioned";
  }
  return "?";
}

const char* to_string(InnerSolver solver) {
  switch (solver) {
    case InnerSolver::none: return "none";
    case InnerSolver::direct_lu: return "direct-lu";
    case InnerSolver::gmres_lu: return "gmres-lu";
    case InnerSolver::gmres_ilut: return "gmres-ilut";
    case InnerSolver::gmres_plain: return "gmres";
  }
  return "?";
}

}  // namespace accurt
