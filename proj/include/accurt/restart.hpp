#pragma once

// Restarted SAI Krylov evaluation of exp(-tA)v. Each cycle runs up to k_max
// Arnoldi steps and stops once the residual is below tol at three checkpoints;
// otherwise the residual curve is scanned on a uniform grid and the process
// restarts from y_k(delta) with the largest admissible delta. In AccuRT mode a
// scan without admissible point halves the shift instead, and all later shifted
// systems are solved by GMRES preconditioned with the initial factorization.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "accurt/arnoldi.hpp"
#include "accurt/factorization.hpp"
#include "accurt/iterative.hpp"

namespace accurt {

/// rt: residual-time restarting with a fixed shift. accurt: rt plus shift
/// halving. polynomial: residual-time restarting of the polynomial Arnoldi
/// process.
enum class RestartMode { rt, accurt, polynomial };

/// How (I + gamma A) w = v is solved. direct_lu factorizes I + gamma0 A once
/// and switches to GMRES preconditioned by that LU when gamma changes.
/// gmres_ilut uses GMRES preconditioned by an ILUT factorization of
/// I + gamma0 A for every shift. gmres_unpreconditioned uses plain GMRES.
enum class Backend { direct_lu, gmres_ilut, gmres_unpreconditioned };

struct AccuRTConfig {
  double tol = 1e-8;
  Index k_max = 10;
  /// Initial shift; t / 20 when unset.
  std::optional<double> gamma0;
  Index checkpoint_count = 3;
  Index scan_count = 500;
  double gamma_halving = 2.0;
  /// A halving that would take the shift below gamma0 * min_gamma_ratio ends
  /// the run with RunError. Near zero the SAI step degenerates to the identity
  /// and breaks down spuriously.
  double min_gamma_ratio = 1e-6;
  Backend backend = Backend::direct_lu;
  /// Relative tolerance of the inner GMRES solves;
  /// max(1e-2 tol / max(1, t), 1e-12) when unset.
  std::optional<double> inner_tol;
  Index max_restarts = 200;
  RestartMode mode = RestartMode::accurt;
  Index gmres_restart = 10;
  Index gmres_max_outer = 100;
  double ilut_drop = 1e-3;
  DropRule ilut_rule = DropRule::row_norm_relative;
  /// With gmres_ilut: skip the preconditioner for shifts where plain
  /// Richardson would contract faster (checked against a power-iteration
  /// estimate of rho(A)).
  bool auto_precondition = false;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
  double initial_gamma(double t) const { return gamma0.value_or(t / 20.0); }
  double inner_tolerance(double t) const;
};

enum class InnerSolver { none, direct_lu, gmres_lu, gmres_ilut, gmres_plain };

/// One outer cycle: an Arnoldi run followed by a convergence stop, a restart
/// or a shift halving.
struct RestartRecord {
  double gamma = 0.0;
  /// Segment length still to cover when the cycle started.
  double t_before = 0.0;
  /// Time advanced by the restart; 0 for a halving or a converged cycle.
  double delta = 0.0;
  Index steps = 0;
  Index inner_iterations = 0;
  Index max_inner_per_step = 0;
  /// Minimum over the residual scan; NaN when no scan was needed.
  double residual_min = 0.0;
  /// Upper end of the scanned interval; NaN when no scan was needed.
  double scan_end = 0.0;
  bool gamma_halved = false;
  bool accuracy_warning = false;
  bool converged = false;
  InnerSolver solver = InnerSolver::none;
};

struct RunReport {
  RestartMode mode = RestartMode::accurt;
  Backend backend = Backend::direct_lu;
  double t = 0.0;
  double tol = 0.0;
  Index k_max = 0;
  double initial_gamma = 0.0;
  double final_gamma = 0.0;
  std::vector<RestartRecord> restarts;
  Index total_steps = 0;
  Index total_inner_iterations = 0;
  /// Residual norms of the final segment at s = t_end j / checkpoint_count.
  std::vector<double> final_checkpoints;
  /// Sum of all deltas and the time left when the run stopped.
  double delta_sum = 0.0;
  double t_remaining = 0.0;
  Index lu_factorizations = 0;
  Index ilut_factorizations = 0;
  /// Set when some rt or polynomial restart had no admissible delta.
  bool accuracy_warning = false;
  bool converged = false;
  Vector solution;
};

/// Handed to the observer after every restart with delta > 0, and once more
/// for the segment that ends the run. For that last one `delta` is the time
/// the segment covers and `next_start` is the returned solution.
struct RestartEvent {
  const ArnoldiState& state;
  const Matrix& h;
  double delta;
  double t_before;
  const Vector& next_start;
  bool final_segment = false;
};

using RunObserver = std::function<void(const RestartEvent&)>;

/// Carries the partial report of a run that had to give up.
class RunError : public Error {
 public:
  RunError(const std::string& what, RunReport report) : Error(what), report_(std::move(report)) {}
  const RunReport& report() const { return report_; }

 private:
  RunReport report_;
};

/// Largest sampled time whose residual norm is <= tol, 0 if there is none.
double find_delta(const ResidualSamples& samples, double tol);

/// Approximates exp(-tA)v. Throws RunError when max_restarts is exceeded or
/// an inner solve fails.
RunReport run(const SparseMatrix& a, const Vector& v, double t, const AccuRTConfig& config,
              const RunObserver& observer = {});

/// run() started from a shift found by an earlier run on the same matrix.
RunReport resume_with_gamma(const SparseMatrix& a, const Vector& v, double t,
                            const AccuRTConfig& config, double gamma_detected,
                            const RunObserver& observer = {});

const char* to_string(RestartMode mode);
const char* to_string(Backend backend);
const char* to_string(InnerSolver solver);

}  // namespace accurt
