#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ddlab/losses.hpp"
#include "ddlab/numkit.hpp"

namespace ddlab {

struct SolverConfig {
  int max_iter = 100;
  double tol_inf = 1e-4;  // stop when ||beta_t - beta_{t-1}||_inf drops below
  enum class Init { zero, min_norm };
  Init init = Init::zero;
  // Backtracking line search: Armijo with these constants; the trial step
  // doubles after each accepted step.
  double ls_shrink = 0.5;
  double ls_sufficient_decrease = 1e-4;

  bool operator==(const SolverConfig&) const = default;
};

struct LtsConfig {
  double alpha = 0.5;  // subset size h = floor(alpha * n)
  int n_starts = 20;
  int n_keep = 5;
  int initial_csteps = 2;
  double lambda_frac = 0.05;  // lambda = lambda_frac * lambda_max(subset)
  int max_csteps = 50;
  std::uint64_t seed = 0x6C8E944D1F3A5B27ULL;  // start-subset stream

  bool operator==(const LtsConfig&) const = default;
};

struct FitResult {
  Vector beta_hat;
  int iterations = 0;
  bool converged = true;
  std::optional<std::vector<Index>> clean_subset;  // ascending row indices
  double objective = 0.0;
};

/// Minimum l2-norm least squares; interpolates when p >= rank allows.
FitResult fit_min_l2(const Eigen::Ref<const Matrix>& x,
                     const Eigen::Ref<const Vector>& y);

using IterationCallback = std::function<void(int iteration, double objective)>;

/// Gradient descent on (1/n) sum rho(y_i - x_i beta) with backtracking line
/// search. The callback, when set, observes the objective after every update.
FitResult fit_gd_m_estimator(const Eigen::Ref<const Matrix>& x,
                             const Eigen::Ref<const Vector>& y,
                             const LossSpec& loss, const SolverConfig& cfg,
                             const IterationCallback& on_iteration = {});

struct LassoResult {
  Vector beta;
  int passes = 0;
  bool converged = true;
};

/// Coordinate descent for (1/(2m)) ||y - x beta||^2 + lambda ||beta||_1,
/// no intercept. Stops when the largest coordinate move in a full pass is
/// below tol; hitting max_pass returns the iterate flagged non-converged.
LassoResult lasso_cd(const Eigen::Ref<const Matrix>& x,
                     const Eigen::Ref<const Vector>& y, double lambda,
                     double tol = 1e-7, int max_pass = 1000,
                     const Vector* warm_start = nullptr);

using SubsetFitter =
    std::function<Vector(const Matrix& x_subset, const Vector& y_subset)>;

struct CstepResult {
  std::vector<Index> subset;  // ascending
  Vector beta;
  double trimmed_sse;  // sum of the h smallest squared residuals of beta
};

/// One concentration step: refit on the subset rows, then re-select the
/// |subset| smallest squared residuals over all rows (ties to the lowest row
/// index). With a least-squares fitter the trimmed objective never increases.
CstepResult cstep(const Eigen::Ref<const Matrix>& x,
                  const Eigen::Ref<const Vector>& y,
                  const std::vector<Index>& subset, const SubsetFitter& fit);

/// Sparse least trimmed squares: minimizes over h-subsets H the objective
/// sum_{i in H} (y_i - x_i beta)^2 / h + lambda ||beta||_1, via random starts
/// refined by concentration steps. clean_subset holds the winning subset.
FitResult fit_slts(const Eigen::Ref<const Matrix>& x,
                   const Eigen::Ref<const Vector>& y, const LtsConfig& cfg);

/// Runs fit_slts, then min-norm interpolates the rows of its clean subset.
FitResult fit_subset_interpolator(const Eigen::Ref<const Matrix>& x,
                                  const Eigen::Ref<const Vector>& y,
                                  const LtsConfig& cfg);

enum class EstimatorKind { min_l2, huber_gd, tukey_gd, slts, subset_interp };

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::min_l2;
  LossSpec loss = LossSpec::huber();  // huber_gd / tukey_gd only
  SolverConfig solver;
  LtsConfig lts;

  bool operator==(const EstimatorSpec&) const = default;
};

FitResult fit(const EstimatorSpec& spec, const Eigen::Ref<const Matrix>& x,
              const Eigen::Ref<const Vector>& y);

std::string estimator_name(EstimatorKind kind);
EstimatorKind estimator_from_name(const std::string& name);

}  // namespace ddlab
