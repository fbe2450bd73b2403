#include "ddlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace ddlab {

namespace {

void check_xy(const Eigen::Ref<const Matrix>& x,
              const Eigen::Ref<const Vector>& y, const char* where) {
  if (x.rows() != y.size()) {
    throw std::invalid_argument(std::string(where) + ": x is " +
                                std::to_string(x.rows()) + "x" +
                                std::to_string(x.cols()) + " but y has length " +
                                std::to_string(y.size()));
  }
  if (x.rows() < 1 || x.cols() < 1) {
    throw std::invalid_argument(std::string(where) + ": empty problem");
  }
}

Matrix gather_rows(const Eigen::Ref<const Matrix>& x,
                   const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Index>(i)) = x.row(rows[i]);
  }
  return out;
}

Vector gather(const Eigen::Ref<const Vector>& y, const std::vector<Index>& rows) {
  Vector out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Index>(i)] = y[rows[i]];
  return out;
}

/// Indices of the h smallest squared residuals; ties go to the lower row
/// index. Returned ascending.
std::vector<Index> select_smallest(const Vector& r2, Index h) {
  std::vector<Index> order(static_cast<std::size_t>(r2.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (r2[a] != r2[b]) return r2[a] < r2[b];
    return a < b;
  });
  order.resize(static_cast<std::size_t>(h));
  std::sort(order.begin(), order.end());
  return order;
}

double soft_threshold(double a, double lambda) {
  if (a > lambda) return a - lambda;
  if (a < -lambda) return a + lambda;
  return 0.0;
}

}  // namespace

FitResult fit_min_l2(const Eigen::Ref<const Matrix>& x,
                     const Eigen::Ref<const Vector>& y) {
  check_xy(x, y, "fit_min_l2");
  FitResult out;
  out.beta_hat = min_norm_lstsq(x, y);
  out.iterations = 1;
  out.converged = true;
  out.objective = (y - x * out.beta_hat).squaredNorm() /
                  static_cast<double>(x.rows());
  return out;
}

FitResult fit_gd_m_estimator(const Eigen::Ref<const Matrix>& x,
                             const Eigen::Ref<const Vector>& y,
                             const LossSpec& loss, const SolverConfig& cfg,
                             const IterationCallback& on_iteration) {
  check_xy(x, y, "fit_gd_m_estimator");
  if (cfg.max_iter < 1) throw std::invalid_argument("fit_gd_m_estimator: max_iter < 1");
  if (!(cfg.tol_inf > 0.0)) throw std::invalid_argument("fit_gd_m_estimator: tol_inf <= 0");
  if (!(cfg.ls_shrink > 0.0 && cfg.ls_shrink < 1.0)) {
    throw std::invalid_argument("fit_gd_m_estimator: ls_shrink outside (0,1)");
  }
  if (!(cfg.ls_sufficient_decrease > 0.0 && cfg.ls_sufficient_decrease < 1.0)) {
    throw std::invalid_argument("fit_gd_m_estimator: ls_sufficient_decrease outside (0,1)");
  }

  Vector beta = cfg.init == SolverConfig::Init::zero
                    ? Vector::Zero(x.cols())
                    : min_norm_lstsq(x, y);
  auto [value, grad] = objective_and_gradient(loss, x, y, beta);
  if (!std::isfinite(value)) {
    throw std::runtime_error("fit_gd_m_estimator: non-finite objective at iteration 0");
  }

  FitResult out;
  out.converged = false;
  double step = 1.0;
  for (int t = 1; t <= cfg.max_iter; ++t) {
    const double g2 = grad.squaredNorm();
    if (g2 == 0.0) {
      out.converged = true;  // exact stationary point, no update needed
      break;
    }
    double eta = std::min(2.0 * step, 1e8);
    bool accepted = false;
    Vector beta_next;
    double value_next = value;
    for (int bt = 0; bt < 80; ++bt) {
      beta_next = beta - eta * grad;
      value_next = objective_value(loss, x, y, beta_next);
      if (std::isfinite(value_next) &&
          value_next <= value - cfg.ls_sufficient_decrease * eta * g2) {
        accepted = true;
        break;
      }
      eta *= cfg.ls_shrink;
    }
    if (!accepted) {
      out.converged = true;  // no measurable descent left at machine precision
      break;
    }
    step = eta;
    const double move = (beta_next - beta).lpNorm<Eigen::Infinity>();
    beta.swap(beta_next);
    value = value_next;
    out.iterations = t;
    if (!std::isfinite(value)) {
      throw std::runtime_error("fit_gd_m_estimator: diverged at iteration " +
                               std::to_string(t));
    }
    if (on_iteration) on_iteration(t, value);
    if (move < cfg.tol_inf) {
      out.converged = true;
      break;
    }
    std::tie(value, grad) = objective_and_gradient(loss, x, y, beta);
  }
  out.beta_hat = std::move(beta);
  out.objective = value;
  return out;
}

LassoResult lasso_cd(const Eigen::Ref<const Matrix>& x,
                     const Eigen::Ref<const Vector>& y, double lambda,
                     double tol, int max_pass, const Vector* warm_start) {
  check_xy(x, y, "lasso_cd");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lasso_cd: lambda must be >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("lasso_cd: tol must be positive");
  if (max_pass < 1) throw std::invalid_argument("lasso_cd: max_pass < 1");

  const Index m = x.rows();
  const Index p = x.cols();
  Vector beta = (warm_start != nullptr && warm_start->size() == p)
                    ? *warm_start
                    : Vector::Zero(p);
  Vector scale(p);
  for (Index j = 0; j < p; ++j) {
    scale[j] = x.col(j).squaredNorm() / static_cast<double>(m);
  }
  Vector r = y - x * beta;
  LassoResult out;
  out.converged = false;
  for (int pass = 1; pass <= max_pass; ++pass) {
    double max_move = 0.0;
    for (Index j = 0; j < p; ++j) {
      const double old = beta[j];
      if (scale[j] == 0.0) {
        if (old != 0.0) {
          r += x.col(j) * old;
          beta[j] = 0.0;
          max_move = std::max(max_move, std::abs(old));
        }
        continue;
      }
      const double rho_j = x.col(j).dot(r) / static_cast<double>(m) + scale[j] * old;
      const double next = soft_threshold(rho_j, lambda) / scale[j];
      if (next != old) {
        r += x.col(j) * (old - next);
        beta[j] = next;
        max_move = std::max(max_move, std::abs(next - old));
      }
    }
    out.passes = pass;
    if (max_move < tol) {
      out.converged = true;
      break;
    }
  }
  out.beta = std::move(beta);
  return out;
}

CstepResult cstep(const Eigen::Ref<const Matrix>& x,
                  const Eigen::Ref<const Vector>& y,
                  const std::vector<Index>& subset, const SubsetFitter& fit) {
  check_xy(x, y, "cstep");
  if (subset.size() < 1 || static_cast<Index>(subset.size()) > x.rows()) {
    throw std::invalid_argument("cstep: subset size " + std::to_string(subset.size()) +
                                " outside [1, " + std::to_string(x.rows()) + "]");
  }
  for (Index i : subset) {
    if (i < 0 || i >= x.rows()) {
      throw std::invalid_argument("cstep: subset index " + std::to_string(i) +
                                  " out of range");
    }
  }
  for (std::size_t k = 1; k < subset.size(); ++k) {
    if (subset[k] <= subset[k - 1]) {
      throw std::invalid_argument("cstep: subset must be strictly ascending");
    }
  }
  const Matrix xs = gather_rows(x, subset);
  const Vector ys = gather(y, subset);
  CstepResult out;
  out.beta = fit(xs, ys);
  if (out.beta.size() != x.cols()) {
    throw std::invalid_argument("cstep: fitter returned length " +
                                std::to_string(out.beta.size()) + ", expected " +
                                std::to_string(x.cols()));
  }
  const Vector r2 = (y - x * out.beta).array().square();
  out.subset = select_smallest(r2, static_cast<Index>(subset.size()));
  out.trimmed_sse = 0.0;
  for (Index i : out.subset) out.trimmed_sse += r2[i];
  return out;
}

namespace {

struct SltsState {
  std::vector<Index> subset;
  Vector beta;
  double objective = std::numeric_limits<double>::infinity();
  int csteps = 0;
  bool converged = false;
};

double subset_lambda(const Matrix& xs, const Vector& ys, double lambda_frac) {
  const double h = static_cast<double>(ys.size());
  const Vector centered = ys.array() - ys.mean();
  const double lambda_max = (xs.transpose() * centered).cwiseAbs().maxCoeff() / h;
  return lambda_frac * lambda_max;
}

}  // namespace

FitResult fit_slts(const Eigen::Ref<const Matrix>& x,
                   const Eigen::Ref<const Vector>& y, const LtsConfig& cfg) {
  check_xy(x, y, "fit_slts");
  const Index n = x.rows();
  if (n < 4) throw std::invalid_argument("fit_slts: need n >= 4, got " + std::to_string(n));
  if (!(cfg.alpha >= 0.5 && cfg.alpha <= 1.0)) {
    throw std::invalid_argument("fit_slts: alpha outside [0.5, 1]");
  }
  if (cfg.n_starts < 1) throw std::invalid_argument("fit_slts: n_starts < 1");
  if (cfg.n_keep < 1 || cfg.n_keep > cfg.n_starts) {
    throw std::invalid_argument("fit_slts: n_keep outside [1, n_starts]");
  }
  if (cfg.initial_csteps < 0) throw std::invalid_argument("fit_slts: initial_csteps < 0");
  if (!(cfg.lambda_frac >= 0.0)) throw std::invalid_argument("fit_slts: lambda_frac < 0");
  if (cfg.max_csteps < 1) throw std::invalid_argument("fit_slts: max_csteps < 1");
  const Index h = static_cast<Index>(std::floor(cfg.alpha * static_cast<double>(n)));
  if (h < 2) throw std::invalid_argument("fit_slts: subset size h < 2");

  // Fits the penalized problem on a subset; lambda is recomputed from that
  // subset every time.
  auto fit_subset = [&](const std::vector<Index>& subset, const Vector* warm,
                        SltsState& st) {
    const Matrix xs = gather_rows(x, subset);
    const Vector ys = gather(y, subset);
    const double lambda = subset_lambda(xs, ys, cfg.lambda_frac);
    const LassoResult lr = lasso_cd(xs, ys, lambda, 1e-7, 1000, warm);
    st.subset = subset;
    st.beta = lr.beta;
    st.objective = (ys - xs * lr.beta).squaredNorm() / static_cast<double>(h) +
                   lambda * lr.beta.lpNorm<1>();
  };

  auto reselect = [&](const Vector& beta) {
    const Vector r2 = (y - x * beta).array().square();
    return select_smallest(r2, h);
  };

  RngStream rng(cfg.seed, 0);
  std::vector<SltsState> candidates;
  std::string last_error;
  for (int s = 0; s < cfg.n_starts; ++s) {
    try {
      SltsState st;
      fit_subset(draw_indices_without_replacement(rng, h, n), nullptr, st);
      for (int t = 0; t < cfg.initial_csteps; ++t) {
        const std::vector<Index> next = reselect(st.beta);
        const Vector warm = st.beta;
        fit_subset(next, &warm, st);
        ++st.csteps;
      }
      candidates.push_back(std::move(st));
    } catch (const std::exception& e) {
      last_error = e.what();
    }
  }
  if (candidates.empty()) {
    throw std::runtime_error("fit_slts: all " + std::to_string(cfg.n_starts) +
                             " starts failed; last error: " + last_error);
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const SltsState& a, const SltsState& b) {
                     return a.objective < b.objective;
                   });
  if (static_cast<int>(candidates.size()) > cfg.n_keep) {
    candidates.resize(static_cast<std::size_t>(cfg.n_keep));
  }

  SltsState best;
  for (SltsState& st : candidates) {
    SltsState chain_best = st;
    for (int t = 0; t < cfg.max_csteps; ++t) {
      const std::vector<Index> next = reselect(st.beta);
      if (next == st.subset) {
        st.converged = true;
        break;
      }
      const Vector warm = st.beta;
      fit_subset(next, &warm, st);
      ++st.csteps;
      // lambda drifts with the subset, so keep the best state seen.
      if (st.objective < chain_best.objective) {
        const int csteps = st.csteps;
        chain_best = st;
        chain_best.csteps = csteps;
      }
    }
    chain_best.converged = st.converged;
    chain_best.csteps = st.csteps;
    if (chain_best.objective < best.objective) best = std::move(chain_best);
  }
  if (best.beta.size() == 0) {
    throw std::runtime_error("fit_slts: refinement produced no usable candidate");
  }

  FitResult out;
  out.beta_hat = best.beta;
  out.iterations = best.csteps;
  out.converged = best.converged;
  out.clean_subset = best.subset;
  out.objective = best.objective;
  return out;
}

FitResult fit_subset_interpolator(const Eigen::Ref<const Matrix>& x,
                                  const Eigen::Ref<const Vector>& y,
                                  const LtsConfig& cfg) {
  FitResult trimmed = fit_slts(x, y, cfg);
  const std::vector<Index>& subset = *trimmed.clean_subset;
  const FitResult inner = fit_min_l2(gather_rows(x, subset), gather(y, subset));
  FitResult out;
  out.beta_hat = inner.beta_hat;
  out.iterations = trimmed.iterations;
  out.converged = trimmed.converged;
  out.clean_subset = subset;
  out.objective = inner.objective;
  return out;
}

FitResult fit(const EstimatorSpec& spec, const Eigen::Ref<const Matrix>& x,
              const Eigen::Ref<const Vector>& y) {
  switch (spec.kind) {
    case EstimatorKind::min_l2:
      return fit_min_l2(x, y);
    case EstimatorKind::huber_gd: {
      const LossSpec loss =
          spec.loss.kind == LossKind::huber ? spec.loss : LossSpec::huber();
      return fit_gd_m_estimator(x, y, loss, spec.solver);
    }
    case EstimatorKind::tukey_gd: {
      const LossSpec loss =
          spec.loss.kind == LossKind::tukey ? spec.loss : LossSpec::tukey();
      return fit_gd_m_estimator(x, y, loss, spec.solver);
    }
    case EstimatorKind::slts:
      return fit_slts(x, y, spec.lts);
    case EstimatorKind::subset_interp:
      return fit_subset_interpolator(x, y, spec.lts);
  }
  throw std::invalid_argument("fit: unknown estimator kind");
}

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::min_l2: return "min_l2";
    case EstimatorKind::huber_gd: return "huber_gd";
    case EstimatorKind::tukey_gd: return "tukey_gd";
    case EstimatorKind::slts: return "slts";
    case EstimatorKind::subset_interp: return "subset_interp";
  }
  return "unknown";
}

EstimatorKind estimator_from_name(const std::string& name) {
  if (name == "min_l2") return EstimatorKind::min_l2;
  if (name == "huber_gd") return EstimatorKind::huber_gd;
  if (name == "tukey_gd") return EstimatorKind::tukey_gd;
  if (name == "slts") return EstimatorKind::slts;
  if (name == "subset_interp") return EstimatorKind::subset_interp;
  throw std::invalid_argument(
      "unknown estimator '" + name +
      "' (expected min_l2, huber_gd, tukey_gd, slts, or subset_interp)");
}

}  // namespace ddlab
