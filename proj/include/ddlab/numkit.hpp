#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace ddlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Deterministic stream generator: xoshiro256++ state derived from
/// (seed, stream_id) via splitmix64 absorption. The same pair yields the
/// same draw sequence on every platform; distinct stream ids give
/// independent streams for the same seed.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  /// Uniform on [0, 1), 53-bit resolution.
  double uniform01();
  /// Standard normal via Box-Muller; the paired draw is cached.
  double normal();
  /// Uniform integer on [0, bound), modulo bias removed by rejection.
  std::uint64_t uniform_below(std::uint64_t bound);

 private:
  std::uint64_t state_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

Vector draw_normal(RngStream& rng, Index count);
Vector draw_uniform(RngStream& rng, double lo, double hi, Index count);
/// m distinct indices from [0, n), returned ascending.
std::vector<Index> draw_indices_without_replacement(RngStream& rng, Index m,
                                                    Index n);

struct SvdResult {
  Matrix u;                 // rows x k, orthonormal columns
  Vector singular_values;   // length k, non-negative, non-increasing
  Matrix v;                 // cols x k, orthonormal columns
};

/// Thin SVD, a = u * diag(singular_values) * v^T.
SvdResult svd(const Eigen::Ref<const Matrix>& a);

/// Moore-Penrose pseudo-inverse. Singular values at or below
/// tol_factor * max(singular_values) * max(rows, cols) are treated as zero.
Matrix pinv(const Eigen::Ref<const Matrix>& a, double tol_factor = 1e-12);

/// Minimum l2-norm least-squares solution x^+ y; interpolates exactly
/// whenever y lies in the column span of x.
Vector min_norm_lstsq(const Eigen::Ref<const Matrix>& x,
                      const Eigen::Ref<const Vector>& y);

/// Weighted variant: (W^{1/2} x)^+ W^{1/2} y with w normalized to sum 1.
Vector weighted_min_norm_lstsq(const Eigen::Ref<const Matrix>& x,
                               const Eigen::Ref<const Vector>& y,
                               const Eigen::Ref<const Vector>& w);

}  // namespace ddlab
