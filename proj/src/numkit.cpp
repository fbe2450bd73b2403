#include "ddlab/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ddlab {

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

std::string shape_str(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

void require_finite(const Eigen::Ref<const Matrix>& a, const char* what) {
  if (!a.allFinite()) {
    throw std::invalid_argument(std::string(what) + " has non-finite entries (" +
                                shape_str(a.rows(), a.cols()) + ")");
  }
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t s = seed;
  state_[0] = splitmix64(s);
  s ^= stream_id ^ 0xD2B74407B1CE6E93ULL;
  state_[1] = splitmix64(s);
  state_[2] = splitmix64(s);
  state_[3] = splitmix64(s);
  // xoshiro requires a nonzero state; unreachable in practice.
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // u1 in (0, 1] so the log is finite.
  const double u1 = ((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

std::uint64_t RngStream::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound is zero");
  const std::uint64_t threshold = (0ULL - bound) % bound;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % bound;
  }
}

Vector draw_normal(RngStream& rng, Index count) {
  if (count < 0) throw std::invalid_argument("draw_normal: negative count");
  Vector out(count);
  for (Index i = 0; i < count; ++i) out[i] = rng.normal();
  return out;
}

Vector draw_uniform(RngStream& rng, double lo, double hi, Index count) {
  if (count < 0) throw std::invalid_argument("draw_uniform: negative count");
  if (!(lo <= hi)) throw std::invalid_argument("draw_uniform: lo > hi");
  Vector out(count);
  for (Index i = 0; i < count; ++i) out[i] = lo + (hi - lo) * rng.uniform01();
  return out;
}

std::vector<Index> draw_indices_without_replacement(RngStream& rng, Index m,
                                                    Index n) {
  if (m < 0 || n < 0 || m > n) {
    throw std::invalid_argument("draw_indices_without_replacement: invalid sample size m=" +
                                std::to_string(m) + ", n=" + std::to_string(n));
  }
  std::vector<Index> pool(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  // Partial Fisher-Yates: the first m slots become the sample.
  for (Index i = 0; i < m; ++i) {
    const Index j = i + static_cast<Index>(rng.uniform_below(
                            static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(m));
  std::sort(pool.begin(), pool.end());
  return pool;
}

SvdResult svd(const Eigen::Ref<const Matrix>& a) {
  if (a.rows() < 1 || a.cols() < 1) {
    throw std::invalid_argument("svd: empty matrix " + shape_str(a.rows(), a.cols()));
  }
  require_finite(a, "svd: input");
  Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) {
    throw std::runtime_error("svd: failed to converge on " +
                             shape_str(a.rows(), a.cols()) + " matrix");
  }
  return SvdResult{dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

Matrix pinv(const Eigen::Ref<const Matrix>& a, double tol_factor) {
  const SvdResult dec = svd(a);
  const double smax = dec.singular_values.size() > 0 ? dec.singular_values[0] : 0.0;
  const double cut =
      tol_factor * smax * static_cast<double>(std::max(a.rows(), a.cols()));
  Vector inv = Vector::Zero(dec.singular_values.size());
  for (Index i = 0; i < dec.singular_values.size(); ++i) {
    if (dec.singular_values[i] > cut && dec.singular_values[i] > 0.0) {
      inv[i] = 1.0 / dec.singular_values[i];
    }
  }
  return dec.v * inv.asDiagonal() * dec.u.transpose();
}

Vector min_norm_lstsq(const Eigen::Ref<const Matrix>& x,
                      const Eigen::Ref<const Vector>& y) {
  if (x.rows() != y.size()) {
    throw std::invalid_argument("min_norm_lstsq: x is " + shape_str(x.rows(), x.cols()) +
                                " but y has length " + std::to_string(y.size()));
  }
  require_finite(y, "min_norm_lstsq: y");
  const SvdResult dec = svd(x);
  const double smax = dec.singular_values.size() > 0 ? dec.singular_values[0] : 0.0;
  const double cut =
      1e-12 * smax * static_cast<double>(std::max(x.rows(), x.cols()));
  const Vector uty = dec.u.transpose() * y;
  Vector scaled = Vector::Zero(uty.size());
  for (Index i = 0; i < uty.size(); ++i) {
    if (dec.singular_values[i] > cut && dec.singular_values[i] > 0.0) {
      scaled[i] = uty[i] / dec.singular_values[i];
    }
  }
  return dec.v * scaled;
}

Vector weighted_min_norm_lstsq(const Eigen::Ref<const Matrix>& x,
                               const Eigen::Ref<const Vector>& y,
                               const Eigen::Ref<const Vector>& w) {
  if (x.rows() != y.size() || x.rows() != w.size()) {
    throw std::invalid_argument(
        "weighted_min_norm_lstsq: x is " + shape_str(x.rows(), x.cols()) +
        " but y has length " + std::to_string(y.size()) + " and w has length " +
        std::to_string(w.size()));
  }
  if ((w.array() < 0.0).any()) {
    throw std::invalid_argument("weighted_min_norm_lstsq: negative weight");
  }
  const double total = w.sum();
  if (!(total > 0.0)) {
    throw std::invalid_argument("weighted_min_norm_lstsq: degenerate all-zero weights");
  }
  const Vector sw = (w / total).cwiseSqrt();
  const Matrix xw = sw.asDiagonal() * x;
  const Vector yw = sw.cwiseProduct(y);
  return min_norm_lstsq(xw, yw);
}

}  // namespace ddlab
