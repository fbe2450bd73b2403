#include "ddlab/losses.hpp"

#include <stdexcept>
#include <string>

namespace ddlab {

namespace {

void check_shapes(const Eigen::Ref<const Matrix>& x,
                  const Eigen::Ref<const Vector>& y,
                  const Eigen::Ref<const Vector>& beta) {
  if (x.rows() != y.size() || x.cols() != beta.size()) {
    throw std::invalid_argument(
        "loss objective: x is " + std::to_string(x.rows()) + "x" +
        std::to_string(x.cols()) + " but y has length " + std::to_string(y.size()) +
        " and beta has length " + std::to_string(beta.size()));
  }
  if (x.rows() < 1) throw std::invalid_argument("loss objective: empty sample");
}

}  // namespace

LossSpec LossSpec::huber(double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("huber: delta must be positive");
  return {LossKind::huber, delta};
}

LossSpec LossSpec::tukey(double k) {
  if (!(k > 0.0)) throw std::invalid_argument("tukey: k must be positive");
  return {LossKind::tukey, k};
}

double objective_value(const LossSpec& spec, const Eigen::Ref<const Matrix>& x,
                       const Eigen::Ref<const Vector>& y,
                       const Eigen::Ref<const Vector>& beta) {
  check_shapes(x, y, beta);
  const Vector r = y - x * beta;
  double total = 0.0;
  for (Index i = 0; i < r.size(); ++i) total += rho(spec, r[i]);
  return total / static_cast<double>(r.size());
}

std::pair<double, Vector> objective_and_gradient(
    const LossSpec& spec, const Eigen::Ref<const Matrix>& x,
    const Eigen::Ref<const Vector>& y, const Eigen::Ref<const Vector>& beta) {
  check_shapes(x, y, beta);
  const Vector r = y - x * beta;
  const double n = static_cast<double>(r.size());
  double total = 0.0;
  Vector psi_r(r.size());
  for (Index i = 0; i < r.size(); ++i) {
    total += rho(spec, r[i]);
    psi_r[i] = psi(spec, r[i]);
  }
  Vector grad = -(x.transpose() * psi_r) / n;
  return {total / n, std::move(grad)};
}

}  // namespace ddlab
