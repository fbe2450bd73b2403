#include "ddlab/datagen.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ddlab {

Matrix sample_design(RngStream& rng, Index n, Index p, const DesignSpec& spec) {
  if (n < 1 || p < 1) {
    throw std::invalid_argument("sample_design: need n >= 1 and p >= 1, got n=" +
                                std::to_string(n) + ", p=" + std::to_string(p));
  }
  if (spec.rho < 0.0) throw std::invalid_argument("sample_design: rho must be >= 0");
  const bool spiked = spec.kind == DesignKind::spiked && spec.rho > 0.0;
  const double sqrt_rho = spiked ? std::sqrt(spec.rho) : 0.0;
  Matrix x(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) x(i, j) = spec.mu + rng.normal();
    if (spiked) x.row(i).array() += sqrt_rho * rng.normal();
  }
  return x;
}

Vector sample_beta(RngStream& rng, Index p, const BetaSpec& spec) {
  if (p < 1) throw std::invalid_argument("sample_beta: need p >= 1");
  if (spec.support_size < 1) {
    throw std::invalid_argument("sample_beta: support_size must be >= 1");
  }
  const Index active = std::min(p, spec.support_size);
  Vector values(active);
  for (Index i = 0; i < active; ++i) {
    values[i] = spec.law == BetaLaw::gaussian ? rng.normal()
                                              : 1.0 + rng.uniform01();
  }
  if (active == p) return values;
  Vector beta = Vector::Zero(p);
  const std::vector<Index> support =
      draw_indices_without_replacement(rng, active, p);
  for (Index i = 0; i < active; ++i) beta[support[static_cast<std::size_t>(i)]] = values[i];
  return beta;
}

double calibrate_noise(const Eigen::Ref<const Vector>& signal, double snr) {
  if (signal.size() < 2) {
    throw std::invalid_argument("calibrate_noise: need at least 2 signal values");
  }
  if (!(snr > 0.0)) throw std::invalid_argument("calibrate_noise: snr must be positive");
  const double mean = signal.mean();
  const double var = (signal.array() - mean).square().sum() /
                     static_cast<double>(signal.size() - 1);
  if (!(var > 0.0)) {
    throw std::invalid_argument("calibrate_noise: signal has zero sample variance");
  }
  return std::sqrt(var / snr);
}

Dataset contaminate(RngStream& rng, Dataset data, const ContaminationSpec& spec) {
  if (spec.kind == ContaminationKind::none) {
    throw std::invalid_argument("contaminate: kind is none");
  }
  if (spec.fraction < 0.0 || spec.fraction >= 1.0) {
    throw std::invalid_argument("contaminate: fraction must lie in [0, 1)");
  }
  const Index n = data.x_train.rows();
  const Index p = data.x_train.cols();
  const Index hit = static_cast<Index>(
      std::floor(spec.fraction * static_cast<double>(n)));
  if (hit < 1) {
    data.contaminated_rows.clear();
    return data;
  }
  data.contaminated_rows = draw_indices_without_replacement(rng, hit, n);
  if (spec.kind == ContaminationKind::y_additive) {
    for (Index row : data.contaminated_rows) data.y_train[row] += spec.magnitude;
    return data;
  }
  // x_rowwise: floor(0.1 p) cells per row, clamped up to one cell for p < 10.
  const Index cells = std::max<Index>(
      1, static_cast<Index>(std::floor(0.1 * static_cast<double>(p))));
  data.cells_per_row = cells;
  for (Index row : data.contaminated_rows) {
    const std::vector<Index> cols = draw_indices_without_replacement(rng, cells, p);
    for (Index col : cols) data.x_train(row, col) += spec.magnitude;
  }
  return data;
}

Dataset generate_dataset(RngStream& rng, const DataSpec& spec) {
  if (spec.n_train < 2 || spec.n_test < 1) {
    throw std::invalid_argument("generate_dataset: need n_train >= 2 and n_test >= 1");
  }
  if (spec.p < 1) throw std::invalid_argument("generate_dataset: need p >= 1");
  const Index n = spec.n_train + spec.n_test;
  const Index p_model = std::max(spec.p, spec.beta.support_size);
  Matrix x = sample_design(rng, n, p_model, spec.design);
  Vector beta = sample_beta(rng, p_model, spec.beta);
  const Vector signal = x * beta;
  const double sigma = calibrate_noise(signal, spec.snr);
  Vector y = signal + sigma * draw_normal(rng, n);
  if (spec.p < p_model) {
    const std::vector<Index> keep =
        draw_indices_without_replacement(rng, spec.p, p_model);
    x = x(Eigen::all, keep).eval();
    beta = beta(keep).eval();
  }
  Dataset data;
  data.x_train = x.topRows(spec.n_train);
  data.x_test = x.bottomRows(spec.n_test);
  data.y_train = y.head(spec.n_train);
  data.y_test = y.tail(spec.n_test);
  data.beta_true = beta;
  data.sigma = sigma;
  if (spec.contamination.kind != ContaminationKind::none) {
    data = contaminate(rng, std::move(data), spec.contamination);
  }
  return data;
}

}  // namespace ddlab
