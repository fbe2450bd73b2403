#pragma once

#include <vector>

#include "ddlab/numkit.hpp"

namespace ddlab {

enum class DesignKind { independent, spiked };

struct DesignSpec {
  DesignKind kind = DesignKind::independent;
  double mu = 0.0;
  double rho = 0.25;  // spike strength; covariance I + rho * 1 1^T

  bool operator==(const DesignSpec&) const = default;
};

enum class BetaLaw { gaussian, uniform };

struct BetaSpec {
  BetaLaw law = BetaLaw::gaussian;
  Index support_size = 20;  // s: number of active coefficients

  bool operator==(const BetaSpec&) const = default;
};

enum class ContaminationKind { none, y_additive, x_rowwise };

struct ContaminationSpec {
  ContaminationKind kind = ContaminationKind::none;
  double fraction = 0.1;    // r: floor(r * n_train) rows are hit
  double magnitude = 100.0; // c_out, added to the targeted entries

  bool operator==(const ContaminationSpec&) const = default;
};

struct Dataset {
  Matrix x_train;
  Matrix x_test;
  Vector y_train;
  Vector y_test;
  Vector beta_true;  // length p; for p < s this is the retained sub-vector
  double sigma = 0.0;
  std::vector<Index> contaminated_rows;  // training-row indices, ascending
  Index cells_per_row = 0;  // x_rowwise only; clamped up to 1 when p < 10
};

struct DataSpec {
  Index n_train = 50;
  Index n_test = 50;
  Index p = 1;
  DesignSpec design;
  BetaSpec beta;
  ContaminationSpec contamination;
  double snr = 5.0;
};

/// n x p design with i.i.d. N(mu 1, Sigma) rows; Sigma = I for independent,
/// I + rho 1 1^T for spiked (row = mu + z + sqrt(rho) g 1). Entries are drawn
/// row by row so regeneration is reproducible.
Matrix sample_design(RngStream& rng, Index n, Index p, const DesignSpec& spec);

/// Length-p coefficient vector. For p > s, the s active positions are a
/// uniform subset and the rest are exact zeros; for p <= s all entries are
/// active. Active entries are N(0,1) or U([1,2]) by law.
Vector sample_beta(RngStream& rng, Index p, const BetaSpec& spec);

/// sigma with SampleVar(signal) / sigma^2 = snr, sample variance using 1/(n-1).
double calibrate_noise(const Eigen::Ref<const Vector>& signal, double snr);

/// Applies contamination to the training part only. y_additive adds magnitude
/// to floor(fraction * n_train) responses; x_rowwise adds it to
/// max(1, floor(0.1 p)) cells in each affected row, columns drawn per row.
/// fraction * n_train < 1 leaves the data unchanged.
Dataset contaminate(RngStream& rng, Dataset data, const ContaminationSpec& spec);

/// Full pipeline: design, sparse beta, SNR-calibrated noise on the pooled
/// train+test signal, split, then train-only contamination. For p < s the
/// responses come from the full s-column model and a uniform subset of p
/// columns is retained (deliberate misspecification).
Dataset generate_dataset(RngStream& rng, const DataSpec& spec);

}  // namespace ddlab
