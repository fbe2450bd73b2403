#pragma once

#include <string>
#include <vector>

#include "ddlab/datagen.hpp"
#include "ddlab/estimators.hpp"

namespace ddlab {

/// The standard dimension sweep.
std::vector<Index> default_p_grid();

struct Scenario {
  std::string name = "scenario";
  DesignSpec design;
  BetaSpec beta;
  ContaminationSpec contamination;  // kind none means clean data
  Index n_train = 50;
  Index n_test = 50;
  double snr = 5.0;
  EstimatorSpec estimator;
  std::vector<Index> p_grid = default_p_grid();
  int replications = 500;
  std::uint64_t master_seed = 42;

  bool operator==(const Scenario&) const = default;
};

struct SweepRecord {
  std::string scenario;
  Index p = 0;
  int replication = 0;
  double test_mse = 0.0;
  double train_mse = 0.0;
  double l1_diff = 0.0;
  double l1_diff_per_n = 0.0;
  double l2_diff = 0.0;
  double linf_diff = 0.0;
  int iterations = 0;
  bool converged = false;
  double runtime_ms = 0.0;  // wall clock; in-memory only, never serialized
  bool failed = false;
  std::string error;
};

struct CurveSummary {
  std::string scenario;
  Index p = 0;
  int n_records = 0;  // attempted replications
  int n_failed = 0;   // excluded from the means below
  double mean_test_mse = 0.0, se_test_mse = 0.0;
  double mean_train_mse = 0.0, se_train_mse = 0.0;
  double mean_l1_diff = 0.0, se_l1_diff = 0.0;
  double mean_l1_diff_per_n = 0.0, se_l1_diff_per_n = 0.0;
  double mean_l2_diff = 0.0, se_l2_diff = 0.0;
  double mean_linf_diff = 0.0, se_linf_diff = 0.0;
  double mean_iterations = 0.0, se_iterations = 0.0;
  double converged_rate = 0.0;
  double mean_runtime_ms = 0.0;  // in-memory only, never serialized
};

/// Replication stream: seed is the master seed, the stream id hashes
/// (scenario name, p, replication), so adding scenarios or grid points never
/// perturbs existing cells.
RngStream replication_stream(const Scenario& scenario, Index p, int replication);

/// Dataset for one cell, exactly as run_replication generates it.
Dataset replication_dataset(const Scenario& scenario, Index p, int replication);

/// Metric assembly from a finished fit (exposed for testing).
SweepRecord make_record(const Scenario& scenario, Index p, int replication,
                        const Dataset& data, const FitResult& fit);

/// Generates the cell's dataset, fits the configured estimator, and returns
/// the metric record. Estimator exceptions become a failed record.
SweepRecord run_replication(const Scenario& scenario, Index p, int replication);

struct ScenarioResult {
  std::vector<SweepRecord> records;     // p-major, replication-minor order
  std::vector<CurveSummary> summaries;  // one per grid point
};

/// Runs every (p, replication) cell, optionally across worker threads.
/// Output is identical for every worker count.
ScenarioResult run_scenario(const Scenario& scenario, int workers = 1);

struct BreakdownPoint {
  double magnitude = 0.0;
  double coef_norm = 0.0;
};

/// Contaminates the single highest-leverage training response by each
/// magnitude in turn (the empirical worst case with m = 1), refits, and
/// records ||beta_hat||_2. The base dataset must be clean and the magnitudes
/// non-decreasing.
std::vector<BreakdownPoint> breakdown_probe(const EstimatorSpec& estimator,
                                            const Dataset& base,
                                            const std::vector<double>& magnitudes);

}  // namespace ddlab
