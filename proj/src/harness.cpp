#include "ddlab/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <thread>

namespace ddlab {

namespace {

std::uint64_t fnv1a_bytes(const void* data, std::size_t len, std::uint64_t h) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

DataSpec cell_dataspec(const Scenario& scenario, Index p) {
  DataSpec spec;
  spec.n_train = scenario.n_train;
  spec.n_test = scenario.n_test;
  spec.p = p;
  spec.design = scenario.design;
  spec.beta = scenario.beta;
  spec.contamination = scenario.contamination;
  spec.snr = scenario.snr;
  return spec;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& values) {
  MeanSe out;
  const std::size_t m = values.size();
  if (m == 0) return out;
  double total = 0.0;
  for (double v : values) total += v;
  out.mean = total / static_cast<double>(m);
  if (m > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(m - 1) / static_cast<double>(m));
  }
  return out;
}

CurveSummary summarize(const std::string& name, Index p,
                       const SweepRecord* records, int count) {
  CurveSummary s;
  s.scenario = name;
  s.p = p;
  s.n_records = count;
  std::vector<double> test_mse, train_mse, l1, l1pn, l2, linf, iters, runtime;
  int converged = 0;
  for (int i = 0; i < count; ++i) {
    const SweepRecord& r = records[i];
    if (r.failed) {
      ++s.n_failed;
      continue;
    }
    test_mse.push_back(r.test_mse);
    train_mse.push_back(r.train_mse);
    l1.push_back(r.l1_diff);
    l1pn.push_back(r.l1_diff_per_n);
    l2.push_back(r.l2_diff);
    linf.push_back(r.linf_diff);
    iters.push_back(static_cast<double>(r.iterations));
    runtime.push_back(r.runtime_ms);
    if (r.converged) ++converged;
  }
  const MeanSe a = mean_se(test_mse);
  s.mean_test_mse = a.mean; s.se_test_mse = a.se;
  const MeanSe b = mean_se(train_mse);
  s.mean_train_mse = b.mean; s.se_train_mse = b.se;
  const MeanSe c = mean_se(l1);
  s.mean_l1_diff = c.mean; s.se_l1_diff = c.se;
  const MeanSe d = mean_se(l1pn);
  s.mean_l1_diff_per_n = d.mean; s.se_l1_diff_per_n = d.se;
  const MeanSe e = mean_se(l2);
  s.mean_l2_diff = e.mean; s.se_l2_diff = e.se;
  const MeanSe f = mean_se(linf);
  s.mean_linf_diff = f.mean; s.se_linf_diff = f.se;
  const MeanSe g = mean_se(iters);
  s.mean_iterations = g.mean; s.se_iterations = g.se;
  s.mean_runtime_ms = mean_se(runtime).mean;
  if (!test_mse.empty()) {
    s.converged_rate =
        static_cast<double>(converged) / static_cast<double>(test_mse.size());
  }
  return s;
}

}  // namespace

std::vector<Index> default_p_grid() {
  return {5,   10,  20,  30,  40,   50,   60,   80,   100,  150,  200,  250,
          300, 400, 500, 750, 1000, 1250, 1500, 1750, 2000, 3000, 4000, 5000};
}

RngStream replication_stream(const Scenario& scenario, Index p, int replication) {
  std::uint64_t h = 1469598103934665603ULL;
  h = fnv1a_bytes(scenario.name.data(), scenario.name.size(), h);
  const std::int64_t p64 = static_cast<std::int64_t>(p);
  h = fnv1a_bytes(&p64, sizeof(p64), h);
  const std::int64_t r64 = static_cast<std::int64_t>(replication);
  h = fnv1a_bytes(&r64, sizeof(r64), h);
  return RngStream(scenario.master_seed, h);
}

Dataset replication_dataset(const Scenario& scenario, Index p, int replication) {
  RngStream rng = replication_stream(scenario, p, replication);
  return generate_dataset(rng, cell_dataspec(scenario, p));
}

SweepRecord make_record(const Scenario& scenario, Index p, int replication,
                        const Dataset& data, const FitResult& fit) {
  SweepRecord rec;
  rec.scenario = scenario.name;
  rec.p = p;
  rec.replication = replication;
  rec.test_mse = (data.y_test - data.x_test * fit.beta_hat).squaredNorm() /
                 static_cast<double>(data.y_test.size());
  rec.train_mse = (data.y_train - data.x_train * fit.beta_hat).squaredNorm() /
                  static_cast<double>(data.y_train.size());
  const Vector diff = fit.beta_hat - data.beta_true;
  rec.l1_diff = diff.lpNorm<1>();
  rec.l1_diff_per_n = rec.l1_diff / static_cast<double>(data.y_train.size());
  rec.l2_diff = diff.norm();
  rec.linf_diff = diff.lpNorm<Eigen::Infinity>();
  rec.iterations = fit.iterations;
  rec.converged = fit.converged;
  return rec;
}

SweepRecord run_replication(const Scenario& scenario, Index p, int replication) {
  const auto t0 = std::chrono::steady_clock::now();
  SweepRecord rec;
  rec.scenario = scenario.name;
  rec.p = p;
  rec.replication = replication;
  try {
    RngStream rng = replication_stream(scenario, p, replication);
    const Dataset data = generate_dataset(rng, cell_dataspec(scenario, p));
    EstimatorSpec est = scenario.estimator;
    est.lts.seed = rng.next_u64();  // per-replication SLTS start sequence
    const FitResult result = fit(est, data.x_train, data.y_train);
    rec = make_record(scenario, p, replication, data, result);
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.error = e.what();
  } catch (...) {
    rec.failed = true;
    rec.error = "unknown error";
  }
  rec.runtime_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return rec;
}

ScenarioResult run_scenario(const Scenario& scenario, int workers) {
  if (scenario.replications < 1) {
    throw std::invalid_argument("run_scenario: replications < 1");
  }
  if (workers < 1) throw std::invalid_argument("run_scenario: workers < 1");
  if (scenario.p_grid.empty()) {
    throw std::invalid_argument("run_scenario: empty p grid");
  }
  for (std::size_t i = 0; i < scenario.p_grid.size(); ++i) {
    if (scenario.p_grid[i] < 1 ||
        (i > 0 && scenario.p_grid[i] <= scenario.p_grid[i - 1])) {
      throw std::invalid_argument("run_scenario: p grid must be positive and ascending");
    }
  }

  const std::size_t per_p = static_cast<std::size_t>(scenario.replications);
  const std::size_t cells = scenario.p_grid.size() * per_p;
  ScenarioResult out;
  out.records.resize(cells);
  // Cells are indexed p-major so the record layout is independent of
  // scheduling; each worker writes only its own slots.
  std::atomic<std::size_t> cursor{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= cells) return;
      const Index p = scenario.p_grid[i / per_p];
      const int rep = static_cast<int>(i % per_p);
      out.records[i] = run_replication(scenario, p, rep);
    }
  };
  const int n_threads = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(workers), cells));
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  out.summaries.reserve(scenario.p_grid.size());
  for (std::size_t ip = 0; ip < scenario.p_grid.size(); ++ip) {
    out.summaries.push_back(summarize(scenario.name, scenario.p_grid[ip],
                                      out.records.data() + ip * per_p,
                                      scenario.replications));
  }
  return out;
}

std::vector<BreakdownPoint> breakdown_probe(const EstimatorSpec& estimator,
                                            const Dataset& base,
                                            const std::vector<double>& magnitudes) {
  if (!base.contaminated_rows.empty()) {
    throw std::invalid_argument("breakdown_probe: base dataset is contaminated");
  }
  if (base.x_train.rows() < 1) {
    throw std::invalid_argument("breakdown_probe: empty training set");
  }
  for (std::size_t i = 1; i < magnitudes.size(); ++i) {
    if (magnitudes[i] < magnitudes[i - 1]) {
      throw std::invalid_argument("breakdown_probe: magnitudes must be ascending");
    }
  }
  Index row = 0;
  double best = -1.0;
  for (Index i = 0; i < base.x_train.rows(); ++i) {
    const double norm = base.x_train.row(i).norm();
    if (norm > best) {
      best = norm;
      row = i;
    }
  }
  std::vector<BreakdownPoint> out;
  out.reserve(magnitudes.size());
  for (double magnitude : magnitudes) {
    Vector y = base.y_train;
    y[row] += magnitude;
    const FitResult result = fit(estimator, base.x_train, y);
    out.push_back({magnitude, result.beta_hat.norm()});
  }
  return out;
}

}  // namespace ddlab
