// Acceptance checks for the double-descent lab: each criterion prints one
// [PASS]/[FAIL] line with the measured quantities; the exit code is the
// number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ddlab/csv.hpp"
#include "ddlab/datagen.hpp"
#include "ddlab/estimators.hpp"
#include "ddlab/harness.hpp"
#include "ddlab/losses.hpp"
#include "ddlab/numkit.hpp"

using namespace ddlab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what,
            const std::string& detail, double elapsed, double budget) {
  if (elapsed > budget) pass = false;
  if (!pass) ++g_failures;
  std::printf("[%s] criterion %2d: %s (%s; %.1fs of %.0fs budget)\n",
              pass ? "PASS" : "FAIL", criterion, what.c_str(), detail.c_str(),
              elapsed, budget);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

int worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 2;
  return int(std::min(hw, 8u));
}

Matrix random_matrix(RngStream& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

double sample_var(const Vector& v) {
  double m = v.mean();
  return (v.array() - m).square().sum() / double(v.size() - 1);
}

// ---------------------------------------------------------------- criterion 1

void criterion_penrose() {
  auto start = Clock::now();
  RngStream rng(20240801, 1);
  double worst = 0.0;
  struct Shape {
    Index rows, cols;
  };
  const Shape shapes[] = {{50, 200}, {200, 50}, {50, 50}};
  for (int trial = 0; trial < 100; ++trial) {
    const Shape sh = shapes[trial % 3];
    Matrix a = random_matrix(rng, sh.rows, sh.cols);
    Matrix p = pinv(a);
    auto rel = [](const Matrix& got, const Matrix& want) {
      return (got - want).norm() / std::max(1.0, want.norm());
    };
    Matrix ap = a * p;
    Matrix pa = p * a;
    worst = std::max({worst, rel(a * p * a, a), rel(p * a * p, p),
                      rel(ap.transpose(), ap), rel(pa.transpose(), pa)});
  }
  report(1, worst < 1e-8, "pseudo-inverse satisfies all four Penrose conditions",
         "100 trials over 50x200 / 200x50 / 50x50, max rel err " + fmt(worst),
         seconds_since(start), 10.0);
}

// ------------------------------------------------------- scenarios for 2-5,10

const std::vector<Index> kDeskGrid{5,  10,  20,  30,  40,   50,
                                   60, 100, 200, 500, 1000, 2000};

Scenario clean_min_l2_scenario() {
  Scenario s;
  s.name = "desk-minl2-clean";
  s.p_grid = kDeskGrid;
  s.replications = 50;
  s.master_seed = 42;
  return s;  // defaults: independent, mu 0, gaussian beta, snr 5, min_l2
}

Scenario contaminated_min_l2_scenario() {
  Scenario s = clean_min_l2_scenario();
  s.name = "desk-minl2-ycont";
  s.contamination.kind = ContaminationKind::y_additive;
  s.contamination.fraction = 0.5;
  s.contamination.magnitude = 100.0;
  return s;
}

Scenario clean_huber_scenario() {
  Scenario s = clean_min_l2_scenario();
  s.name = "desk-huber-clean";
  s.estimator.kind = EstimatorKind::huber_gd;
  s.replications = 30;
  return s;
}

double mean_mse_at(const ScenarioResult& res, Index p) {
  for (const CurveSummary& c : res.summaries)
    if (c.p == p) return c.mean_test_mse;
  return std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------- criterion 2

void criterion_interpolation(const Scenario& clean, const ScenarioResult& clean_res,
                             const Scenario& cont, const ScenarioResult& cont_res) {
  auto start = Clock::now();
  long checked = 0, ok = 0;
  double worst_ratio = 0.0;
  auto scan = [&](const Scenario& s, const ScenarioResult& res) {
    for (const SweepRecord& r : res.records) {
      if (r.p < s.n_train || r.failed) continue;
      Dataset d = replication_dataset(s, r.p, r.replication);
      double bound = 1e-10 * sample_var(d.y_train);
      ++checked;
      if (r.train_mse <= bound) ++ok;
      worst_ratio = std::max(worst_ratio, r.train_mse / std::max(bound, 1e-300));
    }
  };
  scan(clean, clean_res);
  scan(cont, cont_res);
  report(2, checked > 0 && ok == checked,
         "min_l2 training error vanishes for every p >= n_train",
         std::to_string(ok) + "/" + std::to_string(checked) +
             " cells under 1e-10*Var(y_train), worst mse/bound " + fmt(worst_ratio),
         seconds_since(start), 60.0);
}

// ---------------------------------------------------------------- criterion 3

void criterion_clean_double_descent(const ScenarioResult& res, double run_secs) {
  auto start = Clock::now();
  Index argmin_small = -1, argmax = -1;
  double best_small = std::numeric_limits<double>::infinity();
  double peak = -std::numeric_limits<double>::infinity();
  for (const CurveSummary& c : res.summaries) {
    if (c.p < 50 && c.mean_test_mse < best_small) {
      best_small = c.mean_test_mse;
      argmin_small = c.p;
    }
    if (c.mean_test_mse > peak) {
      peak = c.mean_test_mse;
      argmax = c.p;
    }
  }
  double tail = mean_mse_at(res, 2000);
  double at50 = mean_mse_at(res, 50);
  bool pass = argmin_small == 20 && argmax == 50 && tail < at50 / 10.0;
  report(3, pass, "clean-data min_l2 curve shows the double descent",
         "argmin(p<50) = " + std::to_string(argmin_small) +
             ", argmax = " + std::to_string(argmax) + ", mse(50) = " + fmt(at50) +
             ", mse(2000) = " + fmt(tail),
         run_secs + seconds_since(start), 300.0);
}

// ---------------------------------------------------------------- criterion 4

void criterion_contaminated_descent(const ScenarioResult& cont,
                                    const ScenarioResult& clean, double run_secs) {
  auto start = Clock::now();
  std::vector<double> tail_mse;
  for (const CurveSummary& c : cont.summaries)
    if (c.p >= 60) tail_mse.push_back(c.mean_test_mse);
  int increases = 0;
  double worst_increase = 0.0;
  for (std::size_t i = 1; i < tail_mse.size(); ++i) {
    if (tail_mse[i] > tail_mse[i - 1]) {
      ++increases;
      worst_increase = std::max(worst_increase, tail_mse[i] / tail_mse[i - 1] - 1.0);
    }
  }
  double dirty_tail = mean_mse_at(cont, 2000);
  double clean_tail = mean_mse_at(clean, 2000);
  bool monotone_ok = increases <= 1 && worst_increase <= 0.05;
  bool tail_ok = dirty_tail <= 3.0 * clean_tail;
  report(4, monotone_ok && tail_ok,
         "response-contaminated min_l2 curve decays toward the clean level",
         std::to_string(increases) + " increase(s) past p=60, worst +" +
             fmt(100.0 * worst_increase) + "%, mse(2000) dirty/clean = " +
             fmt(dirty_tail) + "/" + fmt(clean_tail) + " (limit 3x)",
         run_secs + seconds_since(start), 300.0);
}

// ---------------------------------------------------------------- criterion 5

void criterion_huber_curve(const ScenarioResult& huber,
                           const ScenarioResult& minl2, double run_secs) {
  auto start = Clock::now();
  Index argmax = -1;
  double peak = -std::numeric_limits<double>::infinity();
  for (const CurveSummary& c : huber.summaries) {
    if (c.mean_test_mse > peak) {
      peak = c.mean_test_mse;
      argmax = c.p;
    }
  }
  double tail = mean_mse_at(huber, 2000);
  double minl2_peak = mean_mse_at(minl2, 50);
  bool peak_ok = argmax == 40 || argmax == 50 || argmax == 60 || argmax == 100;
  bool pass = peak_ok && tail < peak / 5.0 && peak < minl2_peak;
  report(5, pass, "huber gradient descent blunts the interpolation peak",
         "peak " + fmt(peak) + " at p=" + std::to_string(argmax) + ", mse(2000) = " +
             fmt(tail) + ", min_l2 peak " + fmt(minl2_peak),
         run_secs + seconds_since(start), 600.0);
}

// ---------------------------------------------------------------- criterion 6

void criterion_gradients() {
  auto start = Clock::now();
  const double points[] = {-10.0, -3.0, -1.0, -0.1, 0.1, 1.0, 3.0, 10.0};
  double worst_psi = 0.0;
  for (auto loss : {LossSpec::huber(), LossSpec::tukey()}) {
    for (double r : points) {
      const double h = 1e-6;
      double fd = (rho(loss, r + h) - rho(loss, r - h)) / (2.0 * h);
      double scale = std::max(1e-3, std::abs(fd));
      worst_psi = std::max(worst_psi, std::abs(psi(loss, r) - fd) / scale);
    }
  }

  RngStream rng(606, 0);
  double worst_grad = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const Index n = 10 + Index(rng.uniform_below(8));
    const Index p = 2 + Index(rng.uniform_below(5));
    Matrix x = random_matrix(rng, n, p);
    Vector y = draw_normal(rng, n) * 2.0;
    Vector beta = draw_normal(rng, p);
    LossSpec loss = (inst % 3 == 0)   ? LossSpec::squared()
                    : (inst % 3 == 1) ? LossSpec::huber()
                                      : LossSpec::tukey();
    auto [val, grad] = objective_and_gradient(loss, x, y, beta);
    (void)val;
    const double h = 1e-6;
    for (Index j = 0; j < p; ++j) {
      Vector bp = beta, bm = beta;
      bp(j) += h;
      bm(j) -= h;
      double fd = (objective_value(loss, x, y, bp) -
                   objective_value(loss, x, y, bm)) /
                  (2.0 * h);
      double scale = std::max(1e-4, std::abs(fd));
      worst_grad = std::max(worst_grad, std::abs(grad(j) - fd) / scale);
    }
  }
  report(6, worst_psi < 1e-6 && worst_grad < 1e-5,
         "analytic derivatives match central differences",
         "psi worst rel err " + fmt(worst_psi) + ", gradient worst rel err " +
             fmt(worst_grad),
         seconds_since(start), 5.0);
}

// ---------------------------------------------------------------- criterion 7

void criterion_cstep_and_oracle() {
  auto start = Clock::now();
  const SubsetFitter ls = [](const Matrix& xs, const Vector& ys) {
    return min_norm_lstsq(xs, ys);
  };

  RngStream rng(707, 0);
  bool monotone = true;
  long steps_checked = 0;
  for (int inst = 0; inst < 200 && monotone; ++inst) {
    const Index n = 12 + Index(rng.uniform_below(12));
    const Index p = 1 + Index(rng.uniform_below(4));
    Matrix x = random_matrix(rng, n, p);
    Vector y = draw_normal(rng, n) * 3.0;
    const Index h = n / 2 + 1;
    std::vector<Index> subset = draw_indices_without_replacement(rng, h, n);
    double prev = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 40; ++t) {
      CstepResult step = cstep(x, y, subset, ls);
      ++steps_checked;
      if (step.trimmed_sse > prev * (1.0 + 1e-12) + 1e-12) {
        monotone = false;
        break;
      }
      if (step.subset == subset) break;
      prev = step.trimmed_sse;
      subset = step.subset;
    }
  }

  // Tiny-instance oracle: every 5-of-8 subset enumerated directly.
  int matched = 0;
  const int oracle_runs = 50;
  for (int inst = 0; inst < oracle_runs; ++inst) {
    Vector x1 = draw_normal(rng, 8);
    Vector y = 2.0 * x1 + 0.3 * draw_normal(rng, 8);
    y(Index(rng.uniform_below(8))) += 50.0;
    Matrix x(8, 1);
    x.col(0) = x1;

    double best = std::numeric_limits<double>::infinity();
    std::vector<Index> best_subset;
    std::vector<Index> idx{0, 1, 2, 3, 4};
    while (true) {
      double sxx = 0.0, sxy = 0.0;
      for (Index i : idx) {
        sxx += x1(i) * x1(i);
        sxy += x1(i) * y(i);
      }
      double b = sxx > 0.0 ? sxy / sxx : 0.0;
      double sse = 0.0;
      for (Index i : idx) {
        double r = y(i) - b * x1(i);
        sse += r * r;
      }
      if (sse < best) {
        best = sse;
        best_subset = idx;
      }
      Index i = 4;
      while (i >= 0 && idx[std::size_t(i)] == 8 - 5 + i) --i;
      if (i < 0) break;
      ++idx[std::size_t(i)];
      for (Index j = i + 1; j < 5; ++j)
        idx[std::size_t(j)] = idx[std::size_t(j - 1)] + 1;
    }

    LtsConfig cfg;
    cfg.alpha = 0.625;  // h = floor(0.625 * 8) = 5
    cfg.lambda_frac = 0.0;
    cfg.n_starts = 56;
    cfg.n_keep = 10;
    cfg.seed = 900 + std::uint64_t(inst);
    FitResult fr = fit_slts(x, y, cfg);
    double got_sse = fr.objective * 5.0;  // objective is SSE/h with zero penalty
    if (fr.clean_subset.has_value() && *fr.clean_subset == best_subset &&
        std::abs(got_sse - best) <= 1e-9 * std::max(1.0, best)) {
      ++matched;
    }
  }
  report(7, monotone && matched == oracle_runs,
         "concentration steps are monotone and find the exhaustive optimum",
         "monotone over " + std::to_string(steps_checked) + " steps, oracle match " +
             std::to_string(matched) + "/" + std::to_string(oracle_runs),
         seconds_since(start), 30.0);
}

// ---------------------------------------------------------------- criterion 8

void criterion_breakdown() {
  auto start = Clock::now();
  DataSpec spec;
  spec.n_train = 20;
  spec.n_test = 10;
  spec.p = 1;
  spec.snr = 5.0;
  RngStream rng(42, 0);
  Dataset base = generate_dataset(rng, spec);
  const std::vector<double> mags{1e2, 1e3, 1e4, 1e5, 1e6};

  EstimatorSpec minl2;
  auto frail = breakdown_probe(minl2, base, mags);
  bool grows = true;
  for (std::size_t i = 1; i < frail.size(); ++i)
    if (frail[i].coef_norm <= frail[i - 1].coef_norm) grows = false;
  double growth = frail.back().coef_norm / frail.front().coef_norm;

  EstimatorSpec robust;
  robust.kind = EstimatorKind::slts;
  auto stable = breakdown_probe(robust, base, mags);
  double lo = stable[0].coef_norm, hi = stable[0].coef_norm;
  for (const auto& pt : stable) {
    lo = std::min(lo, pt.coef_norm);
    hi = std::max(hi, pt.coef_norm);
  }
  double variation = (hi - lo) / lo;

  report(8, grows && growth >= 1e3 && variation < 0.10,
         "one response breaks min_l2 but not the trimmed fit",
         "min_l2 norm x" + fmt(growth) + " across magnitudes, trimmed variation " +
             fmt(100.0 * variation) + "%",
         seconds_since(start), 10.0);
}

// ---------------------------------------------------------------- criterion 9

void criterion_subset_exclusion() {
  auto start = Clock::now();
  DataSpec spec;
  spec.n_train = 50;
  spec.n_test = 10;
  spec.p = 10;
  spec.snr = 5.0;
  spec.contamination.kind = ContaminationKind::y_additive;
  spec.contamination.fraction = 0.25;
  spec.contamination.magnitude = 100.0;

  int clean_runs = 0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    RngStream rng(std::uint64_t(s) + 1, 9);
    Dataset d = generate_dataset(rng, spec);
    LtsConfig cfg;
    cfg.seed = rng.next_u64();
    FitResult fr = fit_subset_interpolator(d.x_train, d.y_train, cfg);
    std::set<Index> bad(d.contaminated_rows.begin(), d.contaminated_rows.end());
    bool clean = fr.clean_subset.has_value();
    if (clean)
      for (Index i : *fr.clean_subset)
        if (bad.count(i)) clean = false;
    if (clean) ++clean_runs;
  }
  report(9, clean_runs >= 95,
         "the subset interpolator excludes contaminated rows",
         std::to_string(clean_runs) + "/" + std::to_string(seeds) +
             " seeds with a fully clean subset (need >= 95)",
         seconds_since(start), 60.0);
}

// --------------------------------------------------------------- criterion 10

void criterion_determinism(const Scenario& scenario) {
  auto start = Clock::now();
  ScenarioResult one = run_scenario(scenario, 1);
  ScenarioResult eight = run_scenario(scenario, 8);
  auto dir = std::filesystem::temp_directory_path() / "ddlab_acceptance";
  std::filesystem::create_directories(dir);
  write_summary_csv(one.summaries, dir / "summary_w1.csv");
  write_summary_csv(eight.summaries, dir / "summary_w8.csv");
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
  };
  std::string a = slurp(dir / "summary_w1.csv");
  std::string b = slurp(dir / "summary_w8.csv");
  report(10, !a.empty() && a == b,
         "worker count never changes the summary bytes",
         std::to_string(a.size()) + " bytes, 1 vs 8 workers " +
             (a == b ? "identical" : "DIFFER"),
         seconds_since(start), 600.0);
}

}  // namespace

int main() {
  std::printf("acceptance: %d worker thread(s) for scenario sweeps\n", worker_count());

  criterion_penrose();

  const Scenario clean = clean_min_l2_scenario();
  const Scenario cont = contaminated_min_l2_scenario();
  const Scenario hub = clean_huber_scenario();

  auto t_clean = Clock::now();
  ScenarioResult clean_res = run_scenario(clean, worker_count());
  double clean_secs = seconds_since(t_clean);

  auto t_cont = Clock::now();
  ScenarioResult cont_res = run_scenario(cont, worker_count());
  double cont_secs = seconds_since(t_cont);

  auto t_hub = Clock::now();
  ScenarioResult hub_res = run_scenario(hub, worker_count());
  double hub_secs = seconds_since(t_hub);

  criterion_interpolation(clean, clean_res, cont, cont_res);
  criterion_clean_double_descent(clean_res, clean_secs);
  criterion_contaminated_descent(cont_res, clean_res, cont_secs);
  criterion_huber_curve(hub_res, clean_res, hub_secs);
  criterion_gradients();
  criterion_cstep_and_oracle();
  criterion_breakdown();
  criterion_subset_exclusion();
  criterion_determinism(clean);

  if (g_failures == 0)
    std::printf("acceptance: all criteria passed\n");
  else
    std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  return g_failures;
}
