#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ddlab/config.hpp"
#include "ddlab/csv.hpp"
#include "ddlab/harness.hpp"
#include "ddlab/svgplot.hpp"

namespace {

constexpr const char* kVersion = "ddlab 0.1.0";

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool uses_gradient_descent(ddlab::EstimatorKind kind) {
  return kind == ddlab::EstimatorKind::huber_gd ||
         kind == ddlab::EstimatorKind::tukey_gd;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            int workers, bool plots, const std::vector<std::string>& only) {
  std::vector<ddlab::Scenario> scenarios =
      ddlab::parse_config(read_file(config_path));
  if (const auto seed = ddlab::master_seed_from_env()) {
    for (ddlab::Scenario& s : scenarios) s.master_seed = *seed;
    std::cerr << "master seed overridden from DDLAB_MASTER_SEED: " << *seed << "\n";
  }
  if (!only.empty()) {
    std::vector<ddlab::Scenario> kept;
    for (const ddlab::Scenario& s : scenarios) {
      for (const std::string& name : only) {
        if (s.name == name) {
          kept.push_back(s);
          break;
        }
      }
    }
    if (kept.empty()) {
      throw std::runtime_error("--only matched no scenario in " + config_path);
    }
    scenarios = std::move(kept);
  }

  const std::filesystem::path out(out_dir);
  std::filesystem::create_directories(out);

  std::vector<ddlab::SweepRecord> records;
  std::vector<ddlab::CurveSummary> summaries;
  for (const ddlab::Scenario& s : scenarios) {
    const auto t0 = std::chrono::steady_clock::now();
    ddlab::ScenarioResult result = ddlab::run_scenario(s, workers);
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    int failed = 0;
    double mean_ms = 0.0;
    for (const ddlab::CurveSummary& c : result.summaries) {
      failed += c.n_failed;
      mean_ms += c.mean_runtime_ms;
    }
    mean_ms /= static_cast<double>(result.summaries.size());
    std::fprintf(stderr,
                 "scenario %-20s %zu grid points x %d reps in %.1fs "
                 "(mean fit %.2f ms, %d failed)\n",
                 s.name.c_str(), s.p_grid.size(), s.replications, secs, mean_ms,
                 failed);
    records.insert(records.end(), result.records.begin(), result.records.end());
    summaries.insert(summaries.end(), result.summaries.begin(),
                     result.summaries.end());
  }

  ddlab::write_records_csv(records, out / "records.csv");
  ddlab::write_summary_csv(summaries, out / "summary.csv");
  ddlab::write_failures_csv(records, out / "failures.csv");

  if (plots) {
    const std::filesystem::path plot_dir = out / "plots";
    std::filesystem::create_directories(plot_dir);
    for (const ddlab::Scenario& s : scenarios) {
      std::vector<ddlab::CurveSummary> own;
      for (const ddlab::CurveSummary& c : summaries) {
        if (c.scenario == s.name) own.push_back(c);
      }
      std::vector<std::string> metrics = {"test_mse", "train_mse", "l1_diff_per_n"};
      if (uses_gradient_descent(s.estimator.kind)) metrics.push_back("iterations");
      for (const std::string& metric : metrics) {
        ddlab::emit_plot(own, metric,
                         plot_dir / (s.name + "-" + metric + ".svg"));
      }
    }
  }
  std::cerr << "wrote " << (out / "records.csv").string() << ", summary.csv, failures.csv"
            << (plots ? ", plots/" : "") << "\n";
  return 0;
}

int cmd_probe(const std::string& estimator_id, const std::string& out_dir) {
  ddlab::EstimatorSpec est;
  est.kind = ddlab::estimator_from_name(estimator_id);
  if (est.kind == ddlab::EstimatorKind::tukey_gd) est.loss = ddlab::LossSpec::tukey();

  ddlab::DataSpec spec;
  spec.n_train = 20;
  spec.n_test = 10;
  spec.p = 1;
  spec.snr = 5.0;
  std::uint64_t seed = 42;
  if (const auto env = ddlab::master_seed_from_env()) seed = *env;
  ddlab::RngStream rng(seed, 0);
  const ddlab::Dataset base = ddlab::generate_dataset(rng, spec);

  const std::vector<double> magnitudes = {1e2, 1e3, 1e4, 1e5, 1e6};
  const std::vector<ddlab::BreakdownPoint> points =
      ddlab::breakdown_probe(est, base, magnitudes);

  const std::filesystem::path out(out_dir);
  std::filesystem::create_directories(out);
  const std::filesystem::path path = out / ("breakdown-" + estimator_id + ".csv");
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open '" + path.string() + "'");
  file << "magnitude,coef_norm\n";
  for (const ddlab::BreakdownPoint& pt : points) {
    file << ddlab::format_double(pt.magnitude) << ','
         << ddlab::format_double(pt.coef_norm) << '\n';
  }
  file.flush();
  if (!file) throw std::runtime_error("write to '" + path.string() + "' failed");
  std::cerr << "wrote " << path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"double-descent simulation harness for interpolating and robust "
               "regression estimators"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run the scenarios in a config file");
  std::string config_path;
  std::string out_dir;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bool plots = false;
  std::vector<std::string> only;
  run->add_option("--config", config_path, "scenario config file")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--plots", plots, "also emit SVG plots");
  run->add_option("--only", only, "run only the named scenarios");

  auto* probe = app.add_subcommand(
      "probe-breakdown", "single-outlier breakdown probe on a built-in instance");
  std::string estimator_id;
  std::string probe_out;
  probe->add_option("--estimator", estimator_id, "estimator id")->required();
  probe->add_option("--out", probe_out, "output directory")->required();

  auto* version = app.add_subcommand("version", "print version and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (version->parsed()) {
      std::cout << kVersion << "\n";
      return 0;
    }
    if (run->parsed()) return cmd_run(config_path, out_dir, workers, plots, only);
    if (probe->parsed()) return cmd_probe(estimator_id, probe_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
