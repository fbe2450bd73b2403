#include "ddlab/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ddlab {

namespace {

void open_or_throw(std::ofstream& out, const std::filesystem::path& path) {
  out.open(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  }
}

void close_or_throw(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += "\"\"";
    else quoted += c;
  }
  quoted += "\"";
  return quoted;
}

template <typename T, typename Less>
std::vector<T> sorted_copy(const std::vector<T>& in, Less less) {
  std::vector<T> out = in;
  std::sort(out.begin(), out.end(), less);
  return out;
}

bool record_order(const SweepRecord& a, const SweepRecord& b) {
  if (a.scenario != b.scenario) return a.scenario < b.scenario;
  if (a.p != b.p) return a.p < b.p;
  return a.replication < b.replication;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_records_csv(const std::vector<SweepRecord>& records,
                       const std::filesystem::path& path) {
  const std::vector<SweepRecord> rows = sorted_copy(records, record_order);
  std::ofstream out;
  open_or_throw(out, path);
  out << "scenario,p,replication,test_mse,train_mse,l1_diff,l1_diff_per_n,"
         "l2_diff,linf_diff,iterations,converged\n";
  for (const SweepRecord& r : rows) {
    if (r.failed) continue;
    out << r.scenario << ',' << r.p << ',' << r.replication << ','
        << format_double(r.test_mse) << ',' << format_double(r.train_mse) << ','
        << format_double(r.l1_diff) << ',' << format_double(r.l1_diff_per_n) << ','
        << format_double(r.l2_diff) << ',' << format_double(r.linf_diff) << ','
        << r.iterations << ',' << (r.converged ? 1 : 0) << '\n';
  }
  close_or_throw(out, path);
}

void write_summary_csv(const std::vector<CurveSummary>& summaries,
                       const std::filesystem::path& path) {
  const std::vector<CurveSummary> rows =
      sorted_copy(summaries, [](const CurveSummary& a, const CurveSummary& b) {
        if (a.scenario != b.scenario) return a.scenario < b.scenario;
        return a.p < b.p;
      });
  std::ofstream out;
  open_or_throw(out, path);
  out << "scenario,p,n_reps,n_failed,"
         "mean_test_mse,se_test_mse,mean_train_mse,se_train_mse,"
         "mean_l1_diff,se_l1_diff,mean_l1_diff_per_n,se_l1_diff_per_n,"
         "mean_l2_diff,se_l2_diff,mean_linf_diff,se_linf_diff,"
         "mean_iterations,se_iterations,converged_rate\n";
  for (const CurveSummary& s : rows) {
    out << s.scenario << ',' << s.p << ',' << s.n_records << ',' << s.n_failed << ','
        << format_double(s.mean_test_mse) << ',' << format_double(s.se_test_mse) << ','
        << format_double(s.mean_train_mse) << ',' << format_double(s.se_train_mse) << ','
        << format_double(s.mean_l1_diff) << ',' << format_double(s.se_l1_diff) << ','
        << format_double(s.mean_l1_diff_per_n) << ','
        << format_double(s.se_l1_diff_per_n) << ','
        << format_double(s.mean_l2_diff) << ',' << format_double(s.se_l2_diff) << ','
        << format_double(s.mean_linf_diff) << ',' << format_double(s.se_linf_diff) << ','
        << format_double(s.mean_iterations) << ',' << format_double(s.se_iterations) << ','
        << format_double(s.converged_rate) << '\n';
  }
  close_or_throw(out, path);
}

void write_failures_csv(const std::vector<SweepRecord>& records,
                        const std::filesystem::path& path) {
  const std::vector<SweepRecord> rows = sorted_copy(records, record_order);
  std::ofstream out;
  open_or_throw(out, path);
  out << "scenario,p,replication,error\n";
  for (const SweepRecord& r : rows) {
    if (!r.failed) continue;
    out << r.scenario << ',' << r.p << ',' << r.replication << ','
        << quote_if_needed(r.error) << '\n';
  }
  close_or_throw(out, path);
}

}  // namespace ddlab
