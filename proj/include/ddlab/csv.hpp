#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ddlab/harness.hpp"

namespace ddlab {

/// %.10g rendering used for every real-valued CSV cell.
std::string format_double(double v);

/// records.csv: one row per successful replication, sorted by
/// (scenario, p, replication). Wall-clock runtime is deliberately omitted so
/// identical runs produce identical bytes.
void write_records_csv(const std::vector<SweepRecord>& records,
                       const std::filesystem::path& path);

/// summary.csv: one row per (scenario, p), sorted the same way.
void write_summary_csv(const std::vector<CurveSummary>& summaries,
                       const std::filesystem::path& path);

/// failures.csv: the failed replications with their error text.
void write_failures_csv(const std::vector<SweepRecord>& records,
                        const std::filesystem::path& path);

}  // namespace ddlab
