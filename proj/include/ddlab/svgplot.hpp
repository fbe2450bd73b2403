#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ddlab/harness.hpp"

namespace ddlab {

struct PlotOptions {
  bool log_x = true;
  bool log_y = false;
  int width = 760;
  int height = 500;
};

/// Names accepted as the metric argument of emit_plot.
const std::vector<std::string>& plot_metrics();

/// Writes a static SVG chart of the named metric against p: one polyline per
/// scenario present in the summaries, round markers on every point, axes with
/// ticks, and a legend. No external assets. With log_y, nonpositive points
/// are dropped from their curve.
void emit_plot(const std::vector<CurveSummary>& summaries,
               const std::string& metric, const std::filesystem::path& path,
               const PlotOptions& options = {});

}  // namespace ddlab
