#include "ddlab/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

namespace ddlab {

namespace {

double metric_value(const CurveSummary& s, const std::string& metric) {
  if (metric == "test_mse") return s.mean_test_mse;
  if (metric == "train_mse") return s.mean_train_mse;
  if (metric == "l1_diff") return s.mean_l1_diff;
  if (metric == "l1_diff_per_n") return s.mean_l1_diff_per_n;
  if (metric == "l2_diff") return s.mean_l2_diff;
  if (metric == "linf_diff") return s.mean_linf_diff;
  if (metric == "iterations") return s.mean_iterations;
  if (metric == "converged_rate") return s.converged_rate;
  throw std::invalid_argument("emit_plot: unknown metric '" + metric + "'");
}

std::string fmt(double v, const char* spec = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  if (raw / mag > 5.0) step = 10.0 * mag;
  else if (raw / mag > 2.0) step = 5.0 * mag;
  else if (raw / mag > 1.0) step = 2.0 * mag;
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
    ticks.push_back(t);
  }
  return ticks;
}

std::vector<double> log_ticks(double lo, double hi) {
  std::vector<double> ticks;
  for (int d = static_cast<int>(std::ceil(lo - 1e-9));
       d <= static_cast<int>(std::floor(hi + 1e-9)); ++d) {
    ticks.push_back(static_cast<double>(d));
  }
  if (ticks.empty()) ticks.push_back(lo);
  return ticks;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#e377c2"};

}  // namespace

const std::vector<std::string>& plot_metrics() {
  static const std::vector<std::string> metrics = {
      "test_mse", "train_mse",   "l1_diff",    "l1_diff_per_n",
      "l2_diff",  "linf_diff",   "iterations", "converged_rate"};
  return metrics;
}

void emit_plot(const std::vector<CurveSummary>& summaries,
               const std::string& metric, const std::filesystem::path& path,
               const PlotOptions& options) {
  if (summaries.empty()) {
    throw std::invalid_argument("emit_plot: no summaries to plot");
  }
  metric_value(summaries.front(), metric);  // validates the metric name

  // One curve per scenario, points ordered by p.
  std::map<std::string, std::vector<std::pair<double, double>>> curves;
  for (const CurveSummary& s : summaries) {
    const double y = metric_value(s, metric);
    curves[s.scenario].push_back({static_cast<double>(s.p), y});
  }
  for (auto& [name, pts] : curves) std::sort(pts.begin(), pts.end());

  auto fx = [&](double p) { return options.log_x ? std::log10(p) : p; };
  auto fy = [&](double v) { return options.log_y ? std::log10(v) : v; };
  auto usable = [&](double p, double v) {
    if (!std::isfinite(p) || !std::isfinite(v)) return false;
    if (options.log_x && !(p > 0.0)) return false;
    if (options.log_y && !(v > 0.0)) return false;
    return true;
  };

  double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
  bool any = false;
  for (const auto& [name, pts] : curves) {
    for (const auto& [p, v] : pts) {
      if (!usable(p, v)) continue;
      const double tx = fx(p);
      const double ty = fy(v);
      if (!any) {
        x_lo = x_hi = tx;
        y_lo = y_hi = ty;
        any = true;
      } else {
        x_lo = std::min(x_lo, tx);
        x_hi = std::max(x_hi, tx);
        y_lo = std::min(y_lo, ty);
        y_hi = std::max(y_hi, ty);
      }
    }
  }
  if (!any) {
    throw std::invalid_argument("emit_plot: no plottable points for metric '" +
                                metric + "' with the requested scales");
  }
  if (x_hi == x_lo) {
    x_lo -= 0.5;
    x_hi += 0.5;
  }
  if (y_hi == y_lo) {
    const double pad = y_lo == 0.0 ? 1.0 : std::abs(y_lo) * 0.5;
    y_lo -= pad;
    y_hi += pad;
  }

  const double ml = 64.0, mr = 18.0, mt = 20.0, mb = 48.0;
  const double w = static_cast<double>(options.width);
  const double h = static_cast<double>(options.height);
  const double pw = w - ml - mr;
  const double ph = h - mt - mb;
  auto sx = [&](double t) { return ml + (t - x_lo) / (x_hi - x_lo) * pw; };
  auto sy = [&](double t) { return mt + ph - (t - y_lo) / (y_hi - y_lo) * ph; };

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  }
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width
      << "\" height=\"" << options.height << "\" viewBox=\"0 0 " << options.width
      << " " << options.height << "\">\n"
      << "<rect width=\"" << options.width << "\" height=\"" << options.height
      << "\" fill=\"#ffffff\"/>\n";

  // Axes.
  out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(mt + ph) << "\" x2=\""
      << fmt(ml + pw) << "\" y2=\"" << fmt(mt + ph)
      << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(mt) << "\" x2=\""
      << fmt(ml) << "\" y2=\"" << fmt(mt + ph)
      << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";

  const std::vector<double> xticks =
      options.log_x ? log_ticks(x_lo, x_hi) : linear_ticks(x_lo, x_hi);
  for (double t : xticks) {
    const double px = sx(t);
    const double label = options.log_x ? std::pow(10.0, t) : t;
    out << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(mt + ph) << "\" x2=\""
        << fmt(px) << "\" y2=\"" << fmt(mt + ph + 4)
        << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(mt + ph + 17)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
        << xml_escape(fmt(label, "%.4g")) << "</text>\n";
  }
  const std::vector<double> yticks =
      options.log_y ? log_ticks(y_lo, y_hi) : linear_ticks(y_lo, y_hi);
  for (double t : yticks) {
    const double py = sy(t);
    const double label = options.log_y ? std::pow(10.0, t) : t;
    out << "<line x1=\"" << fmt(ml - 4) << "\" y1=\"" << fmt(py) << "\" x2=\""
        << fmt(ml) << "\" y2=\"" << fmt(py)
        << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << fmt(ml - 7) << "\" y=\"" << fmt(py + 3.5)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
        << xml_escape(fmt(label, "%.4g")) << "</text>\n";
  }

  // Axis titles.
  out << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(h - 10)
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">p</text>\n";
  out << "<text x=\"14\" y=\"" << fmt(mt + ph / 2)
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\""
      << " transform=\"rotate(-90 14 " << fmt(mt + ph / 2) << ")\">"
      << xml_escape(metric) << "</text>\n";

  // Curves and markers.
  int color = 0;
  for (const auto& [name, pts] : curves) {
    const char* stroke = kPalette[color % 8];
    std::string poly;
    int kept = 0;
    for (const auto& [p, v] : pts) {
      if (!usable(p, v)) continue;
      if (!poly.empty()) poly += " ";
      poly += fmt(sx(fx(p))) + "," + fmt(sy(fy(v)));
      ++kept;
    }
    if (kept >= 2) {
      out << "<polyline points=\"" << poly << "\" fill=\"none\" stroke=\"" << stroke
          << "\" stroke-width=\"1.5\"/>\n";
    }
    for (const auto& [p, v] : pts) {
      if (!usable(p, v)) continue;
      out << "<circle cx=\"" << fmt(sx(fx(p))) << "\" cy=\"" << fmt(sy(fy(v)))
          << "\" r=\"2.5\" fill=\"" << stroke << "\"/>\n";
    }
    ++color;
  }

  // Legend, top right.
  double ly = mt + 12.0;
  const double lx = ml + pw - 150.0;
  color = 0;
  for (const auto& [name, pts] : curves) {
    const char* stroke = kPalette[color % 8];
    out << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly - 3.5) << "\" x2=\""
        << fmt(lx + 22) << "\" y2=\"" << fmt(ly - 3.5) << "\" stroke=\"" << stroke
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fmt(lx + 28) << "\" y=\"" << fmt(ly)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(name)
        << "</text>\n";
    ly += 15.0;
    ++color;
  }

  out << "</svg>\n";
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace ddlab
