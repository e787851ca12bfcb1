#include "pdde/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "pdde/errors.hpp"

namespace pdde {
namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"};
constexpr int kPaletteSize = 8;
constexpr int kMaxPointsPerSeries = 2000;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void widen(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      const double pad = 0.5 + 0.5 * std::abs(hi);
      lo -= pad;
      hi += pad;
    } else {
      const double pad = 0.05 * (hi - lo);
      lo -= pad;
      hi += pad;
    }
  }
};

/// Evenly spaced "nice" tick positions inside [lo, hi].
std::vector<double> ticks(double lo, double hi, int want) {
  const double span = hi - lo;
  const double raw = span / want;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  }
  std::vector<double> out;
  double v = std::ceil(lo / step) * step;
  for (; v <= hi + 1e-9 * span; v += step) {
    out.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
  }
  return out;
}

}  // namespace

std::string render_line_plot(const std::string& title,
                             const std::vector<PlotSeries>& series,
                             const std::string& x_label,
                             const std::string& y_label, int width,
                             int height) {
  if (series.empty()) throw ValidationError("plot needs at least one series");
  for (const auto& s : series) {
    if (s.x.size() != s.y.size())
      throw ValidationError("series '" + s.label + "' has mismatched lengths");
    if (s.x.empty())
      throw ValidationError("series '" + s.label + "' is empty");
  }

  Range rx, ry;
  for (const auto& s : series) {
    for (double v : s.x) rx.widen(v);
    for (double v : s.y) ry.widen(v);
  }
  rx.finish();
  ry.finish();

  const double ml = 64, mr = 18, mt = 34, mb = 46;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto px = [&](double v) { return ml + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto py = [&](double v) { return mt + (ry.hi - v) / (ry.hi - ry.lo) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) +
         "\" viewBox=\"0 0 " + std::to_string(width) + " " +
         std::to_string(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(ml + pw / 2) + "\" y=\"20\" font-family=\"sans-serif\""
         " font-size=\"14\" text-anchor=\"middle\">" + escape(title) + "</text>\n";

  for (double v : ticks(rx.lo, rx.hi, 6)) {
    const double x = px(v);
    svg += "<line x1=\"" + num(x) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(x) +
           "\" y2=\"" + num(mt + ph) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + num(x) + "\" y=\"" + num(mt + ph + 16) +
           "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"middle\">" + num(v) + "</text>\n";
  }
  for (double v : ticks(ry.lo, ry.hi, 5)) {
    const double y = py(v);
    svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(y) + "\" x2=\"" +
           num(ml + pw) + "\" y2=\"" + num(y) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + num(ml - 6) + "\" y=\"" + num(y + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"end\">" + num(v) + "</text>\n";
  }
  svg += "<rect x=\"" + num(ml) + "\" y=\"" + num(mt) + "\" width=\"" + num(pw) +
         "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"#333333\"/>\n";
  svg += "<text x=\"" + num(ml + pw / 2) + "\" y=\"" + num(double(height) - 8) +
         "\" font-family=\"sans-serif\" font-size=\"12\" "
         "text-anchor=\"middle\">" + escape(x_label) + "</text>\n";
  if (!y_label.empty()) {
    svg += "<text x=\"14\" y=\"" + num(mt + ph / 2) +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\""
           " transform=\"rotate(-90 14 " + num(mt + ph / 2) + ")\">" +
           escape(y_label) + "</text>\n";
  }

  for (size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % kPaletteSize];
    const size_t stride =
        std::max<size_t>(1, s.x.size() / kMaxPointsPerSeries);
    std::string points;
    bool open = false;
    auto flush = [&]() {
      if (open && !points.empty()) {
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
      }
      points.clear();
      open = false;
    };
    for (size_t k = 0; k < s.x.size(); k += stride) {
      const size_t idx = std::min(k, s.x.size() - 1);
      const double vx = s.x[idx], vy = s.y[idx];
      if (!std::isfinite(vx) || !std::isfinite(vy)) {
        flush();
        continue;
      }
      points += num(px(vx)) + "," + num(py(vy)) + " ";
      open = true;
    }
    // Always include the final sample so the curve reaches the edge.
    if (std::isfinite(s.x.back()) && std::isfinite(s.y.back()) &&
        (s.x.size() - 1) % stride != 0) {
      points += num(px(s.x.back())) + "," + num(py(s.y.back())) + " ";
      open = true;
    }
    flush();
  }

  const double lx = ml + pw - 150, ly0 = mt + 12;
  for (size_t si = 0; si < series.size(); ++si) {
    const double y = ly0 + 16.0 * double(si);
    svg += "<line x1=\"" + num(lx) + "\" y1=\"" + num(y - 4) + "\" x2=\"" +
           num(lx + 22) + "\" y2=\"" + num(y - 4) + "\" stroke=\"";
    svg += kPalette[si % kPaletteSize];
    svg += "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num(lx + 28) + "\" y=\"" + num(y) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" +
           escape(series[si].label) + "</text>\n";
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace pdde
