#include "fracsmo/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fracsmo {

namespace {

constexpr double kWidth = 800, kHeight = 450;
constexpr double kLeft = 72, kRight = 24, kTop = 40, kBottom = 52;

std::string num(double v, int decimals = 2) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string tick_label(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<double> nice_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) ticks.push_back(v);
  return ticks;
}

// Per-column min/max reduction; keeps the order in which extremes occur.
std::vector<std::size_t> reduce(std::span<const double> x, std::span<const double> y, double x0,
                                double x1, std::size_t columns) {
  std::vector<std::size_t> keep;
  if (y.size() <= 2 * columns) {
    for (std::size_t i = 0; i < y.size(); ++i) keep.push_back(i);
    return keep;
  }
  std::size_t i = 0;
  for (std::size_t c = 0; c < columns && i < y.size(); ++c) {
    const double edge = x0 + (x1 - x0) * static_cast<double>(c + 1) / static_cast<double>(columns);
    std::size_t lo = i, hi = i;
    for (; i < y.size() && (x[i] <= edge || c + 1 == columns); ++i) {
      if (y[i] < y[lo]) lo = i;
      if (y[i] > y[hi]) hi = i;
    }
    keep.push_back(std::min(lo, hi));
    if (lo != hi) keep.push_back(std::max(lo, hi));
  }
  return keep;
}

}  // namespace

std::string render_svg(const Plot& plot) {
  for (const auto& s : plot.series) {
    if (s.y.size() != plot.x.size()) throw std::invalid_argument("series length mismatch");
  }
  double x0 = 0.0, x1 = 1.0;
  if (!plot.x.empty()) {
    x0 = plot.x.front();
    x1 = plot.x.back();
    if (!(x1 > x0)) x1 = x0 + 1.0;
  }
  double y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
  for (const auto& s : plot.series)
    for (double v : s.y)
      if (std::isfinite(v)) {
        y0 = std::min(y0, v);
        y1 = std::max(y1, v);
      }
  if (!std::isfinite(y0)) y0 = -1.0, y1 = 1.0;
  if (y1 - y0 < 1e-12) {
    y0 -= 1.0;
    y1 += 1.0;
  } else {
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
  }

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return kTop + (y1 - v) / (y1 - y0) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
     << escape(plot.title) << "</text>\n";

  os << "<g stroke=\"#dddddd\" stroke-width=\"1\" font-size=\"11\" fill=\"#333333\">\n";
  for (double v : nice_ticks(x0, x1)) {
    os << "<line x1=\"" << num(px(v)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(px(v))
       << "\" y2=\"" << num(kTop + ph) << "\"/>";
    os << "<text stroke=\"none\" x=\"" << num(px(v)) << "\" y=\"" << num(kTop + ph + 16)
       << "\" text-anchor=\"middle\">" << tick_label(v) << "</text>\n";
  }
  for (double v : nice_ticks(y0, y1)) {
    os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py(v)) << "\" x2=\"" << num(kLeft + pw)
       << "\" y2=\"" << num(py(v)) << "\"/>";
    os << "<text stroke=\"none\" x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(v) + 4)
       << "\" text-anchor=\"end\">" << tick_label(v) << "</text>\n";
  }
  os << "</g>\n";
  os << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
     << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 12)
     << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(plot.x_label) << "</text>\n";
  os << "<text x=\"18\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" font-size=\"13\""
     << " transform=\"rotate(-90 18 " << num(kTop + ph / 2) << ")\">" << escape(plot.y_label)
     << "</text>\n";

  const auto columns = static_cast<std::size_t>(pw);
  for (const auto& s : plot.series) {
    os << "<polyline fill=\"none\" stroke=\"" << escape(s.color) << "\" stroke-width=\"1.2\" points=\"";
    bool first = true;
    for (std::size_t i : reduce(plot.x, s.y, x0, x1, columns)) {
      if (!std::isfinite(s.y[i])) continue;
      os << (first ? "" : " ") << num(px(plot.x[i])) << ',' << num(py(s.y[i]));
      first = false;
    }
    os << "\"/>\n";
  }

  double ly = kTop + 16;
  for (const auto& s : plot.series) {
    const double lx = kLeft + pw - 150;
    os << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(lx + 24)
       << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << escape(s.color)
       << "\" stroke-width=\"2\"/>";
    os << "<text x=\"" << num(lx + 30) << "\" y=\"" << num(ly) << "\" font-size=\"12\">"
       << escape(s.label) << "</text>\n";
    ly += 18;
  }
  os << "</svg>\n";
  return os.str();
}

void write_svg(const std::string& path, const Plot& plot) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << render_svg(plot);
}

}  // namespace fracsmo
