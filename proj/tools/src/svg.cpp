#include "qmeval/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace qmeval::cli {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
                                    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

const char* colour(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  if (v != 0.0 && (std::fabs(v) >= 1e5 || std::fabs(v) < 1e-3)) {
    std::snprintf(buf, sizeof buf, "%.0e", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.6g", v);
  }
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (const char c : text) {
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return lo > hi; }
  void pad() {
    if (lo == hi) {
      const double d = lo == 0.0 ? 1.0 : std::fabs(lo) * 0.1;
      lo -= d;
      hi += d;
    }
  }
};

double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  const double nice = f < 1.5 ? 1.0 : f < 3.0 ? 2.0 : f < 7.0 ? 5.0 : 10.0;
  return nice * mag;
}

std::vector<double> linear_ticks(Range& r) {
  const double step = nice_step(r.hi - r.lo, 5);
  r.lo = std::floor(r.lo / step) * step;
  r.hi = std::ceil(r.hi / step) * step;
  std::vector<double> ticks;
  for (double t = r.lo; t <= r.hi + step * 1e-9; t += step) ticks.push_back(std::fabs(t) < step * 1e-9 ? 0.0 : t);
  return ticks;
}

std::vector<double> log_ticks(const Range& r) {
  std::vector<double> ticks;
  for (double decade = std::pow(10.0, std::floor(std::log10(r.lo))); decade <= r.hi; decade *= 10.0) {
    for (const double m : {1.0, 2.0, 5.0}) {
      const double t = m * decade;
      if (t >= r.lo * (1 - 1e-9) && t <= r.hi * (1 + 1e-9)) ticks.push_back(t);
    }
  }
  return ticks;
}

class Canvas {
 public:
  Canvas(Range x, Range y, bool log_x) : x_(x), y_(y), log_x_(log_x) {}

  double px(double x) const {
    const double t = log_x_ ? (std::log(x) - std::log(x_.lo)) / (std::log(x_.hi) - std::log(x_.lo))
                            : (x - x_.lo) / (x_.hi - x_.lo);
    return kLeft + t * (kWidth - kLeft - kRight);
  }
  double py(double y) const { return kHeight - kBottom - (y - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom); }

 private:
  Range x_;
  Range y_;
  bool log_x_;
};

void open(std::ostringstream& s, const std::string& title) {
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
    << "</text>\n";
}

void frame(std::ostringstream& s, const std::string& x_label, const std::string& y_label) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kTop, y1 = kHeight - kBottom;
  s << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(x1 - x0) << "\" height=\""
    << num(y1 - y0) << "\" fill=\"none\" stroke=\"black\"/>\n";
  s << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 18) << "\" text-anchor=\"middle\">"
    << escape(x_label) << "</text>\n";
  s << "<text transform=\"translate(18," << num((y0 + y1) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(y_label) << "</text>\n";
}

void y_axis(std::ostringstream& s, const Canvas& c, const std::vector<double>& ticks) {
  for (const double t : ticks) {
    const double y = c.py(t);
    s << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kWidth - kRight) << "\" y2=\""
      << num(y) << "\" stroke=\"#dddddd\"/>\n";
    s << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << tick_label(t)
      << "</text>\n";
  }
}

void legend_entry(std::ostringstream& s, std::size_t row, const std::string& name, const std::string& swatch) {
  const double x = kWidth - kRight + 15;
  const double y = kTop + 10 + 20.0 * static_cast<double>(row);
  s << "<g transform=\"translate(" << num(x) << ',' << num(y) << ")\">" << swatch << "<text x=\"26\" y=\"4\">"
    << escape(name) << "</text></g>\n";
}

}  // namespace

std::optional<std::string> render(const LineChart& chart) {
  Range xr, yr;
  for (const auto& series : chart.series) {
    for (std::size_t i = 0; i < series.x.size() && i < series.y.size(); ++i) {
      if (!series.y[i] || !std::isfinite(*series.y[i])) continue;
      if (chart.log_x && !(series.x[i] > 0.0)) continue;
      xr.add(series.x[i]);
      yr.add(*series.y[i]);
    }
  }
  if (xr.empty() || yr.empty()) return std::nullopt;
  if (xr.lo == xr.hi) {
    xr.lo = chart.log_x ? xr.lo / 2 : xr.lo - 1;
    xr.hi = chart.log_x ? xr.hi * 2 : xr.hi + 1;
  }
  yr.pad();
  const auto yticks = linear_ticks(yr);
  const auto xticks = chart.log_x ? log_ticks(xr) : linear_ticks(xr);
  const Canvas c(xr, yr, chart.log_x);

  std::ostringstream s;
  open(s, chart.title);
  y_axis(s, c, yticks);
  for (const double t : xticks) {
    s << "<text x=\"" << num(c.px(t)) << "\" y=\"" << num(kHeight - kBottom + 16) << "\" text-anchor=\"middle\">"
      << tick_label(t) << "</text>\n";
  }
  frame(s, chart.x_label, chart.y_label);
  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const auto& series = chart.series[k];
    const std::string dash = series.dashed ? " stroke-dasharray=\"6 4\"" : "";
    std::string path;
    bool pen_down = false;
    for (std::size_t i = 0; i < series.x.size() && i < series.y.size(); ++i) {
      if (!series.y[i] || !std::isfinite(*series.y[i]) || (chart.log_x && !(series.x[i] > 0.0))) {
        pen_down = false;
        continue;
      }
      path += (pen_down ? " L" : " M") + num(c.px(series.x[i])) + ' ' + num(c.py(*series.y[i]));
      pen_down = true;
      s << "<circle cx=\"" << num(c.px(series.x[i])) << "\" cy=\"" << num(c.py(*series.y[i]))
        << "\" r=\"2.5\" fill=\"" << colour(k) << "\"/>\n";
    }
    if (!path.empty()) {
      s << "<path d=\"" << path.substr(1) << "\" fill=\"none\" stroke=\"" << colour(k) << "\" stroke-width=\"1.5\""
        << dash << "/>\n";
    }
    legend_entry(s, k, series.name,
                 std::string("<line x1=\"0\" y1=\"0\" x2=\"20\" y2=\"0\" stroke=\"") + colour(k) +
                     "\" stroke-width=\"2\"" + dash + "/>");
  }
  s << "</svg>\n";
  return s.str();
}

std::optional<std::string> render(const BarChart& chart) {
  Range yr;
  yr.add(0.0);
  bool any = false;
  for (const auto& group : chart.values) {
    for (const auto& v : group) {
      if (v && std::isfinite(*v)) {
        yr.add(*v);
        any = true;
      }
    }
  }
  if (!any || chart.groups.empty()) return std::nullopt;
  yr.pad();
  const auto yticks = linear_ticks(yr);
  const Range xr{0.0, static_cast<double>(chart.groups.size())};
  const Canvas c(xr, yr, false);

  std::ostringstream s;
  open(s, chart.title);
  y_axis(s, c, yticks);
  const std::size_t n_series = std::max<std::size_t>(chart.series.size(), 1);
  const double slot = (c.px(1.0) - c.px(0.0)) * 0.8 / static_cast<double>(n_series);
  for (std::size_t g = 0; g < chart.groups.size(); ++g) {
    const double left = c.px(static_cast<double>(g)) + (c.px(1.0) - c.px(0.0)) * 0.1;
    for (std::size_t k = 0; k < n_series && g < chart.values.size() && k < chart.values[g].size(); ++k) {
      const auto& v = chart.values[g][k];
      if (!v || !std::isfinite(*v)) continue;
      const double top = std::min(c.py(*v), c.py(0.0));
      const double height = std::fabs(c.py(*v) - c.py(0.0));
      s << "<rect x=\"" << num(left + slot * static_cast<double>(k)) << "\" y=\"" << num(top) << "\" width=\""
        << num(slot * 0.9) << "\" height=\"" << num(height) << "\" fill=\"" << colour(k) << "\"/>\n";
    }
    s << "<text x=\"" << num(c.px(static_cast<double>(g) + 0.5)) << "\" y=\"" << num(kHeight - kBottom + 16)
      << "\" text-anchor=\"middle\">" << escape(chart.groups[g]) << "</text>\n";
  }
  s << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(c.py(0.0)) << "\" x2=\"" << num(kWidth - kRight)
    << "\" y2=\"" << num(c.py(0.0)) << "\" stroke=\"black\"/>\n";
  frame(s, "", chart.y_label);
  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    legend_entry(s, k, chart.series[k],
                 std::string("<rect x=\"0\" y=\"-6\" width=\"20\" height=\"12\" fill=\"") + colour(k) + "\"/>");
  }
  s << "</svg>\n";
  return s.str();
}

std::optional<std::string> render(const ScatterPlot& plot) {
  Range xr, yr;
  for (const auto& p : plot.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
    xr.add(p.x);
    yr.add(p.y);
  }
  if (xr.empty()) return std::nullopt;
  xr.add(0.0);
  yr.add(0.0);
  xr.pad();
  yr.pad();
  const auto xticks = linear_ticks(xr);
  const auto yticks = linear_ticks(yr);
  const Canvas c(xr, yr, false);

  std::ostringstream s;
  open(s, plot.title);
  y_axis(s, c, yticks);
  for (const double t : xticks) {
    s << "<text x=\"" << num(c.px(t)) << "\" y=\"" << num(kHeight - kBottom + 16) << "\" text-anchor=\"middle\">"
      << tick_label(t) << "</text>\n";
  }
  s << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(c.py(0.0)) << "\" x2=\"" << num(kWidth - kRight)
    << "\" y2=\"" << num(c.py(0.0)) << "\" stroke=\"black\" stroke-dasharray=\"3 3\"/>\n";
  const auto cross = [](double x, double y, const char* col) {
    return "<path d=\"M" + num(x - 3) + ' ' + num(y - 3) + " L" + num(x + 3) + ' ' + num(y + 3) + " M" +
           num(x - 3) + ' ' + num(y + 3) + " L" + num(x + 3) + ' ' + num(y - 3) + "\" stroke=\"" + col +
           "\" stroke-width=\"1.2\"/>";
  };
  for (const auto& p : plot.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
    if (p.marked) {
      s << "<circle cx=\"" << num(c.px(p.x)) << "\" cy=\"" << num(c.py(p.y)) << "\" r=\"2.5\" fill=\"" << colour(0)
        << "\" fill-opacity=\"0.7\"/>\n";
    } else {
      s << cross(c.px(p.x), c.py(p.y), colour(1)) << '\n';
    }
  }
  frame(s, plot.x_label, plot.y_label);
  legend_entry(s, 0, plot.marked_name,
               std::string("<circle cx=\"10\" cy=\"0\" r=\"3\" fill=\"") + colour(0) + "\"/>");
  legend_entry(s, 1, plot.unmarked_name, cross(10, 0, colour(1)));
  s << "</svg>\n";
  return s.str();
}

}  // namespace qmeval::cli
