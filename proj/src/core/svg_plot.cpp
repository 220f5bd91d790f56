#include "core/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "core/common.hpp"

namespace advdrop {

namespace {

constexpr double kW = 640, kH = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;

struct Range {
  double lo, hi;
};

Range nice_range(const std::vector<double>& v) {
  double lo = *std::min_element(v.begin(), v.end());
  double hi = *std::max_element(v.begin(), v.end());
  if (lo > 0 && lo / (hi + 1e-30) > 0.5) lo = 0;  // anchor bars at zero-ish
  if (hi <= lo) hi = lo + 1.0;
  const double pad = 0.05 * (hi - lo);
  return {std::min(lo, 0.0) == 0.0 && lo >= 0 ? 0.0 : lo - pad, hi + pad};
}

std::ofstream open_svg(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write plot: " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW
      << "' height='" << kH << "' viewBox='0 0 " << kW << " " << kH
      << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
  return out;
}

void axes(std::ofstream& out, const std::string& title,
          const std::string& x_label, const std::string& y_label,
          const Range& yr) {
  out << "<text x='" << kW / 2 << "' y='24' text-anchor='middle' "
      << "font-family='sans-serif' font-size='16'>" << title << "</text>\n";
  out << "<line x1='" << kLeft << "' y1='" << kH - kBottom << "' x2='"
      << kW - kRight << "' y2='" << kH - kBottom
      << "' stroke='black'/>\n<line x1='" << kLeft << "' y1='" << kTop
      << "' x2='" << kLeft << "' y2='" << kH - kBottom
      << "' stroke='black'/>\n";
  out << "<text x='" << kW / 2 << "' y='" << kH - 16
      << "' text-anchor='middle' font-family='sans-serif' font-size='12'>"
      << x_label << "</text>\n";
  out << "<text x='18' y='" << kH / 2
      << "' text-anchor='middle' font-family='sans-serif' font-size='12' "
      << "transform='rotate(-90 18 " << kH / 2 << ")'>" << y_label
      << "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = yr.lo + (yr.hi - yr.lo) * t / 4.0;
    const double y =
        kH - kBottom - (v - yr.lo) / (yr.hi - yr.lo) * (kH - kTop - kBottom);
    out << "<line x1='" << kLeft - 4 << "' y1='" << y << "' x2='" << kLeft
        << "' y2='" << y << "' stroke='black'/>\n<text x='" << kLeft - 8
        << "' y='" << y + 4
        << "' text-anchor='end' font-family='sans-serif' font-size='10'>"
        << fmt_double(v) << "</text>\n";
  }
}

}  // namespace

void svg_bar_chart(const std::string& path, const std::string& title,
                   const std::vector<std::string>& labels,
                   const std::vector<double>& values,
                   const std::string& y_label) {
  if (labels.size() != values.size() || values.empty()) {
    throw std::invalid_argument("bar chart needs matching labels/values");
  }
  auto out = open_svg(path);
  Range yr = nice_range(values);
  yr.lo = std::min(yr.lo, 0.0);
  axes(out, title, "", y_label, yr);
  const double span = kW - kLeft - kRight;
  const double slot = span / static_cast<double>(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double x = kLeft + slot * (static_cast<double>(k) + 0.15);
    const double h =
        (values[k] - yr.lo) / (yr.hi - yr.lo) * (kH - kTop - kBottom);
    out << "<rect x='" << x << "' y='" << kH - kBottom - h << "' width='"
        << slot * 0.7 << "' height='" << h
        << "' fill='#4878a8' stroke='black'/>\n";
    out << "<text x='" << x + slot * 0.35 << "' y='" << kH - kBottom + 16
        << "' text-anchor='middle' font-family='sans-serif' font-size='11'>"
        << labels[k] << "</text>\n";
    out << "<text x='" << x + slot * 0.35 << "' y='" << kH - kBottom - h - 5
        << "' text-anchor='middle' font-family='sans-serif' font-size='10'>"
        << fmt_double(values[k]) << "</text>\n";
  }
  out << "</svg>\n";
}

void svg_trajectory(const std::string& path, const std::string& title,
                    const std::vector<double>& xs,
                    const std::vector<double>& ys, const std::string& x_label,
                    const std::string& y_label) {
  if (xs.size() != ys.size() || xs.empty()) {
    throw std::invalid_argument("trajectory needs matching x/y");
  }
  auto out = open_svg(path);
  const Range yr = nice_range(ys);
  Range xr = nice_range(xs);
  axes(out, title, x_label, y_label, yr);
  auto px = [&xr](double v) {
    return kLeft + (v - xr.lo) / (xr.hi - xr.lo) * (kW - kLeft - kRight);
  };
  auto py = [&yr](double v) {
    return kH - kBottom -
           (v - yr.lo) / (yr.hi - yr.lo) * (kH - kTop - kBottom);
  };
  out << "<polyline fill='none' stroke='#b04848' stroke-width='1.5' points='";
  for (std::size_t k = 0; k < xs.size(); ++k) {
    out << px(xs[k]) << "," << py(ys[k]) << " ";
  }
  out << "'/>\n";
  for (std::size_t k = 0; k < xs.size(); ++k) {
    out << "<circle cx='" << px(xs[k]) << "' cy='" << py(ys[k])
        << "' r='2.5' fill='#b04848'/>\n";
  }
  // mark the start of the trajectory
  out << "<circle cx='" << px(xs.front()) << "' cy='" << py(ys.front())
      << "' r='4' fill='none' stroke='black'/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = xr.lo + (xr.hi - xr.lo) * t / 4.0;
    out << "<text x='" << px(v) << "' y='" << kH - kBottom + 16
        << "' text-anchor='middle' font-family='sans-serif' font-size='10'>"
        << fmt_double(v) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace advdrop
