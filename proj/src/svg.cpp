#include "levyspec/svg.hpp"

#include <algorithm>
#include <cmath>

#include "levyspec/errors.hpp"

namespace levyspec::svg {

namespace {

constexpr double kWidth = 800, kHeight = 500;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

const char* kPalette[4] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

std::string escape_xml(const std::string& text) {
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

std::string num(double v) { return io::format_double(v); }

// Tick spacing 1/2/5 * 10^k giving 4-8 ticks over [lo, hi].
std::vector<double> nice_ticks(double lo, double hi) {
  const double span = hi - lo;
  double step = std::pow(10.0, std::floor(std::log10(span / 5.0)));
  for (const double m : {1.0, 2.0, 5.0, 10.0}) {
    if (span / (step * m) <= 8.0) {
      step *= m;
      break;
    }
  }
  std::vector<double> ticks;
  const double first = std::ceil(lo / step) * step;
  for (double t = first; t <= hi + 1e-9 * span; t += step) {
    // Snap near-zero accumulation error so labels stay short.
    ticks.push_back(std::abs(t) < 1e-9 * span ? 0.0 : t);
  }
  return ticks;
}

}  // namespace

std::string render_plot(const std::vector<io::Curve>& curves, const std::string& title,
                        const std::string& x_label, const std::string& y_label) {
  if (curves.empty()) throw ConfigError("render_plot: no curves");
  if (curves.size() > 4) throw ConfigError("render_plot: at most 4 curves");

  double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
  for (const auto& c : curves) {
    if (c.xs.empty() || c.xs.size() != c.ys.size()) {
      throw ConfigError("render_plot: curve '" + c.label + "' is empty or ragged");
    }
    for (std::size_t i = 0; i < c.xs.size(); ++i) {
      if (!std::isfinite(c.xs[i]) || !std::isfinite(c.ys[i])) {
        throw ConfigError("render_plot: non-finite point in curve '" + c.label + "'");
      }
      xmin = std::min(xmin, c.xs[i]);
      xmax = std::max(xmax, c.xs[i]);
      ymin = std::min(ymin, c.ys[i]);
      ymax = std::max(ymax, c.ys[i]);
    }
  }
  const double xlo = xmin - 0.5, xhi = xmax + 0.5;
  double ylo = std::min(0.0, ymin), yhi = ymax;
  if (yhi <= ylo) yhi = ylo + 1.0;
  yhi += 0.05 * (yhi - ylo);

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xlo) / (xhi - xlo) * plot_w; };
  auto py = [&](double y) { return kTop + (yhi - y) / (yhi - ylo) * plot_h; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
       "viewBox=\"0 0 800 500\">\n";
  s += "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
  s += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"16\">" + escape_xml(title) + "</text>\n";

  for (const double t : nice_ticks(xlo, xhi)) {
    const std::string x = num(px(t));
    s += "<line x1=\"" + x + "\" y1=\"" + num(kTop) + "\" x2=\"" + x + "\" y2=\"" +
         num(kHeight - kBottom) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    s += "<text x=\"" + x + "\" y=\"" + num(kHeight - kBottom + 18) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + num(t) +
         "</text>\n";
  }
  for (const double t : nice_ticks(ylo, yhi)) {
    const std::string y = num(py(t));
    s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + y + "\" x2=\"" + num(kWidth - kRight) +
         "\" y2=\"" + y + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    s += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + y +
         "\" text-anchor=\"end\" dominant-baseline=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"11\">" + num(t) + "</text>\n";
  }
  s += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(plot_w) +
       "\" height=\"" + num(plot_h) + "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  s += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(kHeight - 10) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
       escape_xml(x_label) + "</text>\n";
  s += "<text x=\"18\" y=\"" + num(kTop + plot_h / 2) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
       "transform=\"rotate(-90 18 " + num(kTop + plot_h / 2) + ")\">" +
       escape_xml(y_label) + "</text>\n";

  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k];
    s += "<polyline fill=\"none\" stroke=\"";
    s += kPalette[k];
    s += "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < c.xs.size(); ++i) {
      if (i) s += ' ';
      s += num(px(c.xs[i]));
      s += ',';
      s += num(py(c.ys[i]));
    }
    s += "\"/>\n";
  }

  const double lx = kWidth - kRight - 190, ly0 = kTop + 12;
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const double ly = ly0 + 18 * double(k);
    s += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 24) +
         "\" y2=\"" + num(ly) + "\" stroke=\"";
    s += kPalette[k];
    s += "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + num(lx + 30) + "\" y=\"" + num(ly) +
         "\" dominant-baseline=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
         escape_xml(curves[k].label) + "</text>\n";
  }

  s += "</svg>\n";
  return s;
}

}  // namespace levyspec::svg
