#include "moirewell/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "moirewell/common.hpp"

namespace moirewell {
namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
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

// Five-anchor linear color map, dark violet to yellow.
std::string color_at(double t) {
  static constexpr int anchors[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98},
      {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int i = std::min(3, int(t));
  const double w = t - i;
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                int(std::lround(anchors[i][0] + w * (anchors[i + 1][0] - anchors[i][0]))),
                int(std::lround(anchors[i][1] + w * (anchors[i + 1][1] - anchors[i][1]))),
                int(std::lround(anchors[i][2] + w * (anchors[i + 1][2] - anchors[i][2]))));
  return buf;
}

struct Frame {
  double x0, y0, w, h;     // plot rectangle in pixel coordinates
  double xlo, xhi, ylo, yhi;

  double px(double x) const { return x0 + (x - xlo) / (xhi - xlo) * w; }
  double py(double y) const { return y0 + h - (y - ylo) / (yhi - ylo) * h; }
};

// Tick step of the form {1,2,5}*10^k giving 4..8 intervals.
double nice_step(double range) {
  const double raw = range / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

void open_document(std::string& svg, const SvgOptions& opt) {
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(opt.width) + "\" height=\"" +
         std::to_string(opt.height) + "\" viewBox=\"0 0 " +
         std::to_string(opt.width) + " " + std::to_string(opt.height) +
         "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  if (!opt.title.empty())
    svg += "<text x=\"" + num(opt.width / 2.0) +
           "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\" fill=\"#222222\">" +
           escape(opt.title) + "</text>\n";
}

void draw_axes(std::string& svg, const Frame& f, const SvgOptions& opt) {
  svg += "<rect x=\"" + num(f.x0) + "\" y=\"" + num(f.y0) + "\" width=\"" +
         num(f.w) + "\" height=\"" + num(f.h) +
         "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";

  const double xstep = nice_step(f.xhi - f.xlo);
  for (double x = std::ceil(f.xlo / xstep) * xstep; x <= f.xhi + 1e-12 * xstep;
       x += xstep) {
    const double px = f.px(x);
    svg += "<line x1=\"" + num(px) + "\" y1=\"" + num(f.y0 + f.h) +
           "\" x2=\"" + num(px) + "\" y2=\"" + num(f.y0 + f.h + 5) +
           "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + num(px) + "\" y=\"" + num(f.y0 + f.h + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\" fill=\"#333333\">" +
           num(std::abs(x) < 1e-12 * xstep ? 0.0 : x) + "</text>\n";
  }
  const double ystep = nice_step(f.yhi - f.ylo);
  for (double y = std::ceil(f.ylo / ystep) * ystep; y <= f.yhi + 1e-12 * ystep;
       y += ystep) {
    const double py = f.py(y);
    svg += "<line x1=\"" + num(f.x0 - 5) + "\" y1=\"" + num(py) + "\" x2=\"" +
           num(f.x0) + "\" y2=\"" + num(py) +
           "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + num(f.x0 - 8) + "\" y=\"" + num(py + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\" fill=\"#333333\">" +
           num(std::abs(y) < 1e-12 * ystep ? 0.0 : y) + "</text>\n";
  }

  svg += "<text x=\"" + num(f.x0 + f.w / 2) + "\" y=\"" +
         num(f.y0 + f.h + 38) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" fill=\"#222222\">" +
         escape(opt.xlabel) + "</text>\n";
  svg += "<text x=\"16\" y=\"" + num(f.y0 + f.h / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" fill=\"#222222\" transform=\"rotate(-90 16 " +
         num(f.y0 + f.h / 2) + ")\">" + escape(opt.ylabel) + "</text>\n";
}

}  // namespace

std::string band_diagram_svg(const BandStructure& bands,
                             const SvgOptions& options) {
  const int nk = int(bands.kx.size());
  const int nb = int(bands.levels.cols());
  if (nk < 2 || bands.levels.rows() != nk || nb < 1)
    throw ConfigError("band diagram needs at least two k-points and one band");

  double ylo = options.ymin, yhi = options.ymax;
  if (!(ylo < yhi)) {
    ylo = bands.levels.minCoeff();
    yhi = bands.levels.maxCoeff();
    if (!(ylo < yhi)) {
      ylo -= 0.5;
      yhi += 0.5;
    }
    const double pad = 0.05 * (yhi - ylo);
    ylo -= pad;
    yhi += pad;
  }

  Frame f{64, options.title.empty() ? 16.0 : 34.0, options.width - 64.0 - 20.0,
          0, bands.kx.front(), bands.kx.back(), ylo, yhi};
  f.h = options.height - f.y0 - 50;
  if (!(f.xlo < f.xhi))
    throw ConfigError("band diagram needs an increasing k-grid");

  std::string svg;
  open_document(svg, options);
  draw_axes(svg, f, options);

  svg += "<clipPath id=\"plot\"><rect x=\"" + num(f.x0) + "\" y=\"" +
         num(f.y0) + "\" width=\"" + num(f.w) + "\" height=\"" + num(f.h) +
         "\"/></clipPath>\n<g clip-path=\"url(#plot)\">\n";
  for (int b = 0; b < nb; ++b) {
    std::string path;
    for (int i = 0; i < nk; ++i)
      path += (i == 0 ? "M" : " L") + num(f.px(bands.kx[size_t(i)])) + " " +
              num(f.py(bands.levels(i, b)));
    svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" +
           color_at(nb == 1 ? 0.5 : double(b) / (nb - 1)) +
           "\" stroke-width=\"1.3\"/>\n";
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

std::string heatmap_svg(
    const Eigen::MatrixXd& values, double xlo, double xhi, double ylo,
    double yhi, const SvgOptions& options,
    const std::vector<std::vector<std::array<double, 2>>>& overlays) {
  const int ny = int(values.rows());
  const int nx = int(values.cols());
  if (nx < 1 || ny < 1) throw ConfigError("heatmap needs a nonempty grid");
  if (!(xlo < xhi) || !(ylo < yhi))
    throw ConfigError("heatmap needs increasing axis ranges");

  double vlo = std::numeric_limits<double>::infinity(), vhi = -vlo;
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nx; ++j)
      if (std::isfinite(values(i, j))) {
        vlo = std::min(vlo, values(i, j));
        vhi = std::max(vhi, values(i, j));
      }
  if (!(vlo <= vhi)) throw ConfigError("heatmap values are all non-finite");
  if (vlo == vhi) vhi = vlo + 1.0;

  Frame f{64, options.title.empty() ? 16.0 : 34.0,
          options.width - 64.0 - 74.0, 0, xlo, xhi, ylo, yhi};
  f.h = options.height - f.y0 - 50;

  std::string svg;
  open_document(svg, options);

  const double cw = f.w / nx, ch = f.h / ny;
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nx; ++j) {
      const double v = values(i, j);
      const std::string fill =
          std::isfinite(v) ? color_at((v - vlo) / (vhi - vlo)) : "#bbbbbb";
      // Row i sits at y = ylo + i*dy, drawn from the bottom up.
      svg += "<rect x=\"" + num(f.x0 + j * cw) + "\" y=\"" +
             num(f.y0 + f.h - (i + 1) * ch) + "\" width=\"" + num(cw + 0.5) +
             "\" height=\"" + num(ch + 0.5) + "\" fill=\"" + fill + "\"/>\n";
    }

  for (const auto& line : overlays) {
    if (line.size() < 2) continue;
    std::string path;
    for (size_t i = 0; i < line.size(); ++i)
      path += (i == 0 ? "M" : " L") + num(f.px(line[i][0])) + " " +
              num(f.py(line[i][1]));
    svg += "<path d=\"" + path +
           "\" fill=\"none\" stroke=\"#ffffff\" stroke-width=\"1.5\"/>\n";
  }

  draw_axes(svg, f, options);

  // Color bar with the data extremes.
  const double bx = f.x0 + f.w + 18, bw = 14;
  for (int i = 0; i < 64; ++i)
    svg += "<rect x=\"" + num(bx) + "\" y=\"" +
           num(f.y0 + f.h * (1.0 - (i + 1) / 64.0)) + "\" width=\"" + num(bw) +
           "\" height=\"" + num(f.h / 64 + 0.5) + "\" fill=\"" +
           color_at(i / 63.0) + "\"/>\n";
  svg += "<rect x=\"" + num(bx) + "\" y=\"" + num(f.y0) + "\" width=\"" +
         num(bw) + "\" height=\"" + num(f.h) +
         "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
  svg += "<text x=\"" + num(bx + bw + 4) + "\" y=\"" + num(f.y0 + 10) +
         "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#333333\">" +
         num(vhi) + "</text>\n";
  svg += "<text x=\"" + num(bx + bw + 4) + "\" y=\"" + num(f.y0 + f.h) +
         "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#333333\">" +
         num(vlo) + "</text>\n";

  svg += "</svg>\n";
  return svg;
}

}  // namespace moirewell
