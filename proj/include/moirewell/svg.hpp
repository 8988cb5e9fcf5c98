#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "moirewell/spectra.hpp"

namespace moirewell {

// Plot styling shared by the band and heatmap renderers.  Everything is
// emitted inline, so the files render standalone in any SVG viewer.
struct SvgOptions {
  int width = 760;
  int height = 540;
  std::string title;
  std::string xlabel = "k_x";
  std::string ylabel = "energy";
  // Vertical window; when min >= max the data range is used instead.
  double ymin = 0.0;
  double ymax = 0.0;
};

// Dispersion diagram: one polyline path per band, colored by band index
// through the built-in linear color map.
std::string band_diagram_svg(const BandStructure& bands,
                             const SvgOptions& options);

// Cell-grid heatmap of a scalar field sampled on [xlo,xhi] x [ylo,yhi]
// (values(i, j) at row i = y index, column j = x index), linear color map
// between the data extremes, with optional polyline overlays drawn on top
// in plot coordinates.
std::string heatmap_svg(
    const Eigen::MatrixXd& values, double xlo, double xhi, double ylo,
    double yhi, const SvgOptions& options,
    const std::vector<std::vector<std::array<double, 2>>>& overlays = {});

}  // namespace moirewell
