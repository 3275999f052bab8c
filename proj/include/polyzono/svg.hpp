#pragma once

/**
 * @file svg.hpp
 * @brief SVG 1.1 rendering of 2-D projections of polynomial zonotopes.
 *
 * Sets are rendered as a dense point cloud: a uniform grid over two chosen
 * dependent factors, remaining dependent factors sampled randomly and
 * independent factors at hull extremes, overlaid with the interval-hull
 * rectangle. Output is deterministic for a fixed seed.
 */

#include "polyzono/pz.hpp"

#include <cstdint>
#include <string>

namespace polyzono {

struct PlotOptions {
    Eigen::Index dim_x = 0;
    Eigen::Index dim_y = 1;
    int grid = 200;           ///< grid resolution per dependent-factor axis
    std::uint64_t seed = 0;
    double width = 640.0;     ///< canvas size in pixels
    double height = 480.0;
};

/// Renders one set as point cloud plus hull rectangle.
std::string render_pz_svg(const PolyZonotope& pz, const PlotOptions& opts);

/// Renders a sequence of sets (e.g. time-interval sets) as stacked hull
/// rectangles with a shared viewport.
std::string render_boxes_svg(const std::vector<Box>& boxes, Eigen::Index dim_x, Eigen::Index dim_y,
                             double width = 640.0, double height = 480.0);

}  // namespace polyzono
