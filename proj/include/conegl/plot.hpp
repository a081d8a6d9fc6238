#pragma once

#include <string>
#include <vector>

#include "conegl/field.hpp"

namespace conegl {

// |u| heatmap of the unrolled sector, rasterized to a binary PPM image.
void write_modulus_heatmap(const TangentField& field, const std::string& path,
                           int width = 640);

// Phase quiver over the sector as an SVG drawing; one arrow per
// stride x stride block of nodes, length scaled by the local modulus.
void write_phase_quiver(const TangentField& field, const std::string& path,
                        int stride = 8);

// Scalar samples on a regular nx x ny raster (e.g. a W landscape) as PPM.
void write_scalar_heatmap(const std::vector<double>& values, int nx, int ny,
                          const std::string& path);

}  // namespace conegl
