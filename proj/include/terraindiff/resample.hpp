#pragma once

#include "terraindiff/grid.hpp"

namespace terraindiff {

// Bilinear value at fractional pixel-centre coordinates (col, row). Coordinates are clamped to
// the raster; neighbours that are nodata are dropped and the remaining weights renormalized.
// Returns NaN when no contributing neighbour is valid.
double sample_bilinear(const Grid& g, double col, double row);

// Pixel-centre aligned resize. Pixel size is rescaled with the width ratio.
Grid resize_bilinear(const Grid& g, int width, int height);
Mask resize_nearest(const Mask& m, int width, int height);

// Rotation about the raster centre, counter-clockwise in degrees. Pixels whose source lies
// outside the raster become nodata (grid) or false (mask).
Grid rotate_bilinear(const Grid& g, double degrees);
Mask rotate_nearest(const Mask& m, double degrees);

// Exact quarter turns (counter-clockwise, k mod 4) and flips.
Grid rot90(const Grid& g, int k);
Mask rot90(const Mask& m, int k);
Grid flip_horizontal(const Grid& g);
Mask flip_horizontal(const Mask& m);
Grid flip_vertical(const Grid& g);
Mask flip_vertical(const Mask& m);

Mask crop(const Mask& m, int row0, int col0, int height, int width);

}  // namespace terraindiff
