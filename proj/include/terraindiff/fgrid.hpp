#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "terraindiff/grid.hpp"

namespace terraindiff {

// FGRID layout (little-endian):
//   "FGRD" | u16 version (1) | u32 width | u32 height | f64 x0 | f64 y0 | f64 pixel_size
//   | f32 values[height * width], row-major, top row first. Nodata is quiet NaN.
inline constexpr std::uint16_t kFgridVersion = 1;

void write_fgrid(std::ostream& os, const Grid& g);
Grid read_fgrid(std::istream& is);

void write_fgrid(const std::filesystem::path& path, const Grid& g);
Grid read_fgrid(const std::filesystem::path& path);

// Masks travel as FGRID with values 0/1.
Grid mask_to_grid(const Mask& m, GeoRef geo = {});
Mask grid_to_mask(const Grid& g);

// 8-bit binary PGM, min-max stretched over valid pixels; nodata is black.
void write_pgm(const std::filesystem::path& path, const Grid& g);

namespace le {

void put_u16(std::string& out, std::uint16_t v);
void put_u32(std::string& out, std::uint32_t v);
void put_f32(std::string& out, float v);
void put_f64(std::string& out, double v);
std::uint16_t get_u16(const unsigned char* p);
std::uint32_t get_u32(const unsigned char* p);
float get_f32(const unsigned char* p);
double get_f64(const unsigned char* p);

}  // namespace le

}  // namespace terraindiff
