#include "terraindiff/fgrid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>

#include "terraindiff/errors.hpp"

namespace terraindiff {

namespace le {

namespace {
template <class U>
void put(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}
template <class U>
U get(const unsigned char* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return v;
}
}  // namespace

void put_u16(std::string& out, std::uint16_t v) { put(out, v); }
void put_u32(std::string& out, std::uint32_t v) { put(out, v); }
void put_f32(std::string& out, float v) { put(out, std::bit_cast<std::uint32_t>(v)); }
void put_f64(std::string& out, double v) { put(out, std::bit_cast<std::uint64_t>(v)); }
std::uint16_t get_u16(const unsigned char* p) { return get<std::uint16_t>(p); }
std::uint32_t get_u32(const unsigned char* p) { return get<std::uint32_t>(p); }
float get_f32(const unsigned char* p) { return std::bit_cast<float>(get<std::uint32_t>(p)); }
double get_f64(const unsigned char* p) { return std::bit_cast<double>(get<std::uint64_t>(p)); }

}  // namespace le

namespace {
constexpr std::size_t kHeaderBytes = 4 + 2 + 4 + 4 + 8 * 3;
}

void write_fgrid(std::ostream& os, const Grid& g) {
  std::string buf;
  buf.reserve(kHeaderBytes + 4 * g.size());
  buf.append("FGRD");
  le::put_u16(buf, kFgridVersion);
  le::put_u32(buf, static_cast<std::uint32_t>(g.width()));
  le::put_u32(buf, static_cast<std::uint32_t>(g.height()));
  le::put_f64(buf, g.geo().x0);
  le::put_f64(buf, g.geo().y0);
  le::put_f64(buf, g.geo().pixel_size);
  for (float v : g.values()) le::put_f32(buf, std::isfinite(v) ? v : std::numeric_limits<float>::quiet_NaN());
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!os) throw FileError("failed writing FGRID stream");
}

Grid read_fgrid(std::istream& is) {
  unsigned char hdr[kHeaderBytes];
  if (!is.read(reinterpret_cast<char*>(hdr), kHeaderBytes)) throw FileError("truncated FGRID header");
  if (std::string(reinterpret_cast<char*>(hdr), 4) != "FGRD") throw FileError("bad FGRID magic");
  const auto version = le::get_u16(hdr + 4);
  if (version != kFgridVersion) throw FileError("unsupported FGRID version " + std::to_string(version));
  const auto w = le::get_u32(hdr + 6);
  const auto h = le::get_u32(hdr + 10);
  GeoRef geo{le::get_f64(hdr + 14), le::get_f64(hdr + 22), le::get_f64(hdr + 30)};
  if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20)) throw FileError("implausible FGRID dimensions");
  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<unsigned char> raw(4 * n);
  if (!is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
    throw FileError("truncated FGRID payload");
  std::vector<float> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = le::get_f32(raw.data() + 4 * i);
  return Grid(static_cast<int>(w), static_cast<int>(h), std::move(values), geo);
}

void write_fgrid(const std::filesystem::path& path, const Grid& g) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FileError("cannot open for writing: " + path.string());
  write_fgrid(os, g);
}

Grid read_fgrid(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FileError("cannot open: " + path.string());
  return read_fgrid(is);
}

Grid mask_to_grid(const Mask& m, GeoRef geo) {
  std::vector<float> v(m.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = m[i] ? 1.0f : 0.0f;
  return Grid(m.width(), m.height(), std::move(v), geo);
}

Mask grid_to_mask(const Grid& g) {
  std::vector<std::uint8_t> bits(g.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = (std::isfinite(g[i]) && g[i] > 0.5f) ? 1 : 0;
  return Mask(g.width(), g.height(), std::move(bits));
}

void write_pgm(const std::filesystem::path& path, const Grid& g) {
  float lo = std::numeric_limits<float>::infinity();
  float hi = -lo;
  for (float v : g.values()) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FileError("cannot open for writing: " + path.string());
  os << "P5\n" << g.width() << ' ' << g.height() << "\n255\n";
  std::string px(g.size(), '\0');
  const float span = hi > lo ? hi - lo : 1.0f;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const float v = g[i];
    if (!std::isfinite(v)) continue;
    px[i] = static_cast<char>(static_cast<unsigned char>(std::lround(255.0f * (v - lo) / span)));
  }
  os.write(px.data(), static_cast<std::streamsize>(px.size()));
}

}  // namespace terraindiff
