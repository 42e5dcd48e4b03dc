#include "doctest_main.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "terraindiff/errors.hpp"
#include "terraindiff/fgrid.hpp"
#include "terraindiff/grid.hpp"
#include "terraindiff/resample.hpp"

using namespace terraindiff;

namespace {

constexpr float kNaN = std::numeric_limits<float>::quiet_NaN();

Grid random_grid(int w, int h, std::uint64_t seed, double lo = -50, double hi = 200) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(static_cast<float>(lo), static_cast<float>(hi));
  std::vector<float> v(static_cast<std::size_t>(w) * h);
  for (auto& x : v) x = u(rng);
  return Grid(w, h, std::move(v));
}

Grid plane(int w, int h, double a, double b, double c = 0.0) {
  std::vector<float> v(static_cast<std::size_t>(w) * h);
  for (int r = 0; r < h; ++r)
    for (int col = 0; col < w; ++col) v[static_cast<std::size_t>(r) * w + col] = static_cast<float>(a * col + b * r + c);
  return Grid(w, h, std::move(v));
}

}  // namespace

TEST_CASE("normalize uses the joint valid range") {
  const Grid s(3, 1, {8.f, 20.f, 13.f});
  const Grid g(3, 1, {6.f, 14.f, 13.f});
  const auto n = normalize(s, g, Mask::filled(3, 1, true));
  CHECK(n.params.lo == 6.0);
  CHECK(n.params.hi == 20.0);
  CHECK(n.dsm[2] == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(n.dsm[1] == 1.0f);
  CHECK(n.dtm->at(0, 0) == -1.0f);
}

TEST_CASE("normalize zeroes invalid pixels and excludes them from the range") {
  const Grid s(4, 1, {kNaN, 2.f, 4.f, 1000.f});
  const Mask m(4, 1, {1, 1, 1, 0});
  const auto n = normalize(s, std::nullopt, m);
  CHECK(n.params.lo == 2.0);
  CHECK(n.params.hi == 4.0);
  CHECK(n.dsm[0] == 0.0f);
  CHECK(n.dsm[3] == 0.0f);
  CHECK(n.dsm[1] == -1.0f);
  CHECK(n.dsm[2] == 1.0f);
  CHECK_FALSE(n.dtm.has_value());
}

TEST_CASE("normalize errors") {
  const Grid s(2, 1, {kNaN, kNaN});
  try {
    normalize(s, std::nullopt, Mask::filled(2, 1, true));
    FAIL("expected error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()) == "empty raster");
  }
  try {
    normalize(Grid::filled(2, 2, 5.f), std::nullopt, Mask::filled(2, 2, true));
    FAIL("expected error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()) == "degenerate range");
  }
  // Inference widens a flat tile instead.
  const NormParams p = inference_params(Grid::filled(2, 2, 5.f), Mask::filled(2, 2, true));
  CHECK(p.lo == 4.5);
  CHECK(p.hi == 5.5);
}

TEST_CASE("denormalize examples and round trip") {
  const NormParams p{6.0, 20.0};
  const Grid x(3, 1, {0.f, -1.f, 1.f});
  const Grid back = denormalize(x, p);
  CHECK(back[0] == 13.0f);
  CHECK(back[1] == 6.0f);
  CHECK(back[2] == 20.0f);

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Grid s = random_grid(17, 9, seed);
    const Grid g = random_grid(17, 9, seed + 100, -80, 120);
    const auto n = normalize(s, g, Mask::filled(17, 9, true));
    const double span = n.params.hi - n.params.lo;
    const Grid rs = denormalize(n.dsm, n.params);
    bool hit_lo = false, hit_hi = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(std::abs(rs[i] - s[i]) <= 1e-6 * span);
      CHECK(std::abs(rs[i] - s[i]) <= 1e-6 * std::max(1.0, std::abs(static_cast<double>(s[i]))) * 8);
      CHECK(n.dsm[i] >= -1.0f);
      CHECK(n.dsm[i] <= 1.0f);
      CHECK(n.dtm->at(0, 0) >= -1.0f);
      hit_lo = hit_lo || n.dsm[i] == -1.0f || (*n.dtm)[i] == -1.0f;
      hit_hi = hit_hi || n.dsm[i] == 1.0f || (*n.dtm)[i] == 1.0f;
    }
    CHECK(hit_lo);
    CHECK(hit_hi);
  }
}

TEST_CASE("ground mask") {
  const Grid s(3, 1, {1.1f, 1.5f, kNaN});
  const Grid g(3, 1, {1.0f, 1.0f, 1.0f});
  const Mask m = ground_mask(s, g, 0.2);
  CHECK(m[0]);
  CHECK_FALSE(m[1]);
  CHECK_FALSE(m[2]);
  CHECK(ground_mask(g, g, 0.2).count() == 3);
  CHECK_THROWS_AS(ground_mask(s, Grid::filled(2, 1, 0.f), 0.2), InputError);
  CHECK_THROWS_AS(ground_mask(s, g, 0.0), InputError);

  // Monotone in alpha.
  const Grid a = random_grid(16, 16, 3, 0, 2), b = random_grid(16, 16, 4, 0, 2);
  for (double lo : {0.05, 0.2, 0.5, 1.0}) {
    const Mask small = ground_mask(a, b, lo), large = ground_mask(a, b, lo * 1.5);
    for (std::size_t i = 0; i < small.size(); ++i)
      if (small[i]) CHECK(large[i]);
  }
}

TEST_CASE("gradient magnitude") {
  const Grid c = grad_magnitude(Grid::filled(5, 4, 3.f));
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == 0.0f);
  const Grid gx = grad_magnitude(plane(6, 5, 1, 0));
  for (std::size_t i = 0; i < gx.size(); ++i) CHECK(gx[i] == doctest::Approx(1.0));
  const Grid gxy = grad_magnitude(plane(6, 5, 1, 1));
  for (std::size_t i = 0; i < gxy.size(); ++i) CHECK(gxy[i] == doctest::Approx(std::sqrt(2.0)));
  // Pixel size scales the slope.
  const Grid wide(3, 1, {0.f, 2.f, 4.f}, GeoRef{0, 0, 2.0});
  CHECK(grad_magnitude(wide)[0] == doctest::Approx(1.0));
  // 1xN: the missing axis contributes zero.
  const Grid row(4, 1, {0.f, 1.f, 3.f, 6.f});
  const Grid gr = grad_magnitude(row);
  CHECK(gr[0] == doctest::Approx(1.0));
  CHECK(gr[2] == doctest::Approx(3.0));
  CHECK(gr[3] == doctest::Approx(3.0));
  // Invariance under an added constant and non-negativity.
  const Grid r = random_grid(9, 7, 5);
  std::vector<float> shifted(r.values().begin(), r.values().end());
  for (auto& v : shifted) v += 10.0f;
  const Grid g1 = grad_magnitude(r), g2 = grad_magnitude(r.with_values(shifted));
  for (std::size_t i = 0; i < g1.size(); ++i) {
    CHECK(g1[i] >= 0.0f);
    CHECK(g1[i] == doctest::Approx(g2[i]).epsilon(1e-4));
  }
  // Nodata propagates to every pixel whose stencil touches it.
  std::vector<float> holes(25, 1.0f);
  holes[12] = kNaN;
  const Grid gh = grad_magnitude(Grid(5, 5, holes));
  CHECK(std::isnan(gh[12]));
  CHECK(std::isnan(gh[11]));
  CHECK(std::isnan(gh[7]));
  CHECK(gh[13] == 0.0f);
}

TEST_CASE("FGRID layout is bit exact") {
  const Grid g(2, 2, {1.5f, kNaN, -2.0f, 3.25f}, GeoRef{100.5, -7.25, 0.5});
  std::ostringstream os;
  write_fgrid(os, g);
  const std::string b = os.str();
  REQUIRE(b.size() == 4 + 2 + 4 + 4 + 24 + 16);
  CHECK(b.substr(0, 4) == "FGRD");
  const auto* p = reinterpret_cast<const unsigned char*>(b.data());
  CHECK(le::get_u16(p + 4) == 1);
  CHECK(le::get_u32(p + 6) == 2);
  CHECK(le::get_u32(p + 10) == 2);
  CHECK(le::get_f64(p + 14) == 100.5);
  CHECK(le::get_f64(p + 22) == -7.25);
  CHECK(le::get_f64(p + 30) == 0.5);
  CHECK(le::get_f32(p + 38) == 1.5f);
  CHECK(std::isnan(le::get_f32(p + 42)));
  CHECK(le::get_f32(p + 50) == 3.25f);
  // Little-endian byte order of 1.5f = 0x3fc00000.
  CHECK(p[38] == 0x00);
  CHECK(p[41] == 0x3f);

  std::istringstream is(b);
  const Grid r = read_fgrid(is);
  CHECK(r.width() == 2);
  CHECK(r.geo() == g.geo());
  CHECK(r[0] == 1.5f);
  CHECK(std::isnan(r[1]));
  CHECK(r[3] == 3.25f);

  std::istringstream truncated(b.substr(0, b.size() - 3));
  CHECK_THROWS_AS(read_fgrid(truncated), FileError);
  std::string bad = b;
  bad[0] = 'X';
  std::istringstream bad_magic(bad);
  CHECK_THROWS_AS(read_fgrid(bad_magic), FileError);
  CHECK_THROWS_AS(read_fgrid(std::filesystem::path("/nonexistent/x.fgrid")), FileError);
}

TEST_CASE("FGRID file round trip and PGM preview") {
  const auto dir = std::filesystem::temp_directory_path() / "terraindiff_raster_test";
  std::filesystem::create_directories(dir);
  const Grid g = random_grid(13, 7, 9);
  write_fgrid(dir / "g.fgrid", g);
  const Grid r = read_fgrid(dir / "g.fgrid");
  REQUIRE(r.same_shape(g));
  CHECK(std::memcmp(r.values().data(), g.values().data(), g.size() * sizeof(float)) == 0);
  write_pgm(dir / "g.pgm", g);
  CHECK(std::filesystem::file_size(dir / "g.pgm") > 13u * 7u);
  const Mask m(3, 1, {1, 0, 1});
  CHECK(grid_to_mask(mask_to_grid(m)) == m);
  std::filesystem::remove_all(dir);
}

TEST_CASE("resampling preserves constants and stays within the input range") {
  const Grid c = Grid::filled(10, 6, 7.5f);
  const Grid up = resize_bilinear(c, 33, 17);
  const Grid down = resize_bilinear(c, 4, 3);
  for (std::size_t i = 0; i < up.size(); ++i) CHECK(up[i] == 7.5f);
  for (std::size_t i = 0; i < down.size(); ++i) CHECK(down[i] == 7.5f);
  const Grid r = random_grid(12, 12, 2);
  const Grid rr = rotate_bilinear(resize_bilinear(r, 20, 20), 3.0);
  const auto [mn, mx] = std::minmax_element(r.values().begin(), r.values().end());
  for (std::size_t i = 0; i < rr.size(); ++i)
    if (std::isfinite(rr[i])) {
      CHECK(rr[i] >= *mn - 1e-4f);
      CHECK(rr[i] <= *mx + 1e-4f);
    }
  // Bilinear is exact on planes.
  const Grid p = plane(8, 8, 0.5, 0.25, 3.0);
  CHECK(sample_bilinear(p, 2.5, 3.5) == doctest::Approx(0.5 * 2.5 + 0.25 * 3.5 + 3.0));
  // Quarter turns compose to the identity.
  const Grid q = random_grid(5, 3, 7);
  const Grid q4 = rot90(rot90(rot90(rot90(q, 1), 1), 1), 1);
  for (std::size_t i = 0; i < q.size(); ++i) CHECK(q4[i] == q[i]);
  const Grid q1 = rot90(q, 1);
  CHECK(q1.width() == 3);
  CHECK(q1.height() == 5);
  CHECK(q1.at(0, 0) == q.at(0, 4));  // counter-clockwise: top-right moves to top-left
  const Grid q3 = rot90(q, -1);
  const Grid back = rot90(q3, 1);
  for (std::size_t i = 0; i < q.size(); ++i) CHECK(back[i] == q[i]);
}
