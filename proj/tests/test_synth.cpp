#include "doctest_main.hpp"

#include <cstring>

#include "terraindiff/errors.hpp"
#include "terraindiff/synth.hpp"

using namespace terraindiff;

namespace {

bool bit_identical(const Grid& a, const Grid& b) {
  return a.same_shape(b) && a.geo() == b.geo() &&
         std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(float)) == 0;
}

}  // namespace

TEST_CASE("no structures gives a bare-earth scene") {
  synth::SceneSpec spec;
  spec.seed = 5;
  spec.building_count = 0;
  spec.tree_count = 0;
  const auto sc = synth::generate(spec);
  CHECK(bit_identical(sc.dsm, sc.dtm));
  CHECK(sc.gt_ground.count() == sc.gt_ground.size());
  CHECK(sc.nonground_fraction == 0.0);
}

TEST_CASE("generation is deterministic in the seed") {
  for (std::uint64_t seed : {1ull, 2ull, 99ull}) {
    const auto spec = synth::random_spec(seed, 48);
    const auto a = synth::generate(spec), b = synth::generate(spec);
    CHECK(bit_identical(a.dsm, b.dsm));
    CHECK(bit_identical(a.dtm, b.dtm));
    CHECK(a.gt_ground == b.gt_ground);
  }
  const auto a = synth::generate(synth::random_spec(1, 32));
  const auto b = synth::generate(synth::random_spec(2, 32));
  CHECK_FALSE(bit_identical(a.dtm, b.dtm));
}

TEST_CASE("structures only add height and ground labels are exact") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    auto spec = synth::random_spec(seed, 64);
    spec.building_count += 2;
    const auto sc = synth::generate(spec);
    std::size_t nonground = 0;
    for (std::size_t i = 0; i < sc.dsm.size(); ++i) {
      REQUIRE(sc.dsm[i] >= sc.dtm[i]);
      CHECK(sc.gt_ground[i] == (sc.dsm[i] == sc.dtm[i]));
      nonground += !sc.gt_ground[i];
    }
    CHECK(sc.nonground_fraction == doctest::Approx(static_cast<double>(nonground) / sc.dsm.size()));
    CHECK(sc.nonground_fraction > 0.0);
  }
}

TEST_CASE("an isolated box does not lower the ground") {
  synth::SceneSpec spec;
  spec.seed = 17;
  spec.size = 64;
  spec.building_count = 1;
  spec.tree_count = 0;
  const auto sc = synth::generate(spec);
  // Brute-force scan: over every 3x3 window the minimum of dsm never falls below the minimum of dtm.
  for (int r = 1; r < 63; ++r)
    for (int c = 1; c < 63; ++c) {
      float mind = 1e30f, ming = 1e30f;
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          mind = std::min(mind, sc.dsm.at(r + dr, c + dc));
          ming = std::min(ming, sc.dtm.at(r + dr, c + dc));
        }
      CHECK(mind >= ming);
    }
  CHECK(sc.gt_ground.count() < sc.gt_ground.size());
}

TEST_CASE("structure count controls the non-ground fraction") {
  synth::SceneSpec few, many;
  few.seed = many.seed = 3;
  few.building_count = 1;
  few.tree_count = 1;
  many.building_count = 12;
  many.tree_count = 12;
  CHECK(synth::generate(many).nonground_fraction > synth::generate(few).nonground_fraction);
}

TEST_CASE("sensor noise can violate dsm >= dtm and is zero-mean") {
  synth::SceneSpec spec;
  spec.seed = 4;
  spec.size = 128;
  spec.building_count = 0;
  spec.tree_count = 0;
  spec.noise_sigma = 0.3;
  const auto sc = synth::generate(spec);
  double sum = 0.0;
  int below = 0;
  for (std::size_t i = 0; i < sc.dsm.size(); ++i) {
    const double d = sc.dsm[i] - sc.dtm[i];
    sum += d;
    below += d < 0;
  }
  CHECK(below > 0);
  CHECK(std::abs(sum / sc.dsm.size()) < 3 * 0.3 / 128.0);
}

TEST_CASE("invalid specs are rejected") {
  synth::SceneSpec spec;
  spec.size = 8;
  CHECK_THROWS_AS(synth::generate(spec), InputError);
  spec.size = 32;
  spec.max_tree_height = -1;
  CHECK_THROWS_AS(synth::generate(spec), InputError);
}

TEST_CASE("pixel size sets georeferencing") {
  auto spec = synth::random_spec(8, 32, 2.0);
  const auto sc = synth::generate(spec);
  CHECK(sc.dsm.pixel_size() == 2.0);
  CHECK(sc.dtm.geo() == sc.dsm.geo());
}
