#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "trajmap/errors.hpp"
#include "trajmap/geohash.hpp"
#include "trajmap/rng.hpp"

using namespace trajmap;

TEST_SUITE("geohash") {

TEST_CASE("encode worked examples match the bit-string oracle") {
  CHECK(oracles::geohash_encode(0.0, 0.0, 1) == "s");
  CHECK(geohash::encode(0.0, 0.0, 1).code == "s");

  CHECK(oracles::geohash_encode(57.64911, 10.40744, 11) == "u4pruydqqvj");
  CHECK(geohash::encode(57.64911, 10.40744, 11).code == "u4pruydqqvj");
}

TEST_CASE("cell_bounds worked examples") {
  const auto s = geohash::cell_bounds("s");
  CHECK(s.lat_min == 0.0);
  CHECK(s.lat_max == 45.0);
  CHECK(s.lon_min == 0.0);
  CHECK(s.lon_max == 45.0);

  const auto b = oracles::geohash_bounds("ezs42");
  CHECK(std::abs((b.lat_lo + b.lat_hi) / 2.0 - 42.605) < 1e-3);
  CHECK(std::abs((b.lon_lo + b.lon_hi) / 2.0 - (-5.603)) < 1e-3);
  const auto c = geohash::cell_bounds("ezs42");
  CHECK(std::abs(c.center().lat - 42.605) < 1e-3);
  CHECK(std::abs(c.center().lon - (-5.603)) < 1e-3);
}

TEST_CASE("cell center encodes back to the same cell") {
  for (int precision : {1, 4, 8, 12}) {
    const auto cell = geohash::encode(38.1234, -97.5678, precision);
    const auto back =
        geohash::encode(cell.center().lat, cell.center().lon, precision);
    CHECK(back.code == cell.code);
  }
}

TEST_CASE("coordinate on a split line goes to the upper/right interval") {
  // (0, 0) sits on the top-level split of both axes.
  const auto cell = geohash::encode(0.0, 0.0, 4);
  CHECK(cell.lat_min == 0.0);
  CHECK(cell.lon_min == 0.0);
  CHECK(cell.contains(0.0, 0.0));
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(geohash::encode(95.0, 0.0, 8), ConfigError);
  CHECK_THROWS_AS(geohash::encode(0.0, 200.0, 8), ConfigError);
  CHECK_THROWS_AS(geohash::encode(0.0, 0.0, 0), ConfigError);
  CHECK_THROWS_AS(geohash::encode(0.0, 0.0, 13), ConfigError);
  CHECK_THROWS_AS(geohash::cell_bounds(""), ConfigError);
  CHECK_THROWS_AS(geohash::cell_bounds("ab"), DataError);  // 'a' not in alphabet
}

TEST_CASE("random round trip, prefix nesting, oracle agreement") {
  rng::Engine eng(2024);
  for (int i = 0; i < 2000; ++i) {
    const double lat = eng.uniform(-90.0, 90.0);
    const double lon = eng.uniform(-180.0, 180.0);
    const int precision = 1 + static_cast<int>(eng.bounded(12));
    const auto cell = geohash::encode(lat, lon, precision);

    CHECK(cell.code == oracles::geohash_encode(lat, lon, precision));
    CHECK(cell.contains(lat, lon));

    const auto decoded = geohash::cell_bounds(cell.code);
    CHECK(decoded.lat_min == cell.lat_min);
    CHECK(decoded.lat_max == cell.lat_max);
    CHECK(decoded.lon_min == cell.lon_min);
    CHECK(decoded.lon_max == cell.lon_max);

    // Re-encoding the center reproduces the code.
    CHECK(geohash::encode(cell.center().lat, cell.center().lon, precision).code ==
          cell.code);

    if (precision > 1) {
      const auto parent = geohash::cell_bounds(cell.code.substr(0, precision - 1));
      CHECK(parent.lat_min <= cell.lat_min);
      CHECK(parent.lat_max >= cell.lat_max);
      CHECK(parent.lon_min <= cell.lon_min);
      CHECK(parent.lon_max >= cell.lon_max);
    }
  }
}

TEST_CASE("equator cell dimensions match the published size table within 2%") {
  // precision -> (width m, height m) at the equator
  const struct {
    int precision;
    double w, h;
  } rows[] = {
      {1, 5009400.0, 4992600.0},
      {2, 1252300.0, 624100.0},
      {3, 156500.0, 156000.0},
      {4, 39100.0, 19500.0},
      {5, 4900.0, 4900.0},
      {6, 1200.0, 609.4},
      {7, 152.9, 152.4},
      {8, 38.2, 19.0},
      {9, 4.8, 4.8},
      {10, 1.2, 0.595},
      {11, 0.149, 0.149},
      {12, 0.037, 0.019},
  };
  for (const auto& row : rows) {
    const auto [w, h] = geohash::cell_dimensions(row.precision, 0.0);
    CHECK(std::abs(w - row.w) / row.w < 0.02);
    CHECK(std::abs(h - row.h) / row.h < 0.02);
  }
}

TEST_CASE("width shrinks toward the poles, height does not") {
  const auto [w0, h0] = geohash::cell_dimensions(8, 0.0);
  const auto [w60, h60] = geohash::cell_dimensions(8, 60.0);
  CHECK(w60 < w0 * 0.6);  // cos(60 deg) = 0.5 plus band effects
  CHECK(std::abs(h60 - h0) / h0 < 1e-6);
}

}  // TEST_SUITE
