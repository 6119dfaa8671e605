#include "trajmap/geohash.hpp"

#include <array>
#include <cmath>

#include "trajmap/errors.hpp"

namespace trajmap::geohash {

namespace {

std::array<int, 128> build_decode_table() {
  std::array<int, 128> t{};
  t.fill(-1);
  for (int i = 0; i < 32; ++i) t[static_cast<unsigned char>(kAlphabet[i])] = i;
  return t;
}

const std::array<int, 128> kDecode = build_decode_table();

}  // namespace

GeoCell encode(double lat, double lon, int precision) {
  if (precision < 1 || precision > kMaxPrecision)
    throw ConfigError("geohash precision must be in 1..12");
  if (!(lat >= -90.0 && lat <= 90.0))
    throw ConfigError("latitude out of range");
  if (!(lon >= -180.0 && lon <= 180.0))
    throw ConfigError("longitude out of range");

  GeoCell cell;
  cell.precision = precision;
  cell.code.reserve(static_cast<std::size_t>(precision));
  double lat_lo = -90.0, lat_hi = 90.0;
  double lon_lo = -180.0, lon_hi = 180.0;

  bool lon_turn = true;
  int bits = 0, value = 0;
  while (static_cast<int>(cell.code.size()) < precision) {
    if (lon_turn) {
      const double mid = (lon_lo + lon_hi) / 2.0;
      if (lon >= mid) {
        value = (value << 1) | 1;
        lon_lo = mid;
      } else {
        value <<= 1;
        lon_hi = mid;
      }
    } else {
      const double mid = (lat_lo + lat_hi) / 2.0;
      if (lat >= mid) {
        value = (value << 1) | 1;
        lat_lo = mid;
      } else {
        value <<= 1;
        lat_hi = mid;
      }
    }
    lon_turn = !lon_turn;
    if (++bits == 5) {
      cell.code.push_back(kAlphabet[value]);
      bits = 0;
      value = 0;
    }
  }
  cell.lat_min = lat_lo;
  cell.lat_max = lat_hi;
  cell.lon_min = lon_lo;
  cell.lon_max = lon_hi;
  return cell;
}

GeoCell cell_bounds(const std::string& code) {
  if (code.empty()) throw ConfigError("empty geohash code");
  if (static_cast<int>(code.size()) > kMaxPrecision)
    throw ConfigError("geohash code longer than 12 characters");

  GeoCell cell;
  cell.code = code;
  cell.precision = static_cast<int>(code.size());
  double lat_lo = -90.0, lat_hi = 90.0;
  double lon_lo = -180.0, lon_hi = 180.0;

  bool lon_turn = true;
  for (char c : code) {
    const int v = (static_cast<unsigned char>(c) < 128)
                      ? kDecode[static_cast<unsigned char>(c)]
                      : -1;
    if (v < 0)
      throw DataError(std::string("invalid geohash character '") + c + "'");
    for (int bit = 4; bit >= 0; --bit) {
      const int b = (v >> bit) & 1;
      if (lon_turn) {
        const double mid = (lon_lo + lon_hi) / 2.0;
        (b ? lon_lo : lon_hi) = mid;
      } else {
        const double mid = (lat_lo + lat_hi) / 2.0;
        (b ? lat_lo : lat_hi) = mid;
      }
      lon_turn = !lon_turn;
    }
  }
  cell.lat_min = lat_lo;
  cell.lat_max = lat_hi;
  cell.lon_min = lon_lo;
  cell.lon_max = lon_hi;
  return cell;
}

std::pair<double, double> cell_spans(int precision) {
  if (precision < 1 || precision > kMaxPrecision)
    throw ConfigError("geohash precision must be in 1..12");
  const int total_bits = 5 * precision;
  const int lon_bits = (total_bits + 1) / 2;
  const int lat_bits = total_bits / 2;
  return {180.0 / std::exp2(lat_bits), 360.0 / std::exp2(lon_bits)};
}

std::pair<double, double> cell_dimensions(int precision, double lat) {
  const auto [dlat, dlon] = cell_spans(precision);
  // Southern edge of the band containing lat; the topmost band degenerates.
  double band = std::floor((lat + 90.0) / dlat);
  const double max_band = std::floor(180.0 / dlat) - 1.0;
  band = std::min(std::max(band, 0.0), max_band);
  const double lat_south = band * dlat - 90.0;

  const double height = dlat * geo::kMetersPerDegLat;
  const double width =
      dlon * geo::kMetersPerDegLat * std::cos(lat_south * geo::kDegToRad);
  return {width, height};
}

}  // namespace trajmap::geohash
