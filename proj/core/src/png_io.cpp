#include "trajmap/png_io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

#include "trajmap/errors.hpp"

namespace trajmap::png {

namespace {

constexpr unsigned char kSignature[8] = {0x89, 'P', 'N', 'G',
                                         '\r', '\n', 0x1a, '\n'};

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>(v & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) |
         (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) | p[3];
}

void put_chunk(std::string& out, const char type[4], const std::string& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t crc_start = out.size();
  out.append(type, 4);
  out.append(data);
  const auto crc = crc32(
      0, reinterpret_cast<const Bytef*>(out.data() + crc_start),
      static_cast<uInt>(out.size() - crc_start));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

int paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

}  // namespace

std::string encode(const raster::TileRaster& img) {
  if (img.channels != 1 && img.channels != 3)
    throw ConfigError("png encoder supports 1 or 3 channels");
  if (img.width < 1 || img.height < 1) throw ConfigError("empty raster");

  std::string raw;
  const std::size_t stride =
      static_cast<std::size_t>(img.width) * img.channels;
  raw.reserve((stride + 1) * img.height);
  for (int r = 0; r < img.height; ++r) {
    raw.push_back('\0');  // filter type 0
    raw.append(reinterpret_cast<const char*>(img.pixels.data()) + r * stride,
               stride);
  }

  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::string idat(bound, '\0');
  if (compress2(reinterpret_cast<Bytef*>(idat.data()), &bound,
                reinterpret_cast<const Bytef*>(raw.data()),
                static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw DataError("zlib compression failed");
  idat.resize(bound);

  std::string ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(img.width));
  put_u32(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr.push_back(8);                                  // bit depth
  ihdr.push_back(img.channels == 1 ? 0 : 2);          // color type
  ihdr.push_back(0);                                  // compression
  ihdr.push_back(0);                                  // filter
  ihdr.push_back(0);                                  // interlace

  std::string out(reinterpret_cast<const char*>(kSignature), 8);
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", idat);
  put_chunk(out, "IEND", "");
  return out;
}

void write_file(const raster::TileRaster& img, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open for writing: " + path);
  const auto bytes = encode(img);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw DataError("write failed: " + path);
}

raster::TileRaster decode(const std::string& bytes) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 8 || std::memcmp(p, kSignature, 8) != 0)
    throw DataError("not a png file");

  std::size_t pos = 8;
  std::uint32_t width = 0, height = 0;
  int channels = 0;
  std::string idat;
  bool saw_ihdr = false;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t len = get_u32(p + pos);
    if (pos + 12 + len > bytes.size()) throw DataError("truncated png chunk");
    const char* type = bytes.data() + pos + 4;
    const unsigned char* data = p + pos + 8;
    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) throw DataError("bad IHDR length");
      width = get_u32(data);
      height = get_u32(data + 4);
      const int depth = data[8], color = data[9];
      if (depth != 8) throw DataError("unsupported png bit depth");
      if (color == 0) channels = 1;
      else if (color == 2) channels = 3;
      else throw DataError("unsupported png color type");
      if (data[10] != 0 || data[11] != 0 || data[12] != 0)
        throw DataError("unsupported png encoding");
      saw_ihdr = true;
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.append(reinterpret_cast<const char*>(data), len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      break;
    }
    pos += 12 + len;
  }
  if (!saw_ihdr || width == 0 || height == 0)
    throw DataError("png missing IHDR");

  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  const std::size_t raw_size = (stride + 1) * height;
  std::string raw(raw_size, '\0');
  uLongf out_len = static_cast<uLongf>(raw_size);
  if (uncompress(reinterpret_cast<Bytef*>(raw.data()), &out_len,
                 reinterpret_cast<const Bytef*>(idat.data()),
                 static_cast<uLong>(idat.size())) != Z_OK ||
      out_len != raw_size)
    throw DataError("png inflate failed");

  raster::TileRaster img;
  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  img.channels = channels;
  img.mode = channels == 1 ? raster::Mode::grayscale : raster::Mode::speed;
  img.pixels.resize(stride * height);

  const int bpp = channels;  // bytes per pixel at depth 8
  for (std::uint32_t r = 0; r < height; ++r) {
    const auto* src =
        reinterpret_cast<const unsigned char*>(raw.data()) + r * (stride + 1);
    const int filter = src[0];
    auto* dst = img.pixels.data() + r * stride;
    const auto* prev = r > 0 ? dst - stride : nullptr;
    for (std::size_t i = 0; i < stride; ++i) {
      const int x = src[1 + i];
      const int a = i >= static_cast<std::size_t>(bpp) ? dst[i - bpp] : 0;
      const int b = prev ? prev[i] : 0;
      const int c =
          (prev && i >= static_cast<std::size_t>(bpp)) ? prev[i - bpp] : 0;
      int v;
      switch (filter) {
        case 0: v = x; break;
        case 1: v = x + a; break;
        case 2: v = x + b; break;
        case 3: v = x + (a + b) / 2; break;
        case 4: v = x + paeth(a, b, c); break;
        default: throw DataError("unsupported png filter type");
      }
      dst[i] = static_cast<std::uint8_t>(v & 0xff);
    }
  }
  return img;
}

raster::TileRaster read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open: " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());
  return decode(bytes);
}

}  // namespace trajmap::png
