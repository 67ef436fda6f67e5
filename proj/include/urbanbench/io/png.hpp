#pragma once

#include <png.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "urbanbench/core/error.hpp"
#include "urbanbench/core/raster.hpp"
#include "urbanbench/geom/types.hpp"
#include "urbanbench/io/geojson.hpp"

namespace urbanbench::io {

// Grayscale PNG samples, 8 or 16 bits deep.
struct PngData {
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  std::vector<std::uint16_t> samples;  // row-major
};

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

[[noreturn]] inline void png_error_fn(png_structp png, png_const_charp msg) {
  *static_cast<std::string*>(png_get_error_ptr(png)) = msg;
  png_longjmp(png, 1);
}

inline void png_warning_fn(png_structp, png_const_charp) {}

}  // namespace detail

inline void write_png(const std::filesystem::path& path, const PngData& img) {
  require(img.bit_depth == 8 || img.bit_depth == 16, "PNG bit depth must be 8 or 16");
  require(img.width > 0 && img.height > 0 && img.samples.size() == static_cast<std::size_t>(img.width) * img.height,
          "PNG dimensions do not match the samples");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::unique_ptr<std::FILE, detail::FileCloser> f(std::fopen(path.string().c_str(), "wb"));
  if (!f) fail(ErrorCode::kMissingFile, "cannot write " + path.string());
  std::string err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, detail::png_error_fn, detail::png_warning_fn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(ErrorCode::kMissingFile, "libpng initialisation failed");
  }
  const int bytes = img.bit_depth / 8;
  std::vector<png_byte> row(static_cast<std::size_t>(img.width) * bytes);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::kMissingFile, "writing " + path.string() + ": " + err);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, img.width, img.height, img.bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const std::uint16_t v = img.samples[static_cast<std::size_t>(r) * img.width + c];
      if (bytes == 1) {
        row[c] = static_cast<png_byte>(v);
      } else {
        row[2 * c] = static_cast<png_byte>(v >> 8);  // PNG is big-endian
        row[2 * c + 1] = static_cast<png_byte>(v & 0xff);
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

inline PngData read_png(const std::filesystem::path& path) {
  std::unique_ptr<std::FILE, detail::FileCloser> f(std::fopen(path.string().c_str(), "rb"));
  if (!f) fail(ErrorCode::kMissingFile, "cannot open " + path.string());
  png_byte sig[8];
  if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8))
    fail(ErrorCode::kSchema, path.string() + " is not a PNG file");
  std::string err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, detail::png_error_fn, detail::png_warning_fn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(ErrorCode::kSchema, "libpng initialisation failed");
  }
  PngData out;
  std::vector<png_byte> row;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::kSchema, "reading " + path.string() + ": " + err);
  }
  png_init_io(png, f.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color != PNG_COLOR_TYPE_GRAY || (depth != 8 && depth != 16) ||
      png_get_interlace_type(png, info) != PNG_INTERLACE_NONE) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::kSchema, path.string() + ": expected a non-interlaced 8 or 16 bit grayscale PNG");
  }
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.bit_depth = depth;
  out.samples.resize(static_cast<std::size_t>(out.width) * out.height);
  row.resize(png_get_rowbytes(png, info));
  for (int r = 0; r < out.height; ++r) {
    png_read_row(png, row.data(), nullptr);
    for (int c = 0; c < out.width; ++c)
      out.samples[static_cast<std::size_t>(r) * out.width + c] =
          depth == 8 ? row[c] : static_cast<std::uint16_t>((row[2 * c] << 8) | row[2 * c + 1]);
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

// Geo-referencing and value mapping stored next to a raster as <name>.json:
// world value = sample * scale + offset.
struct RasterMeta {
  geom::GeoGrid grid;
  int bit_depth = 8;
  double scale = 1.0;
  double offset = 0.0;
  std::string kind;
};

inline std::filesystem::path sidecar_path(const std::filesystem::path& png) {
  auto p = png;
  return p.replace_extension(".json");
}

inline json meta_to_json(const RasterMeta& m) {
  return {{"kind", m.kind},
          {"origin", {m.grid.origin.x, m.grid.origin.y}},
          {"resolution", m.grid.resolution},
          {"width", m.grid.width},
          {"height", m.grid.height},
          {"bit_depth", m.bit_depth},
          {"scale", m.scale},
          {"offset", m.offset}};
}

inline RasterMeta meta_from_json(const json& j, const std::string& where) {
  auto num = [&](const char* k) {
    if (!j.contains(k) || !j[k].is_number()) fail(ErrorCode::kSchema, where + ": sidecar needs numeric '" + k + "'");
    return j[k].get<double>();
  };
  RasterMeta m;
  if (!j.contains("origin") || !j["origin"].is_array() || j["origin"].size() != 2 || !j["origin"][0].is_number() ||
      !j["origin"][1].is_number())
    fail(ErrorCode::kSchema, where + ": sidecar needs origin [x, y]");
  m.grid.origin = {j["origin"][0].get<double>(), j["origin"][1].get<double>()};
  m.grid.resolution = num("resolution");
  m.grid.width = static_cast<int>(num("width"));
  m.grid.height = static_cast<int>(num("height"));
  m.bit_depth = static_cast<int>(num("bit_depth"));
  m.scale = j.contains("scale") ? num("scale") : 1.0;
  m.offset = j.contains("offset") ? num("offset") : 0.0;
  m.kind = j.value("kind", "");
  if (!(m.grid.resolution > 0.0) || m.grid.width <= 0 || m.grid.height <= 0)
    fail(ErrorCode::kSchema, where + ": sidecar grid is invalid");
  return m;
}

// Writes <path> and its sidecar. Values are stored as round((v - offset) / scale).
template <typename T>
void save_raster(const std::filesystem::path& path, const Raster<T>& img, RasterMeta meta) {
  require(img.width() == meta.grid.width && img.height() == meta.grid.height, "raster does not match its grid");
  require(meta.scale > 0.0, "raster scale must be positive");
  const double top = meta.bit_depth == 8 ? 255.0 : 65535.0;
  PngData d{img.width(), img.height(), meta.bit_depth, std::vector<std::uint16_t>(img.size())};
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double q = std::round((static_cast<double>(img[i]) - meta.offset) / meta.scale);
    if (!(q >= 0.0 && q <= top))
      fail(ErrorCode::kInvalidArgument, path.string() + ": value " + std::to_string(static_cast<double>(img[i])) +
                                            " does not fit a " + std::to_string(meta.bit_depth) + " bit sample");
    d.samples[i] = static_cast<std::uint16_t>(q);
  }
  write_png(path, d);
  write_text(sidecar_path(path), meta_to_json(meta).dump(1) + "\n");
}

// Intensities in [0, 1] quantized to 16 bits.
template <typename T>
void save_intensity(const std::filesystem::path& path, const Raster<T>& img, const geom::GeoGrid& grid,
                    const std::string& kind) {
  Raster<double> clamped(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) clamped[i] = std::clamp(static_cast<double>(img[i]), 0.0, 1.0);
  save_raster(path, clamped, {grid, 16, 1.0 / 65535.0, 0.0, kind});
}

template <typename T>
struct LoadedRaster {
  Raster<T> raster;
  RasterMeta meta;
};

// Reads a PNG and its sidecar; a missing sidecar gives a unit grid at the
// origin.
template <typename T>
LoadedRaster<T> load_raster(const std::filesystem::path& path) {
  const PngData d = read_png(path);
  RasterMeta meta;
  const auto side = sidecar_path(path);
  if (std::filesystem::exists(side)) {
    meta = meta_from_json(read_json(side), side.string());
    if (meta.grid.width != d.width || meta.grid.height != d.height)
      fail(ErrorCode::kSchema, side.string() + ": sidecar size does not match the PNG");
  } else {
    meta.grid = {{0.0, 0.0}, 1.0, d.width, d.height};
  }
  meta.bit_depth = d.bit_depth;
  LoadedRaster<T> out{Raster<T>(d.width, d.height), meta};
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    const double v = d.samples[i] * meta.scale + meta.offset;
    if constexpr (std::is_integral_v<T>)
      out.raster[i] = static_cast<T>(std::llround(v));
    else
      out.raster[i] = static_cast<T>(v);
  }
  return out;
}

}  // namespace urbanbench::io
