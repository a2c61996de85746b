#include "safeseg/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <vector>

#include "safeseg/errors.hpp"

namespace safeseg::png_io {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

GrayImage read_gray(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open PNG: " + path.string());

  png_byte header[8] = {};
  if (std::fread(header, 1, 8, file.get()) != 8 || png_sig_cmp(header, 0, 8))
    throw ValidationError("not a PNG file: " + path.string());

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("png_create_info_struct failed");
  }

  std::vector<std::uint8_t> raw;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ValidationError("failed to decode PNG: " + path.string());
  }

  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  png_uint_32 width = png_get_image_width(png, info);
  png_uint_32 height = png_get_image_height(png, info);
  int bit_depth = png_get_bit_depth(png, info);
  int color_type = png_get_color_type(png, info);

  // Label rasters must be single-channel. Palette images decode through
  // their index values (the palette is a display aid, not the label).
  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    png_set_packing(png);
    bit_depth = 8;
  } else if (color_type != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ValidationError("expected grayscale or palette PNG: " + path.string());
  } else if (bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
    bit_depth = 8;
  }
  png_read_update_info(png, info);

  std::size_t row_bytes = png_get_rowbytes(png, info);
  raw.assign(row_bytes * height, 0);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = raw.data() + y * row_bytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  GrayImage out;
  out.width = width;
  out.height = height;
  out.bit_depth = bit_depth;
  out.pixels.resize(std::size_t(width) * height);
  if (bit_depth == 16) {
    // PNG stores 16-bit samples big-endian.
    for (std::size_t i = 0; i < out.pixels.size(); ++i)
      out.pixels[i] = std::uint16_t((raw[2 * i] << 8) | raw[2 * i + 1]);
  } else {
    for (std::size_t i = 0; i < out.pixels.size(); ++i) out.pixels[i] = raw[i];
  }
  return out;
}

namespace {

void write_png(const std::filesystem::path& path, std::uint32_t width,
               std::uint32_t height, int color_type, int bit_depth,
               const std::uint8_t* data, std::size_t row_bytes,
               int compression_level) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot create PNG: " + path.string());

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("png_create_info_struct failed");
  }

  std::vector<png_bytep> rows(height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed to encode PNG: " + path.string());
  }

  png_init_io(png, file.get());
  png_set_compression_level(png, compression_level);
  png_set_IHDR(png, info, width, height, bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::uint32_t y = 0; y < height; ++y)
    rows[y] = const_cast<png_bytep>(data + std::size_t(y) * row_bytes);
  png_write_image(png, rows.data());
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

void write_gray8(const std::filesystem::path& path, std::uint32_t width,
                 std::uint32_t height, const std::uint16_t* pixels,
                 int compression_level) {
  std::size_t count = std::size_t(width) * height;
  std::vector<std::uint8_t> bytes(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (pixels[i] > 255)
      throw ValidationError("pixel value " + std::to_string(pixels[i]) +
                            " does not fit an 8-bit raster");
    bytes[i] = std::uint8_t(pixels[i]);
  }
  write_png(path, width, height, PNG_COLOR_TYPE_GRAY, 8, bytes.data(), width,
            compression_level);
}

void write_rgb8(const std::filesystem::path& path, const RgbImage& image,
                int compression_level) {
  if (image.pixels.size() != std::size_t(image.width) * image.height * 3)
    throw ValidationError("RGB buffer size does not match dimensions");
  write_png(path, image.width, image.height, PNG_COLOR_TYPE_RGB, 8,
            image.pixels.data(), std::size_t(image.width) * 3,
            compression_level);
}

}  // namespace safeseg::png_io
