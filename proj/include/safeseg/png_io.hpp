#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace safeseg::png_io {

struct GrayImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  int bit_depth = 8;  // 8 or 16
  std::vector<std::uint16_t> pixels;
};

struct RgbImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> pixels;  // 3 bytes per pixel, row major

  RgbImage() = default;
  RgbImage(std::uint32_t w, std::uint32_t h)
      : width(w), height(h), pixels(std::size_t(w) * h * 3, 0) {}
};

// Reads a single-channel grayscale PNG. Throws ValidationError for
// non-grayscale color types or corrupt streams, IoError when the file cannot
// be opened. Sub-byte depths are expanded to 8 bits.
GrayImage read_gray(const std::filesystem::path& path);

// Writes 8-bit grayscale. Values must be <= 255.
void write_gray8(const std::filesystem::path& path, std::uint32_t width,
                 std::uint32_t height, const std::uint16_t* pixels,
                 int compression_level = 6);

void write_rgb8(const std::filesystem::path& path, const RgbImage& image,
                int compression_level = 6);

}  // namespace safeseg::png_io
