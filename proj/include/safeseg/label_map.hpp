#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "safeseg/hierarchy.hpp"

namespace safeseg {

// Rectangular grid of per-pixel class values, row major.
//
// Two interpretations share this type: raw raster values as stored on disk,
// and dense ClassIds (with kIgnoreClass for ignored pixels) after remapping
// through a hierarchy's pixel-id table. Loaders return the remapped form.
struct LabelMap {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint16_t> pixels;

  LabelMap() = default;
  LabelMap(std::uint32_t w, std::uint32_t h, std::uint16_t fill = 0)
      : width(w), height(h), pixels(std::size_t(w) * h, fill) {}

  std::size_t size() const { return pixels.size(); }
  std::uint16_t at(std::uint32_t x, std::uint32_t y) const {
    return pixels[std::size_t(y) * width + x];
  }
  std::uint16_t& at(std::uint32_t x, std::uint32_t y) {
    return pixels[std::size_t(y) * width + x];
  }

  bool same_shape(const LabelMap& other) const {
    return width == other.width && height == other.height;
  }
};

// Decodes a single-channel 8/16-bit PNG and remaps raster values to dense
// ClassIds via the hierarchy (ignore raster value -> kIgnoreClass).
// Throws ValidationError on multi-channel files, undecodable data, or pixel
// values missing from the hierarchy's map; IoError if the file cannot be
// opened.
LabelMap load_label_map(const std::filesystem::path& path,
                        const LabelHierarchy& hierarchy);

// Writes raw raster values as an 8-bit grayscale PNG. Values must fit a byte.
void save_label_map(const std::filesystem::path& path, const LabelMap& raw,
                    int compression_level = 6);

}  // namespace safeseg
