#include "safeseg/label_map.hpp"

#include <array>

#include "safeseg/errors.hpp"
#include "safeseg/png_io.hpp"

namespace safeseg {

LabelMap load_label_map(const std::filesystem::path& path,
                        const LabelHierarchy& hierarchy) {
  png_io::GrayImage image = png_io::read_gray(path);

  LabelMap map;
  map.width = image.width;
  map.height = image.height;
  map.pixels.resize(image.pixels.size());

  const auto& raster_map = hierarchy.raster_map();
  std::uint32_t ignore = hierarchy.ignore_raster_id();

  auto unknown = [&](std::uint16_t raw) {
    return ValidationError("unknown label value " + std::to_string(raw) +
                           " in " + path.string());
  };

  // 8-bit rasters go through a flat lookup table; anything else hits the map.
  if (image.bit_depth == 8) {
    std::array<ClassId, 256> lut;
    std::array<bool, 256> known{};
    lut.fill(kIgnoreClass);
    if (ignore < 256) known[ignore] = true;
    for (const auto& [raster, id] : raster_map) {
      if (raster < 256) {
        lut[raster] = id;
        known[raster] = true;
      }
    }
    for (std::size_t i = 0; i < image.pixels.size(); ++i) {
      std::uint16_t raw = image.pixels[i];
      if (!known[raw]) throw unknown(raw);
      map.pixels[i] = lut[raw];
    }
  } else {
    for (std::size_t i = 0; i < image.pixels.size(); ++i) {
      std::uint16_t raw = image.pixels[i];
      if (raw == ignore) {
        map.pixels[i] = kIgnoreClass;
        continue;
      }
      auto it = raster_map.find(raw);
      if (it == raster_map.end()) throw unknown(raw);
      map.pixels[i] = it->second;
    }
  }
  return map;
}

void save_label_map(const std::filesystem::path& path, const LabelMap& raw,
                    int compression_level) {
  if (raw.pixels.size() != std::size_t(raw.width) * raw.height)
    throw ValidationError("label buffer size does not match dimensions");
  png_io::write_gray8(path, raw.width, raw.height, raw.pixels.data(),
                      compression_level);
}

}  // namespace safeseg
