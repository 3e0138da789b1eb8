#pragma once

// Toy sample images: 32x32 8-bit grayscale PNG.
//
// Pixels 0..7 of row 0 hold x and pixels 8..15 hold y, each as a big-endian
// two's-complement int64 of round(value * 1e6). The remaining pixels are a
// picture of the point (a 3x3 white dot on the [-8, 8]² plane mapped onto rows
// 2..31) and carry no data. Decoding is exact to 6 decimal places.

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "genbench/toy/flow.hpp"

namespace genbench::toy {

inline constexpr int kImageSide = 32;
inline constexpr double kFixedPointScale = 1e6;

using GrayImage = std::array<std::uint8_t, kImageSide * kImageSide>;

GrayImage encode_sample(const Vec2& point);
Vec2 decode_sample(const GrayImage& image);

void write_png(const std::filesystem::path& path, const GrayImage& image);
GrayImage read_png(const std::filesystem::path& path);

}  // namespace genbench::toy
