#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace torusdyn {

/// 8-bit grayscale PNG, row-major pixels. No time or text chunks, fixed
/// compression settings: equal inputs give equal bytes.
std::string encode_gray_png(int width, int height, const std::vector<std::uint8_t>& pixels);

/// 8-bit paletted PNG; pixels index into `palette` (RGB triples).
std::string encode_palette_png(int width, int height, const std::vector<std::uint8_t>& pixels,
                               const std::vector<std::array<std::uint8_t, 3>>& palette);

struct DecodedPng {
  int width = 0;
  int height = 0;
  int color_type = 0;  // libpng PNG_COLOR_TYPE_*
  std::vector<std::uint8_t> pixels;  // gray levels or palette indices
};

/// Reads back 8-bit gray or paletted PNGs written by the encoders.
DecodedPng decode_png(const std::string& bytes);

}  // namespace torusdyn
