#include "torusdyn/png.hpp"

#include <png.h>

#include <csetjmp>
#include <cstring>
#include <stdexcept>

namespace torusdyn {
namespace {

void append(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), len);
}

void no_flush(png_structp) {}

void on_warning(png_structp, png_const_charp) {}

[[noreturn]] void on_error(png_structp png, png_const_charp) { png_longjmp(png, 1); }

std::string encode(int width, int height, const std::vector<std::uint8_t>& pixels, int color_type,
                   const std::vector<std::array<std::uint8_t, 3>>* palette) {
  if (width < 1 || height < 1 || pixels.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("png: pixel buffer does not match the image size");
  }
  std::vector<png_color> colors;
  if (palette) {
    for (const auto& c : *palette) colors.push_back({c[0], c[1], c[2]});
  }
  std::string out;
  // libpng reports errors by longjmp; nothing with a destructor is created
  // between setjmp and the end of the writer calls.
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, on_error, on_warning);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("png: encoding failed");
  }
  {
    png_set_write_fn(png, &out, append, no_flush);
    png_set_compression_level(png, 6);
    png_set_filter(png, 0, PNG_FILTER_NONE);
    png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    if (palette) {
      png_set_PLTE(png, info, colors.data(), static_cast<int>(colors.size()));
    }
    png_write_info(png, info);
    for (int j = 0; j < height; ++j) {
      png_write_row(png, const_cast<png_bytep>(pixels.data() + static_cast<std::size_t>(j) * width));
    }
    png_write_end(png, nullptr);
  }
  png_destroy_write_struct(&png, &info);
  return out;
}

struct Reader {
  const std::string* bytes;
  std::size_t pos = 0;
};

void consume(png_structp png, png_bytep data, png_size_t len) {
  auto* r = static_cast<Reader*>(png_get_io_ptr(png));
  if (r->pos + len > r->bytes->size()) png_error(png, "truncated stream");
  std::memcpy(data, r->bytes->data() + r->pos, len);
  r->pos += len;
}

}  // namespace

std::string encode_gray_png(int width, int height, const std::vector<std::uint8_t>& pixels) {
  return encode(width, height, pixels, PNG_COLOR_TYPE_GRAY, nullptr);
}

std::string encode_palette_png(int width, int height, const std::vector<std::uint8_t>& pixels,
                               const std::vector<std::array<std::uint8_t, 3>>& palette) {
  for (auto p : pixels) {
    if (p >= palette.size()) throw std::invalid_argument("png: palette index out of range");
  }
  return encode(width, height, pixels, PNG_COLOR_TYPE_PALETTE, &palette);
}

DecodedPng decode_png(const std::string& bytes) {
  Reader reader{&bytes};
  DecodedPng out;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, on_error, on_warning);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("png: decoding failed");
  }
  {
    png_set_read_fn(png, &reader, consume);
    png_read_info(png, info);
    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.color_type = png_get_color_type(png, info);
    if (png_get_bit_depth(png, info) != 8 ||
        (out.color_type != PNG_COLOR_TYPE_GRAY && out.color_type != PNG_COLOR_TYPE_PALETTE)) {
      // left empty: reported below
    } else {
      out.pixels.resize(static_cast<std::size_t>(out.width) * out.height);
      for (int j = 0; j < out.height; ++j) {
        png_read_row(png, out.pixels.data() + static_cast<std::size_t>(j) * out.width, nullptr);
      }
      png_read_end(png, nullptr);
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (out.pixels.empty()) throw std::runtime_error("png: only 8-bit gray or paletted images are supported");
  return out;
}

}  // namespace torusdyn
