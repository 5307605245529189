#include "fbmg/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>

namespace fbmg {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_or_throw(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw std::runtime_error("cannot open " + path);
  return f;
}

}  // namespace

std::vector<ImageField> load_image(const std::string& path) {
  FilePtr f = open_or_throw(path, "rb");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw std::runtime_error(path + ": not a PNG file");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("libpng initialisation failed");
  }
  std::vector<ImageField> channels;
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error(path + ": corrupt PNG");
  }
  png_init_io(png, f.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
  if (depth == 16) png_set_swap(png);
  png_read_update_info(png, info);

  const int width = static_cast<int>(png_get_image_width(png, info));
  const int height = static_cast<int>(png_get_image_height(png, info));
  const int nch = png_get_channels(png, info);
  const int out_depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  buffer.resize(stride * height);
  rows.resize(height);
  for (int r = 0; r < height; ++r) rows[r] = buffer.data() + r * stride;
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);

  if (nch != 1 && nch != 3) throw std::runtime_error(path + ": unsupported channel layout");
  const GridShape shape{height, width};
  const double scale = out_depth == 16 ? 65535.0 : 255.0;
  channels.assign(nch, ImageField(shape));
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      for (int k = 0; k < nch; ++k) {
        const std::size_t at = static_cast<std::size_t>(c) * nch + k;
        double v;
        if (out_depth == 16) {
          std::uint16_t word;
          std::memcpy(&word, rows[r] + 2 * at, 2);
          v = word;
        } else {
          v = rows[r][at];
        }
        channels[k](r, c) = v / scale;
      }
    }
  }
  return channels;
}

void save_image(const std::string& path, const std::vector<ImageField>& channels) {
  if (channels.size() != 1 && channels.size() != 3) throw std::invalid_argument("save_image: need 1 or 3 channels");
  const GridShape shape = channels.front().shape;
  for (const ImageField& ch : channels)
    if (!(ch.shape == shape)) throw std::invalid_argument("save_image: channel shapes differ");

  const int nch = static_cast<int>(channels.size());
  std::vector<png_byte> buffer(shape.size() * nch);
  for (std::size_t i = 0; i < shape.size(); ++i) {
    for (int k = 0; k < nch; ++k) {
      const double v = std::clamp(channels[k].values[i], 0.0, 1.0);
      buffer[i * nch + k] = static_cast<png_byte>(std::lround(v * 255.0));
    }
  }
  std::vector<png_bytep> rows(shape.rows);
  for (int r = 0; r < shape.rows; ++r) rows[r] = buffer.data() + static_cast<std::size_t>(r) * shape.cols * nch;

  FilePtr f = open_or_throw(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("failed writing " + path);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, shape.cols, shape.rows, 8, nch == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void save_image(const std::string& path, const ImageField& gray) { save_image(path, std::vector<ImageField>{gray}); }

}  // namespace fbmg
