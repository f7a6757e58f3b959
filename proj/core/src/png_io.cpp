#include "caedge/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <stdexcept>
#include <vector>

namespace caedge {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::string& path, const char* what) {
    throw std::runtime_error(path + ": " + what);
}

}  // namespace

RgbImage load_image(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail(path, "cannot open file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail(path, "png_create_info_struct failed");
    }
    std::vector<png_bytep> rows;
    RgbImage out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "not a valid PNG file");
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);

    // normalize every color type to 8-bit RGB
    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    out.width = static_cast<int>(w);
    out.height = static_cast<int>(h);
    out.data.resize(static_cast<std::size_t>(w) * h * 3);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y)
        rows[y] = out.data.data() + static_cast<std::size_t>(y) * w * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

EdgeMap load_edge_map(const std::string& path) {
    const RgbImage rgb = load_image(path);
    EdgeMap out(rgb.width, rgb.height);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const unsigned sum = rgb.data[3 * i] + rgb.data[3 * i + 1] + rgb.data[3 * i + 2];
        out.data[i] = sum > 0 ? 1 : 0;
    }
    return out;
}

namespace {

void write_png(const std::string& path, int width, int height, int color_type, int channels,
               const std::uint8_t* pixels) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail(path, "cannot open file for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail(path, "png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "PNG write failed");
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
                 color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] =
            const_cast<png_bytep>(pixels + static_cast<std::size_t>(y) * width * channels);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

void save_image(const std::string& path, const GrayImage& img) {
    if (img.empty()) fail(path, "refusing to write empty image");
    write_png(path, img.width, img.height, PNG_COLOR_TYPE_GRAY, 1, img.data.data());
}

void save_image(const std::string& path, const RgbImage& img) {
    if (img.data.empty()) fail(path, "refusing to write empty image");
    write_png(path, img.width, img.height, PNG_COLOR_TYPE_RGB, 3, img.data.data());
}

void save_edge_map(const std::string& path, const EdgeMap& map) {
    if (map.data.empty()) fail(path, "refusing to write empty edge map");
    std::vector<std::uint8_t> pixels(map.data.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = map.data[i] ? 255 : 0;
    write_png(path, map.width, map.height, PNG_COLOR_TYPE_GRAY, 1, pixels.data());
}

}  // namespace caedge
