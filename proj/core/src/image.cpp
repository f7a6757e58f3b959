#include "caedge/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace caedge {

namespace {

std::uint8_t clamp_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

// 90 degrees clockwise: output(x, h-1-y) = input(y, x).
template <typename Img>
Img rotate_cw(const Img& in) {
    Img out;
    out.width = in.height;
    out.height = in.width;
    out.data.resize(in.data.size());
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < in.width; ++x)
            out.data[static_cast<std::size_t>(x) * out.width + (in.height - 1 - y)] =
                in.data[static_cast<std::size_t>(y) * in.width + x];
    return out;
}

}  // namespace

GrayImage to_grayscale(const RgbImage& rgb) {
    if (rgb.data.size() != rgb.pixel_count() * 3)
        throw std::invalid_argument("to_grayscale: expected 3-channel data");
    GrayImage out(rgb.width, rgb.height);
    for (std::size_t i = 0; i < rgb.pixel_count(); ++i) {
        const double luma = 0.299 * rgb.data[3 * i] + 0.587 * rgb.data[3 * i + 1] +
                            0.114 * rgb.data[3 * i + 2];
        out.data[i] = clamp_u8(std::floor(luma + 0.5));
    }
    return out;
}

GrayImage standardize_orientation(const GrayImage& img) {
    return img.height > img.width ? rotate_cw(img) : img;
}

EdgeMap standardize_orientation(const EdgeMap& map) {
    return map.height > map.width ? rotate_cw(map) : map;
}

GrayImage resize_max_side(const GrayImage& img, int max_side) {
    if (img.empty()) throw std::invalid_argument("resize_max_side: empty image");
    if (max_side < 1) throw std::invalid_argument("resize_max_side: max_side must be >= 1");

    int out_w, out_h;
    if (img.width >= img.height) {
        out_w = max_side;
        out_h = std::max(1, static_cast<int>(std::floor(
                                static_cast<double>(img.height) * max_side / img.width + 0.5)));
    } else {
        out_h = max_side;
        out_w = std::max(1, static_cast<int>(std::floor(
                                static_cast<double>(img.width) * max_side / img.height + 0.5)));
    }
    if (out_w == img.width && out_h == img.height) return img;

    GrayImage out(out_w, out_h);
    const double sx = static_cast<double>(img.width) / out_w;
    const double sy = static_cast<double>(img.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        // center-aligned sampling, clamped at the borders
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height - 1.0);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double wy = fy - y0;
        for (int x = 0; x < out_w; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width - 1.0);
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double wx = fx - x0;
            const double v = (1.0 - wy) * ((1.0 - wx) * img.at(y0, x0) + wx * img.at(y0, x1)) +
                             wy * ((1.0 - wx) * img.at(y1, x0) + wx * img.at(y1, x1));
            out.at(y, x) = clamp_u8(std::floor(v + 0.5));
        }
    }
    return out;
}

GrayImage pad_zero(const GrayImage& img, int radius) {
    if (radius < 0) throw std::invalid_argument("pad_zero: negative radius");
    GrayImage out(img.width + 2 * radius, img.height + 2 * radius, 0);
    for (int y = 0; y < img.height; ++y)
        std::copy_n(img.data.begin() + static_cast<std::size_t>(y) * img.width, img.width,
                    out.data.begin() + static_cast<std::size_t>(y + radius) * out.width + radius);
    return out;
}

GrayImage letterbox_square(const GrayImage& img, int side) {
    if (img.width > side || img.height > side)
        throw std::invalid_argument("letterbox_square: image larger than target side");
    GrayImage out(side, side, 0);
    const int off_x = (side - img.width) / 2;
    const int off_y = (side - img.height) / 2;
    for (int y = 0; y < img.height; ++y)
        std::copy_n(img.data.begin() + static_cast<std::size_t>(y) * img.width, img.width,
                    out.data.begin() + static_cast<std::size_t>(y + off_y) * side + off_x);
    return out;
}

ProbabilityMap average_annotations(const std::vector<EdgeMap>& maps) {
    if (maps.empty()) throw std::invalid_argument("average_annotations: no maps");
    const int w = maps.front().width;
    const int h = maps.front().height;
    for (const auto& m : maps)
        if (m.width != w || m.height != h)
            throw std::invalid_argument("average_annotations: dimension mismatch");

    ProbabilityMap out(w, h);
    for (const auto& m : maps)
        for (std::size_t i = 0; i < m.data.size(); ++i) out.data[i] += m.data[i];
    const double inv = 1.0 / maps.size();
    for (auto& v : out.data) v *= inv;
    return out;
}

EdgeMap threshold_probability(const ProbabilityMap& pmap, double p) {
    EdgeMap out(pmap.width, pmap.height);
    for (std::size_t i = 0; i < pmap.data.size(); ++i) out.data[i] = pmap.data[i] > p ? 1 : 0;
    return out;
}

GrayImage prepare_image(const GrayImage& img, int max_side, bool square) {
    GrayImage out = resize_max_side(standardize_orientation(img), max_side);
    if (square) out = letterbox_square(out, max_side);
    return out;
}

EdgeMap prepare_annotation(const EdgeMap& map, int max_side, bool square) {
    GrayImage gray(map.width, map.height);
    for (std::size_t i = 0; i < map.data.size(); ++i) gray.data[i] = map.data[i] ? 255 : 0;
    gray = prepare_image(gray, max_side, square);
    EdgeMap out(gray.width, gray.height);
    for (std::size_t i = 0; i < gray.data.size(); ++i) out.data[i] = gray.data[i] > 0 ? 1 : 0;
    return out;
}

}  // namespace caedge
