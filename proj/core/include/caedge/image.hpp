#pragma once

#include <cstdint>
#include <vector>

namespace caedge {

/// Row-major 8-bit grayscale image.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t pixel_count() const { return data.size(); }
    bool empty() const { return data.empty(); }

    bool operator==(const GrayImage&) const = default;
};

/// Interleaved 8-bit RGB image (R,G,B per pixel).
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

/// Binary edge map, one byte per pixel, values in {0,1}.
struct EdgeMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    EdgeMap() = default;
    EdgeMap(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t pixel_count() const { return data.size(); }
    bool empty() const { return data.empty(); }

    std::size_t edge_count() const {
        std::size_t n = 0;
        for (auto v : data) n += v;
        return n;
    }

    bool operator==(const EdgeMap&) const = default;
};

/// Per-pixel edge probability in [0,1], the mean of several annotators' binary maps.
struct ProbabilityMap {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    ProbabilityMap() = default;
    ProbabilityMap(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0.0) {}

    double at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
    double& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
};

/// BT.601 luma conversion, round(0.299 R + 0.587 G + 0.114 B) per pixel.
/// Throws std::invalid_argument if the buffer is not 3 channels worth of data.
GrayImage to_grayscale(const RgbImage& rgb);

/// Rotates portrait images (height > width) 90 degrees clockwise so that
/// width >= height afterwards. Landscape and square inputs pass through.
GrayImage standardize_orientation(const GrayImage& img);
EdgeMap standardize_orientation(const EdgeMap& map);

/// Scales so the larger side equals max_side, keeping aspect ratio. The smaller
/// side becomes round(small * max_side / large), at least 1. Bilinear sampling,
/// intensities rounded half-up. Throws on an empty image or max_side < 1.
GrayImage resize_max_side(const GrayImage& img, int max_side);

/// Surrounds the image with a zero border of the given radius on every side.
GrayImage pad_zero(const GrayImage& img, int radius);

/// Centers the image on a side x side black canvas. Requires both dimensions <= side.
GrayImage letterbox_square(const GrayImage& img, int side);

/// Per-pixel mean of binary maps. All maps must share dimensions; at least one map.
ProbabilityMap average_annotations(const std::vector<EdgeMap>& maps);

/// Marks pixels whose probability strictly exceeds p.
EdgeMap threshold_probability(const ProbabilityMap& pmap, double p);

/// Standard input pipeline for an image: orientation, then resize, then the
/// optional square letterbox.
GrayImage prepare_image(const GrayImage& img, int max_side, bool square = false);

/// Same geometry pipeline for an annotator map. The map rides through the
/// grayscale resampler as a {0,255} image and every nonzero result is an edge,
/// so thin lines survive downscaling.
EdgeMap prepare_annotation(const EdgeMap& map, int max_side, bool square = false);

}  // namespace caedge
