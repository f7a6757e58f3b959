#pragma once

#include "caedge/image.hpp"

namespace caedge {

/// Smoothing sigma and the hysteresis thresholds, applied to the Sobel
/// gradient magnitude of the [0,255] image. Defaults are sigma 1 with
/// thresholds at 10% and 20% of 255.
struct CannyConfig {
    double sigma = 1.0;
    double low = 25.5;
    double high = 51.0;
};

/// Classical Canny: Gaussian smoothing, 3x3 Sobel gradients, non-maximum
/// suppression along the quantized gradient direction, double threshold, and
/// hysteresis keeping weak edges 8-connected to strong ones.
/// Throws std::invalid_argument on an empty image or low > high.
EdgeMap canny(const GrayImage& img, const CannyConfig& config = {});

}  // namespace caedge
