#pragma once

#include <cstdint>

#include "caedge/image.hpp"

namespace caedge {

/// Pixel counts with "edge" as the positive class.
struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const { return tp + fp + fn + tn; }
};

struct MetricReport {
    double dsc = 0.0;
    double psnr = 0.0;  // +infinity when the maps are identical
    double ssim = 0.0;
    double mse = 0.0;
};

ConfusionCounts confusion(const EdgeMap& detected, const EdgeMap& annotated);

/// Dice similarity 2TP / (2TP + FP + FN). Two empty maps score 1.0: detector
/// and annotation agree there is nothing to find.
double dsc(const EdgeMap& detected, const EdgeMap& annotated);

/// Mean squared error over the maps viewed as {0,255} images.
double mse(const EdgeMap& f, const EdgeMap& g);

/// 10 log10(255^2 / MSE); +infinity when MSE is zero.
double psnr(const EdgeMap& f, const EdgeMap& g);

/// Mean structural similarity over all 11x11 windows that fit entirely inside
/// the maps (viewed as {0,255} images), Gaussian-weighted with sigma 1.5,
/// C1 = (0.01*255)^2, C2 = (0.03*255)^2 and the usual C3 = C2/2 two-term form.
/// Throws std::invalid_argument when either dimension is below 11.
double ssim(const EdgeMap& f, const EdgeMap& g);

/// All four metrics for one detected/annotated pair.
MetricReport evaluate_pair(const EdgeMap& detected, const EdgeMap& annotated);

}  // namespace caedge
