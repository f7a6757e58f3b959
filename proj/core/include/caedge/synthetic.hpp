#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "caedge/image.hpp"
#include "caedge/manifest.hpp"

namespace caedge {

/// Seeded generator for a small multi-annotator edge corpus. Scenes are
/// composed of occluding shapes over a drifting background with sensor noise
/// and optional interior texture; the ground truth marks the visible shape
/// boundaries, and each simulated annotator perturbs it (shift and dropout)
/// the way human annotators disagree. Useful for demos and CI where the real
/// benchmark images cannot be redistributed.
struct SynthConfig {
    int count = 20;
    int width = 481;
    int height = 321;
    int annotators = 5;
    std::uint64_t seed = 1234;
    double portrait_fraction = 0.3;  // fraction of images emitted in portrait orientation
};

struct SynthSample {
    std::string id;
    RgbImage image;
    std::vector<EdgeMap> annotations;
    Category category;
};

std::vector<SynthSample> generate_corpus(const SynthConfig& config);

/// Writes images/<id>.png, annotations/<id>_<a>.png, and manifest.csv under
/// dir, and returns the manifest path.
std::string write_corpus(const std::string& dir, const std::vector<SynthSample>& samples);

}  // namespace caedge
