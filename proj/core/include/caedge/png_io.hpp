#pragma once

#include <string>

#include "caedge/image.hpp"

namespace caedge {

/// Loads a PNG as 8-bit RGB. Grayscale, palette, 16-bit, and alpha variants
/// are expanded/stripped to plain RGB. Throws std::runtime_error on missing
/// or malformed files.
RgbImage load_image(const std::string& path);

/// Loads a PNG as a binary edge map: every nonzero sample becomes 1.
EdgeMap load_edge_map(const std::string& path);

/// 8-bit PNG writers. Edge maps are written as single-channel {0,255}.
void save_image(const std::string& path, const GrayImage& img);
void save_image(const std::string& path, const RgbImage& img);
void save_edge_map(const std::string& path, const EdgeMap& map);

}  // namespace caedge
