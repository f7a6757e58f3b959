#pragma once

#include <array>

#include "caedge/image.hpp"
#include "caedge/rules.hpp"

namespace caedge {

/// One detector configuration: damping delta in [0,255], threshold tau in
/// [0,1], and the rule mask selecting which neighbors participate.
struct DetectorParams {
    int delta = 0;
    double tau = 0.0;
    RuleMask mask;
};

/// Sum of |center - neighbor| over the mask cells at (y, x) of a padded image.
/// The center cell contributes zero when the mask selects it. (y, x) must be
/// at least mask.radius away from the padded border.
int neighbor_diff_sum(const GrayImage& padded, int y, int x, const RuleMask& mask);

/// First transition phase: diff_sum / (delta + diff_sum), in [0,1].
/// Defined as 0 when both terms are 0.
double edge_response(int diff_sum, int delta);

/// Runs the two-phase transition once over the whole image: pads with zeros by
/// the mask radius, computes the response per pixel, and marks pixels whose
/// response strictly exceeds tau. Output dimensions equal the input's.
EdgeMap detect_edges(const GrayImage& img, const DetectorParams& params);

/// Maps a normalized PSO position to detector parameters:
/// delta = round(x0 * 255), tau = x1, rule = round(x2 * max_rule(radius)),
/// with half-up rounding and clamping at the range ends.
DetectorParams decode_particle(const std::array<double, 3>& position, int radius);
DetectorParams decode_particle(const std::array<double, 3>& position, int radius,
                               const NumberingTable& table);

}  // namespace caedge
