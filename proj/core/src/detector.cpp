#include "caedge/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace caedge {

int neighbor_diff_sum(const GrayImage& padded, int y, int x, const RuleMask& mask) {
    const int center = padded.at(y, x);
    int sum = 0;
    for (const auto& cell : mask.offsets) {
        if (cell.dy == 0 && cell.dx == 0) continue;
        sum += std::abs(center - padded.at(y + cell.dy, x + cell.dx));
    }
    return sum;
}

double edge_response(int diff_sum, int delta) {
    if (diff_sum < 0) throw std::invalid_argument("edge_response: negative difference sum");
    if (delta < 0) throw std::invalid_argument("edge_response: negative delta");
    if (diff_sum == 0 && delta == 0) return 0.0;
    return static_cast<double>(diff_sum) / (delta + diff_sum);
}

EdgeMap detect_edges(const GrayImage& img, const DetectorParams& params) {
    if (img.empty()) throw std::invalid_argument("detect_edges: empty image");
    if (params.tau < 0.0 || params.tau > 1.0)
        throw std::invalid_argument("detect_edges: tau outside [0, 1]");

    const int r = params.mask.radius;
    const GrayImage padded = pad_zero(img, r);
    EdgeMap out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const int phi = neighbor_diff_sum(padded, y + r, x + r, params.mask);
            out.at(y, x) = edge_response(phi, params.delta) > params.tau ? 1 : 0;
        }
    return out;
}

DetectorParams decode_particle(const std::array<double, 3>& position, int radius,
                               const NumberingTable& table) {
    const std::uint64_t top = max_rule(radius);
    const double x0 = std::clamp(position[0], 0.0, 1.0);
    const double x1 = std::clamp(position[1], 0.0, 1.0);
    const double x2 = std::clamp(position[2], 0.0, 1.0);

    DetectorParams params;
    params.delta = static_cast<int>(std::floor(x0 * 255.0 + 0.5));
    params.tau = x1;
    const auto rule = static_cast<std::uint64_t>(
        std::floor(x2 * static_cast<double>(top) + 0.5));
    params.mask = decode_rule(std::min(rule, top), radius, table);
    return params;
}

DetectorParams decode_particle(const std::array<double, 3>& position, int radius) {
    return decode_particle(position, radius, default_numbering(radius));
}

}  // namespace caedge
