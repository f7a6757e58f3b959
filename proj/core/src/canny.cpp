#include "caedge/canny.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace caedge {

namespace {

int reflect(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - i - 1;
    }
    return i;
}

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = std::max(1, static_cast<int>(std::floor(4.0 * sigma)));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        sum += k[i + radius];
    }
    for (auto& v : k) v /= sum;
    return k;
}

std::vector<double> gaussian_blur(const GrayImage& img, double sigma) {
    const auto kernel = gaussian_kernel(sigma);
    const int radius = static_cast<int>(kernel.size()) / 2;
    const int w = img.width;
    const int h = img.height;

    std::vector<double> tmp(img.data.size()), out(img.data.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int k = -radius; k <= radius; ++k)
                s += kernel[k + radius] * img.at(y, reflect(x + k, w));
            tmp[static_cast<std::size_t>(y) * w + x] = s;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int k = -radius; k <= radius; ++k)
                s += kernel[k + radius] * tmp[static_cast<std::size_t>(reflect(y + k, h)) * w + x];
            out[static_cast<std::size_t>(y) * w + x] = s;
        }
    return out;
}

}  // namespace

EdgeMap canny(const GrayImage& img, const CannyConfig& config) {
    if (img.empty()) throw std::invalid_argument("canny: empty image");
    if (config.sigma <= 0.0) throw std::invalid_argument("canny: sigma must be positive");
    if (config.low < 0.0 || config.low > config.high)
        throw std::invalid_argument("canny: need 0 <= low <= high");

    const int w = img.width;
    const int h = img.height;
    const std::vector<double> smooth = gaussian_blur(img, config.sigma);
    const auto at = [&](const std::vector<double>& v, int y, int x) {
        return v[static_cast<std::size_t>(reflect(y, h)) * w + reflect(x, w)];
    };

    std::vector<double> gx(smooth.size()), gy(smooth.size()), mag(smooth.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double dx = at(smooth, y - 1, x + 1) + 2.0 * at(smooth, y, x + 1) +
                              at(smooth, y + 1, x + 1) - at(smooth, y - 1, x - 1) -
                              2.0 * at(smooth, y, x - 1) - at(smooth, y + 1, x - 1);
            const double dy = at(smooth, y + 1, x - 1) + 2.0 * at(smooth, y + 1, x) +
                              at(smooth, y + 1, x + 1) - at(smooth, y - 1, x - 1) -
                              2.0 * at(smooth, y - 1, x) - at(smooth, y - 1, x + 1);
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            gx[i] = dx;
            gy[i] = dy;
            mag[i] = std::hypot(dx, dy);
        }

    // suppression: drop unless >= the neighbor behind and > the neighbor ahead
    // along the quantized gradient, so plateau maxima keep exactly one pixel
    std::vector<std::uint8_t> state(mag.size(), 0);  // 0 none, 1 weak, 2 strong
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const double m = mag[i];
            if (m < config.low) continue;

            double angle = std::atan2(gy[i], gx[i]) * 180.0 / 3.14159265358979323846;
            if (angle < 0.0) angle += 180.0;
            int ddy, ddx;
            if (angle < 22.5 || angle >= 157.5) {
                ddy = 0;
                ddx = 1;
            } else if (angle < 67.5) {
                ddy = 1;
                ddx = 1;
            } else if (angle < 112.5) {
                ddy = 1;
                ddx = 0;
            } else {
                ddy = 1;
                ddx = -1;
            }
            const double behind = mag[static_cast<std::size_t>(reflect(y - ddy, h)) * w +
                                      reflect(x - ddx, w)];
            const double ahead = mag[static_cast<std::size_t>(reflect(y + ddy, h)) * w +
                                     reflect(x + ddx, w)];
            if (m >= behind && m > ahead) state[i] = m >= config.high ? 2 : 1;
        }

    EdgeMap out(w, h);
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < state.size(); ++i)
        if (state[i] == 2) {
            out.data[i] = 1;
            stack.push_back(i);
        }
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        const int y = static_cast<int>(i) / w;
        const int x = static_cast<int>(i) % w;
        for (int ny = y - 1; ny <= y + 1; ++ny)
            for (int nx = x - 1; nx <= x + 1; ++nx) {
                if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
                const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
                if (state[j] == 1 && !out.data[j]) {
                    out.data[j] = 1;
                    stack.push_back(j);
                }
            }
    }
    return out;
}

}  // namespace caedge
