#include "oracles.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <set>
#include <stdexcept>

namespace oracle {

caedge::EdgeMap brute_force_detect(const caedge::GrayImage& img, int delta, double tau,
                                   std::uint64_t rule, int radius,
                                   const caedge::NumberingTable& table) {
    // decode the rule into a set of offsets, independently of caedge::decode_rule
    std::set<std::pair<int, int>> cells;
    for (std::size_t bit = 0; bit < table.size(); ++bit)
        if ((rule >> bit) & 1u) cells.insert({table[bit].dy, table[bit].dx});

    const int w = img.width, h = img.height;
    const int pw = w + 2 * radius, ph = h + 2 * radius;
    std::vector<std::vector<int>> padded(ph, std::vector<int>(pw, 0));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) padded[y + radius][x + radius] = img.data[y * w + x];

    caedge::EdgeMap out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int cy = y + radius, cx = x + radius;
            long long phi = 0;
            for (const auto& [dy, dx] : cells) {
                if (dy == 0 && dx == 0) continue;  // the center never differs from itself
                phi += std::llabs(static_cast<long long>(padded[cy][cx]) -
                                  static_cast<long long>(padded[cy + dy][cx + dx]));
            }
            double mu = 0.0;
            if (delta + phi != 0)
                mu = static_cast<double>(phi) / (static_cast<double>(delta) + static_cast<double>(phi));
            out.data[y * w + x] = mu > tau ? 1 : 0;
        }
    }
    return out;
}

double reference_ssim(const caedge::GrayImage& a, const caedge::GrayImage& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("reference_ssim: size mismatch");
    constexpr int win = 11;
    if (a.width < win || a.height < win)
        throw std::invalid_argument("reference_ssim: image smaller than window");

    // 2-D Gaussian weights built directly (not separably), sigma = 1.5
    double kernel[win][win];
    double norm = 0.0;
    for (int i = 0; i < win; ++i)
        for (int j = 0; j < win; ++j) {
            const double dy = i - 5, dx = j - 5;
            kernel[i][j] = std::exp(-(dx * dx + dy * dy) / (2.0 * 1.5 * 1.5));
            norm += kernel[i][j];
        }
    for (int i = 0; i < win; ++i)
        for (int j = 0; j < win; ++j) kernel[i][j] /= norm;

    const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double c2 = (0.03 * 255.0) * (0.03 * 255.0);
    const int w = a.width, h = a.height;

    double total = 0.0;
    long long count = 0;
    for (int y = 0; y + win <= h; ++y) {
        for (int x = 0; x + win <= w; ++x) {
            double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
            for (int i = 0; i < win; ++i)
                for (int j = 0; j < win; ++j) {
                    const double va = a.data[(y + i) * w + (x + j)];
                    const double vb = b.data[(y + i) * w + (x + j)];
                    const double k = kernel[i][j];
                    ma += k * va;
                    mb += k * vb;
                    saa += k * va * va;
                    sbb += k * vb * vb;
                    sab += k * va * vb;
                }
            const double vara = saa - ma * ma;
            const double varb = sbb - mb * mb;
            const double cov = sab - ma * mb;
            total += ((2 * ma * mb + c1) * (2 * cov + c2)) /
                     ((ma * ma + mb * mb + c1) * (vara + varb + c2));
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

double reference_dsc(const caedge::EdgeMap& det, const caedge::EdgeMap& ann) {
    long long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < det.data.size(); ++i) {
        if (det.data[i] && ann.data[i]) ++tp;
        else if (det.data[i] && !ann.data[i]) ++fp;
        else if (!det.data[i] && ann.data[i]) ++fn;
    }
    if (2 * tp + fp + fn == 0) return 1.0;
    return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

double reference_mse(const caedge::EdgeMap& det, const caedge::EdgeMap& ann) {
    double sum = 0.0;
    for (std::size_t i = 0; i < det.data.size(); ++i) {
        const double d = (det.data[i] ? 255.0 : 0.0) - (ann.data[i] ? 255.0 : 0.0);
        sum += d * d;
    }
    return sum / static_cast<double>(det.data.size());
}

caedge::GrayImage random_gray(int width, int height, std::mt19937_64& rng) {
    caedge::GrayImage img(width, height);
    std::uniform_int_distribution<int> dist(0, 255);
    for (auto& px : img.data) px = static_cast<std::uint8_t>(dist(rng));
    return img;
}

caedge::EdgeMap random_map(int width, int height, double density, std::mt19937_64& rng) {
    caedge::EdgeMap map(width, height);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (auto& px : map.data) px = dist(rng) < density ? 1 : 0;
    return map;
}

template <typename T>
static T rot_cw(const T& in) {
    T out(in.height, in.width);
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < in.width; ++x)
            out.data[x * out.width + (in.height - 1 - y)] = in.data[y * in.width + x];
    return out;
}

template <typename T>
static T rot_ccw(const T& in) {
    T out(in.height, in.width);
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < in.width; ++x)
            out.data[(in.width - 1 - x) * out.width + y] = in.data[y * in.width + x];
    return out;
}

caedge::GrayImage rotate90_cw(const caedge::GrayImage& in) { return rot_cw(in); }
caedge::GrayImage rotate90_ccw(const caedge::GrayImage& in) { return rot_ccw(in); }
caedge::EdgeMap rotate90_cw(const caedge::EdgeMap& in) { return rot_cw(in); }
caedge::EdgeMap rotate90_ccw(const caedge::EdgeMap& in) { return rot_ccw(in); }

std::filesystem::path scratch_dir(const std::string& hint) {
    static std::atomic<unsigned> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    const auto name = "caedge_" + hint + "_" + std::to_string(stamp) + "_" +
                      std::to_string(counter.fetch_add(1));
    auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace oracle
