#include "caedge/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "caedge/png_io.hpp"
#include "caedge/rng.hpp"

namespace fs = std::filesystem;

namespace caedge {

namespace {

constexpr double kTwoPi = 6.283185307179586;

double normal(std::mt19937_64& rng) {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(kTwoPi * u2);
}

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

std::uint8_t clamp_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

struct Shape {
    int type = 0;  // 0 disk, 1 rectangle, 2 triangle
    double cx = 0, cy = 0;
    double radius = 0;
    double rect_w = 0, rect_h = 0;
    double vx[3] = {0, 0, 0}, vy[3] = {0, 0, 0};
    double value = 0;
    bool textured = false;
    double tex_amp = 0, tex_period = 1, tex_angle = 0;
    double tint[3] = {0, 0, 0};

    bool contains(double x, double y) const {
        switch (type) {
            case 0: {
                const double dx = x - cx, dy = y - cy;
                return dx * dx + dy * dy <= radius * radius;
            }
            case 1:
                return std::abs(x - cx) <= rect_w * 0.5 && std::abs(y - cy) <= rect_h * 0.5;
            default: {
                // same-side test against all three edges
                double sign = 0.0;
                for (int i = 0; i < 3; ++i) {
                    const int j = (i + 1) % 3;
                    const double cross = (vx[j] - vx[i]) * (y - vy[i]) -
                                         (vy[j] - vy[i]) * (x - vx[i]);
                    if (cross == 0.0) continue;
                    if (sign == 0.0)
                        sign = cross > 0 ? 1.0 : -1.0;
                    else if ((cross > 0 ? 1.0 : -1.0) != sign)
                        return false;
                }
                return true;
            }
        }
    }
};

}  // namespace

std::vector<SynthSample> generate_corpus(const SynthConfig& config) {
    if (config.count < 1) throw std::invalid_argument("generate_corpus: count must be >= 1");
    if (config.annotators < 1)
        throw std::invalid_argument("generate_corpus: need at least one annotator");
    if (config.width < 32 || config.height < 32)
        throw std::invalid_argument("generate_corpus: scene smaller than 32x32");

    std::vector<SynthSample> samples;
    samples.reserve(config.count);
    for (int index = 0; index < config.count; ++index) {
        std::mt19937_64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(index)));

        const bool portrait = uniform01(rng) < config.portrait_fraction;
        const int w = portrait ? config.height : config.width;
        const int h = portrait ? config.width : config.height;

        SynthSample sample;
        char id[32];
        std::snprintf(id, sizeof id, "synth_%04d", index);
        sample.id = id;
        sample.category = category_from_index(index % kCategoryCount);

        // drifting, textured background; annotators never mark texture, so a
        // detector that fires on it pays in every metric
        const double base = uniform_in(rng, 60.0, 160.0);
        const double grad_x = uniform_in(rng, -40.0, 40.0);
        const double grad_y = uniform_in(rng, -40.0, 40.0);
        const double bg_amp = uniform_in(rng, 12.0, 26.0);
        const double bg_period = uniform_in(rng, 14.0, 28.0);
        const double bg_angle = uniform_in(rng, 0.0, kTwoPi);
        const double bg_tint[3] = {uniform_in(rng, -12.0, 12.0), uniform_in(rng, -12.0, 12.0),
                                   uniform_in(rng, -12.0, 12.0)};

        const int shape_count = 3 + static_cast<int>(uniform_below(rng, 4));
        const double min_side = std::min(w, h);
        std::vector<Shape> shapes;
        for (int s = 0; s < shape_count; ++s) {
            Shape shape;
            shape.type = static_cast<int>(uniform_below(rng, 3));
            shape.cx = uniform_in(rng, 0.15, 0.85) * w;
            shape.cy = uniform_in(rng, 0.15, 0.85) * h;
            const double r = uniform_in(rng, 0.08, 0.22) * min_side;
            shape.radius = r;
            shape.rect_w = r * uniform_in(rng, 1.2, 2.4);
            shape.rect_h = r * uniform_in(rng, 1.2, 2.4);
            const double a0 = uniform_in(rng, 0.0, kTwoPi);
            for (int v = 0; v < 3; ++v) {
                const double angle = a0 + v * kTwoPi / 3.0 + uniform_in(rng, -0.5, 0.5);
                const double vr = r * uniform_in(rng, 0.7, 1.3);
                shape.vx[v] = shape.cx + vr * std::cos(angle);
                shape.vy[v] = shape.cy + vr * std::sin(angle);
            }

            const double local_bg =
                base + grad_x * (shape.cx / w) + grad_y * (shape.cy / h);
            const double contrast = uniform_in(rng, 55.0, 120.0);
            const bool room_up = local_bg + contrast <= 255.0;
            const bool room_down = local_bg - contrast >= 0.0;
            double sign;
            if (room_up && room_down)
                sign = uniform01(rng) < 0.5 ? 1.0 : -1.0;
            else
                sign = room_up ? 1.0 : -1.0;
            shape.value = std::clamp(local_bg + sign * contrast, 0.0, 255.0);

            shape.textured = uniform01(rng) < 0.65;
            shape.tex_amp = uniform_in(rng, 18.0, 35.0);
            shape.tex_period = uniform_in(rng, 12.0, 24.0);
            shape.tex_angle = uniform_in(rng, 0.0, kTwoPi);
            for (auto& t : shape.tint) t = uniform_in(rng, -12.0, 12.0);
            shapes.push_back(shape);
        }

        // paint: later shapes occlude earlier ones
        std::vector<int> labels(static_cast<std::size_t>(w) * h, 0);
        std::vector<double> value(labels.size());
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * w + x;
                const double bg_u =
                    (x * std::cos(bg_angle) + y * std::sin(bg_angle)) / bg_period;
                value[i] = base + grad_x * (static_cast<double>(x) / w) +
                           grad_y * (static_cast<double>(y) / h) +
                           bg_amp * std::sin(kTwoPi * bg_u);
                for (int s = shape_count - 1; s >= 0; --s) {
                    if (!shapes[s].contains(x + 0.5, y + 0.5)) continue;
                    const Shape& shape = shapes[s];
                    double v = shape.value;
                    if (shape.textured) {
                        const double u = (x * std::cos(shape.tex_angle) +
                                          y * std::sin(shape.tex_angle)) /
                                         shape.tex_period;
                        v += shape.tex_amp * std::sin(kTwoPi * u);
                    }
                    value[i] = v;
                    labels[i] = s + 1;
                    break;
                }
            }

        const double noise_sigma = uniform_in(rng, 5.0, 12.0);
        sample.image.width = w;
        sample.image.height = h;
        sample.image.data.resize(labels.size() * 3);
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const double* tint = labels[i] ? shapes[labels[i] - 1].tint : bg_tint;
            for (int c = 0; c < 3; ++c)
                sample.image.data[3 * i + c] =
                    clamp_u8(value[i] + tint[c] + noise_sigma * normal(rng));
        }

        // truth marks the pixel left/above each label transition
        EdgeMap truth(w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const int l = labels[static_cast<std::size_t>(y) * w + x];
                const bool right = x + 1 < w && labels[static_cast<std::size_t>(y) * w + x + 1] != l;
                const bool down =
                    y + 1 < h && labels[static_cast<std::size_t>(y + 1) * w + x] != l;
                if (right || down) truth.at(y, x) = 1;
            }

        for (int a = 0; a < config.annotators; ++a) {
            std::mt19937_64 arng(derive_seed(derive_seed(config.seed, index), 1000 + a));
            const int dx = static_cast<int>(uniform_below(arng, 3)) - 1;
            const int dy = static_cast<int>(uniform_below(arng, 3)) - 1;
            EdgeMap ann(w, h);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const int sy = y - dy, sx = x - dx;
                    if (sy < 0 || sy >= h || sx < 0 || sx >= w) continue;
                    if (truth.at(sy, sx) && uniform01(arng) >= 0.1) ann.at(y, x) = 1;
                }
            sample.annotations.push_back(std::move(ann));
        }
        samples.push_back(std::move(sample));
    }
    return samples;
}

std::string write_corpus(const std::string& dir, const std::vector<SynthSample>& samples) {
    if (samples.empty()) throw std::invalid_argument("write_corpus: no samples");
    const fs::path root(dir);
    fs::create_directories(root / "images");
    fs::create_directories(root / "annotations");

    DatasetManifest manifest;
    for (const SynthSample& sample : samples) {
        const std::string image_rel = "images/" + sample.id + ".png";
        save_image((root / image_rel).string(), sample.image);

        ManifestEntry entry;
        entry.id = sample.id;
        entry.image_path = (root / image_rel).string();
        entry.category = sample.category;
        for (std::size_t a = 0; a < sample.annotations.size(); ++a) {
            const std::string ann_rel =
                "annotations/" + sample.id + "_a" + std::to_string(a) + ".png";
            save_edge_map((root / ann_rel).string(), sample.annotations[a]);
            entry.annotation_paths.push_back((root / ann_rel).string());
        }
        manifest.entries.push_back(std::move(entry));
    }
    const std::string manifest_path = (root / "manifest.csv").string();
    save_manifest(manifest_path, manifest);
    return manifest_path;
}

}  // namespace caedge
