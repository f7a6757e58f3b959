#include "caedge/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace caedge {

ConfusionCounts confusion(const EdgeMap& predicted, const EdgeMap& truth) {
    if (predicted.width != truth.width || predicted.height != truth.height)
        throw std::invalid_argument("confusion: dimension mismatch");
    ConfusionCounts c;
    for (std::size_t i = 0; i < predicted.data.size(); ++i) {
        const bool p = predicted.data[i] != 0;
        const bool t = truth.data[i] != 0;
        if (p && t)
            ++c.tp;
        else if (p && !t)
            ++c.fp;
        else if (!p && t)
            ++c.fn;
        else
            ++c.tn;
    }
    return c;
}

double dsc(const ConfusionCounts& c) {
    const std::uint64_t denom = 2 * c.tp + c.fp + c.fn;
    if (denom == 0) return 1.0;
    return 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

double dsc(const EdgeMap& predicted, const EdgeMap& truth) {
    return dsc(confusion(predicted, truth));
}

double mse(const EdgeMap& predicted, const EdgeMap& truth) {
    if (predicted.width != truth.width || predicted.height != truth.height)
        throw std::invalid_argument("mse: dimension mismatch");
    if (predicted.data.empty()) throw std::invalid_argument("mse: empty maps");
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < predicted.data.size(); ++i) {
        const int d = (predicted.data[i] ? 255 : 0) - (truth.data[i] ? 255 : 0);
        sum += static_cast<std::uint64_t>(d) * d;
    }
    return static_cast<double>(sum) / static_cast<double>(predicted.data.size());
}

double psnr(const EdgeMap& predicted, const EdgeMap& truth) {
    const double e = mse(predicted, truth);
    if (e == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / e);
}

namespace {

// 11-tap Gaussian, sigma 1.5, normalized to sum 1
std::vector<double> ssim_kernel() {
    std::vector<double> k(11);
    double sum = 0.0;
    for (int i = 0; i < 11; ++i) {
        const double d = i - 5;
        k[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
        sum += k[i];
    }
    for (auto& v : k) v /= sum;
    return k;
}

}  // namespace

double ssim(const EdgeMap& predicted, const EdgeMap& truth) {
    if (predicted.width != truth.width || predicted.height != truth.height)
        throw std::invalid_argument("ssim: dimension mismatch");
    const int w = predicted.width;
    const int h = predicted.height;
    if (w < 11 || h < 11)
        throw std::invalid_argument("ssim: maps smaller than the 11x11 window");

    static const std::vector<double> kernel = ssim_kernel();
    constexpr double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    constexpr double c2 = (0.03 * 255.0) * (0.03 * 255.0);

    std::vector<double> a(predicted.data.size()), b(predicted.data.size());
    for (std::size_t i = 0; i < predicted.data.size(); ++i) {
        a[i] = predicted.data[i] ? 255.0 : 0.0;
        b[i] = truth.data[i] ? 255.0 : 0.0;
    }

    // horizontal pass over the five products, then vertical, valid windows only
    const int vw = w - 10;
    const int vh = h - 10;
    std::vector<double> ha(static_cast<std::size_t>(h) * vw), hb(ha.size()), haa(ha.size()),
        hbb(ha.size()), hab(ha.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < vw; ++x) {
            double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
            for (int k = 0; k < 11; ++k) {
                const double va = a[static_cast<std::size_t>(y) * w + x + k];
                const double vb = b[static_cast<std::size_t>(y) * w + x + k];
                sa += kernel[k] * va;
                sb += kernel[k] * vb;
                saa += kernel[k] * va * va;
                sbb += kernel[k] * vb * vb;
                sab += kernel[k] * va * vb;
            }
            const std::size_t j = static_cast<std::size_t>(y) * vw + x;
            ha[j] = sa;
            hb[j] = sb;
            haa[j] = saa;
            hbb[j] = sbb;
            hab[j] = sab;
        }

    double total = 0.0;
    for (int y = 0; y < vh; ++y)
        for (int x = 0; x < vw; ++x) {
            double mu_a = 0, mu_b = 0, m_aa = 0, m_bb = 0, m_ab = 0;
            for (int k = 0; k < 11; ++k) {
                const std::size_t j = static_cast<std::size_t>(y + k) * vw + x;
                mu_a += kernel[k] * ha[j];
                mu_b += kernel[k] * hb[j];
                m_aa += kernel[k] * haa[j];
                m_bb += kernel[k] * hbb[j];
                m_ab += kernel[k] * hab[j];
            }
            const double var_a = m_aa - mu_a * mu_a;
            const double var_b = m_bb - mu_b * mu_b;
            const double cov = m_ab - mu_a * mu_b;
            total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                     ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
        }
    return total / (static_cast<double>(vw) * vh);
}

MetricReport evaluate_pair(const EdgeMap& predicted, const EdgeMap& truth) {
    MetricReport report;
    report.dsc = dsc(predicted, truth);
    report.mse = mse(predicted, truth);
    report.psnr = psnr(predicted, truth);
    report.ssim = ssim(predicted, truth);
    return report;
}

}  // namespace caedge
