#include "nightbench/metrics/metrics.hpp"

#include <fmt/format.h>

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "nightbench/core/error.hpp"
#include "nightbench/core/parallel.hpp"

namespace nightbench {

namespace {

void require_same_dims(Dims a, Dims b) {
    if (a != b) throw ValidationError(fmt::format("dimension mismatch: {}x{} vs {}x{}", a.height, a.width, b.height, b.width));
}

double sum_squared_error(const Frame& a, const Frame& b) {
    require_same_dims(a.dims(), b.dims());
    const auto sa = a.samples();
    const auto sb = b.samples();
    double sse = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) {
        const double d = static_cast<double>(sa[i]) - static_cast<double>(sb[i]);
        sse += d * d;
    }
    return sse;
}

double psnr_from_mse(double mse) {
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

std::array<double, SsimConstants::window> gaussian_window() {
    std::array<double, SsimConstants::window> g{};
    double total = 0.0;
    const int half = SsimConstants::window / 2;
    for (int i = 0; i < SsimConstants::window; ++i) {
        const double x = i - half;
        g[static_cast<std::size_t>(i)] = std::exp(-(x * x) / (2.0 * SsimConstants::sigma * SsimConstants::sigma));
        total += g[static_cast<std::size_t>(i)];
    }
    for (double& v : g) v /= total;
    return g;
}

// Separable 'valid' Gaussian filter of a single-channel plane.
std::vector<double> filter_valid(const std::vector<double>& plane, int h, int w) {
    static const auto g = gaussian_window();
    constexpr int k = SsimConstants::window;
    const int oh = h - k + 1;
    const int ow = w - k + 1;
    std::vector<double> horiz(static_cast<std::size_t>(h) * ow);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i) acc += g[static_cast<std::size_t>(i)] * plane[static_cast<std::size_t>(y) * w + x + i];
            horiz[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(oh) * ow);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i) acc += g[static_cast<std::size_t>(i)] * horiz[static_cast<std::size_t>(y + i) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    }
    return out;
}

double ssim_channel(const Frame& a, const Frame& b, int c) {
    const int h = a.height();
    const int w = a.width();
    const std::size_t n = static_cast<std::size_t>(h) * w;
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (std::size_t p = 0; p < n; ++p) {
        x[p] = a.samples()[p * 3 + c];
        y[p] = b.samples()[p * 3 + c];
        xx[p] = x[p] * x[p];
        yy[p] = y[p] * y[p];
        xy[p] = x[p] * y[p];
    }
    const auto mu_x = filter_valid(x, h, w);
    const auto mu_y = filter_valid(y, h, w);
    const auto e_xx = filter_valid(xx, h, w);
    const auto e_yy = filter_valid(yy, h, w);
    const auto e_xy = filter_valid(xy, h, w);

    const double c1 = SsimConstants::k1 * SsimConstants::k1;
    const double c2 = SsimConstants::k2 * SsimConstants::k2;
    double total = 0.0;
    for (std::size_t i = 0; i < mu_x.size(); ++i) {
        const double mxx = mu_x[i] * mu_x[i];
        const double myy = mu_y[i] * mu_y[i];
        const double mxy = mu_x[i] * mu_y[i];
        const double sxx = e_xx[i] - mxx;
        const double syy = e_yy[i] - myy;
        const double sxy = e_xy[i] - mxy;
        total += ((2.0 * mxy + c1) * (2.0 * sxy + c2)) / ((mxx + myy + c1) * (sxx + syy + c2));
    }
    return total / static_cast<double>(mu_x.size());
}

double pyramid_distance(const Frame& a, const Frame& b) {
    require_same_dims(a.dims(), b.dims());
    constexpr int kLevels = 3;
    constexpr int kMinSide = SsimConstants::window << (kLevels - 1);
    if (a.height() < kMinSide || a.width() < kMinSide) {
        throw ValidationError(fmt::format("default perceptual backend needs frames >= {}x{}", kMinSide, kMinSide));
    }
    Frame la = a;
    Frame lb = b;
    double total = 0.0;
    for (int level = 0; level < kLevels; ++level) {
        if (level > 0) {
            la = downsample2(la);
            lb = downsample2(lb);
        }
        total += (1.0 - ssim(la, lb)) / 2.0;
    }
    return total / kLevels;
}

}  // namespace

double mean_squared_error(const Frame& a, const Frame& b) {
    return sum_squared_error(a, b) / static_cast<double>(a.samples().size());
}

double psnr(const Frame& a, const Frame& b) { return psnr_from_mse(mean_squared_error(a, b)); }

double psnr(const Clip& a, const Clip& b, unsigned workers) {
    if (a.size() != b.size()) throw ValidationError(fmt::format("clip length mismatch: {} vs {}", a.size(), b.size()));
    require_same_dims(a.dims(), b.dims());
    std::vector<double> sse(a.size());
    parallel_for(a.size(), [&](std::size_t i) { sse[i] = sum_squared_error(a[i], b[i]); }, workers);
    double total = 0.0;
    for (double v : sse) total += v;
    return psnr_from_mse(total / (static_cast<double>(a[0].samples().size()) * static_cast<double>(a.size())));
}

double ssim(const Frame& a, const Frame& b) {
    require_same_dims(a.dims(), b.dims());
    if (a.height() < SsimConstants::window || a.width() < SsimConstants::window) {
        throw ValidationError("ssim needs frames of at least 11x11");
    }
    return (ssim_channel(a, b, 0) + ssim_channel(a, b, 1) + ssim_channel(a, b, 2)) / 3.0;
}

double ssim(const Clip& a, const Clip& b, unsigned workers) {
    if (a.size() != b.size()) throw ValidationError(fmt::format("clip length mismatch: {} vs {}", a.size(), b.size()));
    std::vector<double> per(a.size());
    parallel_for(a.size(), [&](std::size_t i) { per[i] = ssim(a[i], b[i]); }, workers);
    double total = 0.0;
    for (double v : per) total += v;
    return total / static_cast<double>(per.size());
}

Frame downsample2(const Frame& frame) {
    const int h = frame.height() / 2;
    const int w = frame.width() / 2;
    if (h < 1 || w < 1) throw ValidationError("frame too small to downsample");
    std::vector<float> out(static_cast<std::size_t>(h) * w * 3);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                const double s = static_cast<double>(frame.at(2 * y, 2 * x, c)) + frame.at(2 * y, 2 * x + 1, c) +
                                 frame.at(2 * y + 1, 2 * x, c) + frame.at(2 * y + 1, 2 * x + 1, c);
                out[(static_cast<std::size_t>(y) * w + x) * 3 + c] = static_cast<float>(s / 4.0);
            }
        }
    }
    return Frame(h, w, std::move(out));
}

PerceptualBackend default_perceptual() { return PerceptualBackend{"default", pyramid_distance}; }

PerceptualBackend perceptual_backend(const std::string& name) {
    if (name == "default") return default_perceptual();
    throw ValidationError("unknown perceptual backend '" + name + "'");
}

double afd(const Clip& clip, const PerceptualBackend& backend, unsigned workers) {
    if (clip.size() < 2) throw ValidationError("AFD needs a clip of at least 2 frames");
    if (!backend.distance) throw ValidationError("perceptual backend has no distance function");
    std::vector<double> d(clip.size() - 1);
    parallel_for(d.size(), [&](std::size_t i) { d[i] = backend.distance(clip[i], clip[i + 1]); }, workers);
    double total = 0.0;
    for (double v : d) total += v;
    return 100.0 * total / static_cast<double>(d.size());
}

GrayImage diff_map(const Frame& a, const Frame& b, double gain) {
    require_same_dims(a.dims(), b.dims());
    if (!(gain >= 0.0) || !std::isfinite(gain)) throw ValidationError("diff map gain must be finite and >= 0");
    std::vector<float> out(a.pixel_count());
    const auto sa = a.samples();
    const auto sb = b.samples();
    for (std::size_t p = 0; p < out.size(); ++p) {
        const double dr = std::abs(static_cast<double>(sa[3 * p]) - sb[3 * p]);
        const double dg = std::abs(static_cast<double>(sa[3 * p + 1]) - sb[3 * p + 1]);
        const double db = std::abs(static_cast<double>(sa[3 * p + 2]) - sb[3 * p + 2]);
        const double luma = 0.299 * dr + 0.587 * dg + 0.114 * db;
        out[p] = static_cast<float>(gain * luma);
    }
    return GrayImage::clamped(a.height(), a.width(), std::move(out));
}

}  // namespace nightbench
