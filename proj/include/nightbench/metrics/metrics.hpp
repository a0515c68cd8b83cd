#pragma once

#include <functional>
#include <string>

#include "nightbench/video/clip.hpp"

namespace nightbench {

/// PSNR with peak 1.0. Identical inputs give +infinity.
double psnr(const Frame& a, const Frame& b);
/// PSNR over the mean squared error of every pixel of every frame.
double psnr(const Clip& a, const Clip& b, unsigned workers = 0);
double mean_squared_error(const Frame& a, const Frame& b);

/// Window and stability constants of the structural similarity index.
struct SsimConstants {
    static constexpr int window = 11;
    static constexpr double sigma = 1.5;
    static constexpr double k1 = 0.01;
    static constexpr double k2 = 0.03;
};

/// Mean SSIM over all valid 11x11 Gaussian windows (no padding), computed per
/// RGB channel and averaged. Both frames must be at least 11x11.
double ssim(const Frame& a, const Frame& b);
/// Mean of per-frame SSIM.
double ssim(const Clip& a, const Clip& b, unsigned workers = 0);

/// Pluggable perceptual distance between two frames; must satisfy
/// distance(x, x) = 0 and symmetry.
struct PerceptualBackend {
    std::string name;
    std::function<double(const Frame&, const Frame&)> distance;
};

/// Deterministic stand-in for a learned metric: mean over a 3-level dyadic
/// pyramid (2x2 box downsampling) of (1 - SSIM) / 2. Needs frames >= 44x44.
PerceptualBackend default_perceptual();

/// Looks up a backend by name; only "default" is built in.
PerceptualBackend perceptual_backend(const std::string& name);

/// 2x2 box downsample (odd trailing rows/columns dropped).
Frame downsample2(const Frame& frame);

/// Average frame difference: 100 x mean distance over the N-1 adjacent pairs.
double afd(const Clip& clip, const PerceptualBackend& backend, unsigned workers = 0);

/// clamp(gain * Rec.601 luma(|a - b|), 0, 1).
GrayImage diff_map(const Frame& a, const Frame& b, double gain = 10.0);

}  // namespace nightbench
