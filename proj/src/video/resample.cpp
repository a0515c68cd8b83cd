#include "nightbench/video/resample.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace nightbench {

namespace {

double catmull_rom(double x) {
    x = std::abs(x);
    if (x < 1.0) return 1.5 * x * x * x - 2.5 * x * x + 1.0;
    if (x < 2.0) return -0.5 * x * x * x + 2.5 * x * x - 4.0 * x + 2.0;
    return 0.0;
}

struct Taps {
    std::array<int, 4> index;
    std::array<double, 4> weight;
};

std::vector<Taps> make_taps(int src, int dst) {
    std::vector<Taps> taps(static_cast<std::size_t>(dst));
    const double scale = static_cast<double>(src) / dst;
    for (int i = 0; i < dst; ++i) {
        const double center = (i + 0.5) * scale - 0.5;
        const int base = static_cast<int>(std::floor(center));
        Taps& t = taps[static_cast<std::size_t>(i)];
        for (int k = 0; k < 4; ++k) {
            const int s = base - 1 + k;
            t.index[static_cast<std::size_t>(k)] = std::clamp(s, 0, src - 1);
            t.weight[static_cast<std::size_t>(k)] = catmull_rom(center - s);
        }
    }
    return taps;
}

}  // namespace

Frame resize_bicubic(const Frame& frame, int height, int width) {
    if (height < 1 || width < 1) throw ValidationError("resize target must be >= 1x1");
    const auto rows = make_taps(frame.height(), height);
    const auto cols = make_taps(frame.width(), width);

    // Horizontal pass into a double buffer, then vertical.
    std::vector<double> tmp(static_cast<std::size_t>(frame.height()) * width * 3);
    for (int y = 0; y < frame.height(); ++y) {
        for (int x = 0; x < width; ++x) {
            const Taps& t = cols[static_cast<std::size_t>(x)];
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int k = 0; k < 4; ++k) acc += t.weight[static_cast<std::size_t>(k)] * frame.at(y, t.index[static_cast<std::size_t>(k)], c);
                tmp[(static_cast<std::size_t>(y) * width + x) * 3 + c] = acc;
            }
        }
    }
    std::vector<float> out(static_cast<std::size_t>(height) * width * 3);
    for (int y = 0; y < height; ++y) {
        const Taps& t = rows[static_cast<std::size_t>(y)];
        for (int x = 0; x < width; ++x) {
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int k = 0; k < 4; ++k) {
                    acc += t.weight[static_cast<std::size_t>(k)] * tmp[(static_cast<std::size_t>(t.index[static_cast<std::size_t>(k)]) * width + x) * 3 + c];
                }
                out[(static_cast<std::size_t>(y) * width + x) * 3 + c] = static_cast<float>(acc);
            }
        }
    }
    return Frame::clamped(height, width, std::move(out));
}

}  // namespace nightbench
