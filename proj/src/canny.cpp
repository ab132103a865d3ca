#include "orgb/canny.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <vector>

#include "orgb/error.hpp"

namespace orgb::demo {
namespace {

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        k[static_cast<std::size_t>(i + radius)] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

class Clamped {
public:
    explicit Clamped(const ChannelImage& img) : img_(img) {}
    double operator()(int x, int y) const {
        return img_.at(std::clamp(x, 0, img_.width() - 1), std::clamp(y, 0, img_.height() - 1));
    }

private:
    const ChannelImage& img_;
};

ChannelImage blur(const ChannelImage& in, double sigma) {
    const std::vector<double> k = gaussian_kernel(sigma);
    const int r = static_cast<int>(k.size() / 2);
    ChannelImage tmp(in.width(), in.height());
    {
        const Clamped src(in);
        for (int y = 0; y < in.height(); ++y) {
            for (int x = 0; x < in.width(); ++x) {
                double acc = 0.0;
                for (int i = -r; i <= r; ++i) acc += k[static_cast<std::size_t>(i + r)] * src(x + i, y);
                tmp.at(x, y) = acc;
            }
        }
    }
    ChannelImage out(in.width(), in.height());
    const Clamped src(tmp);
    for (int y = 0; y < in.height(); ++y) {
        for (int x = 0; x < in.width(); ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += k[static_cast<std::size_t>(i + r)] * src(x, y + i);
            out.at(x, y) = acc;
        }
    }
    return out;
}

}  // namespace

ChannelImage canny_edges(const ChannelImage& input, const CannyOptions& options) {
    if (!(options.sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "Canny sigma must be positive");
    if (!(options.lo > 0.0 && options.lo < options.hi)) {
        throw Error(ErrorCode::kInvalidArgument, "Canny thresholds must satisfy 0 < lo < hi");
    }
    const int w = input.width();
    const int h = input.height();
    ChannelImage edges(w, h);
    if (w == 0 || h == 0) return edges;

    const ChannelImage smooth = blur(input, options.sigma);
    const Clamped s(smooth);
    ChannelImage mag(w, h);
    ChannelImage gx(w, h);
    ChannelImage gy(w, h);
    double max_mag = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double dx = (s(x + 1, y - 1) + 2.0 * s(x + 1, y) + s(x + 1, y + 1)) -
                              (s(x - 1, y - 1) + 2.0 * s(x - 1, y) + s(x - 1, y + 1));
            const double dy = (s(x - 1, y + 1) + 2.0 * s(x, y + 1) + s(x + 1, y + 1)) -
                              (s(x - 1, y - 1) + 2.0 * s(x, y - 1) + s(x + 1, y - 1));
            gx.at(x, y) = dx;
            gy.at(x, y) = dy;
            mag.at(x, y) = std::hypot(dx, dy);
            max_mag = std::max(max_mag, mag.at(x, y));
        }
    }
    if (!(max_mag > 0.0)) return edges;
    for (double& v : mag.data()) v /= max_mag;

    // Non-maximum suppression. Ties along the gradient keep the pixel on the
    // positive side only, so a symmetric ridge yields a 1-px line.
    auto m = [&](int x, int y) { return (x < 0 || y < 0 || x >= w || y >= h) ? 0.0 : mag.at(x, y); };
    ChannelImage thin(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double v = mag.at(x, y);
            if (v < options.lo) continue;
            double angle = std::atan2(gy.at(x, y), gx.at(x, y)) * 180.0 / std::numbers::pi;
            if (angle < 0.0) angle += 180.0;
            int ox = 1;
            int oy = 0;
            if (angle >= 22.5 && angle < 67.5) {
                ox = 1;
                oy = 1;
            } else if (angle >= 67.5 && angle < 112.5) {
                ox = 0;
                oy = 1;
            } else if (angle >= 112.5 && angle < 157.5) {
                ox = -1;
                oy = 1;
            }
            if (v >= m(x - ox, y - oy) && v > m(x + ox, y + oy)) thin.at(x, y) = v;
        }
    }

    std::deque<std::pair<int, int>> queue;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (thin.at(x, y) >= options.hi) {
                edges.at(x, y) = 1.0;
                queue.emplace_back(x, y);
            }
        }
    }
    while (!queue.empty()) {
        const auto [x, y] = queue.front();
        queue.pop_front();
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int nx = x + dx;
                const int ny = y + dy;
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                if (edges.at(nx, ny) == 0.0 && thin.at(nx, ny) >= options.lo) {
                    edges.at(nx, ny) = 1.0;
                    queue.emplace_back(nx, ny);
                }
            }
        }
    }
    return edges;
}

}  // namespace orgb::demo
