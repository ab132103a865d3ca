#include "orgb/offset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "orgb/error.hpp"

namespace orgb {
namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

constexpr std::size_t kTheilSenMaxPairs = 10000;
constexpr std::uint64_t kTheilSenSeed = 0x7e11u;
constexpr int kPowerIterations = 200;
constexpr double kPowerTolerance = 1e-12;
constexpr double kBundleMinEigenvalue = 1e-9;

const char* kFlatHint =
    "selected region has no brightness variation; select a region of one material that crosses a shadow boundary";

Rgb mat_vec(const Mat3& m, const Rgb& v) {
    return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2], m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

// Eigenvalues of a symmetric 3x3 matrix by cyclic Jacobi rotations.
Rgb symmetric_eigenvalues(Mat3 a) {
    for (int sweep = 0; sweep < 50; ++sweep) {
        const double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        if (off < 1e-300) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < 3; ++k) {
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = a[p][k];
                    const double aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    return {a[0][0], a[1][1], a[2][2]};
}

// Gaussian elimination with partial pivoting.
Rgb solve3(Mat3 a, Rgb b) {
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = col + 1; r < 3; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 3; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    Rgb x{};
    for (int r = 2; r >= 0; --r) {
        double acc = b[r];
        for (int c = r + 1; c < 3; ++c) acc -= a[r][c] * x[c];
        x[r] = acc / a[r][r];
    }
    return x;
}

double median_of(std::vector<double>& v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double mean_of(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

void require_region_size(std::size_t n) {
    if (n < kMinRegionPixels) {
        throw Error(ErrorCode::kEmptyRegion, "region has " + std::to_string(n) + " pixels; at least " +
                                                 std::to_string(kMinRegionPixels) + " are required");
    }
}

ChannelFit fit_theil_sen(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    std::vector<double> slopes;
    auto add_pair = [&](std::size_t i, std::size_t j) {
        const double dx = x[j] - x[i];
        if (dx != 0.0) slopes.push_back((y[j] - y[i]) / dx);
    };
    if (n * (n - 1) / 2 <= kTheilSenMaxPairs) {
        slopes.reserve(n * (n - 1) / 2);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) add_pair(i, j);
        }
    } else {
        slopes.reserve(kTheilSenMaxPairs);
        std::mt19937_64 rng(kTheilSenSeed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t k = 0; k < kTheilSenMaxPairs; ++k) {
            const std::size_t i = pick(rng);
            std::size_t j = pick(rng);
            if (j == i) j = (i + 1) % n;
            add_pair(i, j);
        }
    }
    if (slopes.empty()) throw Error(ErrorCode::kFlatRegion, kFlatHint);

    ChannelFit fit;
    fit.n = n;
    fit.slope = median_of(slopes);
    std::vector<double> residual_intercepts(n);
    for (std::size_t i = 0; i < n; ++i) residual_intercepts[i] = y[i] - fit.slope * x[i];
    fit.intercept = median_of(residual_intercepts);

    const double ym = mean_of(y);
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += r * r;
        ss_tot += (y[i] - ym) * (y[i] - ym);
    }
    fit.r2 = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : (ss_res == 0.0 ? 1.0 : 0.0);
    return fit;
}

}  // namespace

std::string fit_method_name(FitMethod method) { return method == FitMethod::kOls ? "ols" : "theil-sen"; }

FitMethod parse_fit_method(const std::string& name) {
    if (name == "ols") return FitMethod::kOls;
    if (name == "theil-sen") return FitMethod::kTheilSen;
    throw Error(ErrorCode::kInvalidArgument, "unknown fit method '" + name + "' (ols | theil-sen)");
}

ChannelFit fit_channel_line(std::span<const double> sums, std::span<const double> values, FitMethod method) {
    if (sums.size() != values.size()) {
        throw Error(ErrorCode::kDimensionMismatch, "regressor and response lengths differ");
    }
    const std::size_t n = sums.size();
    require_region_size(n);

    const double xm = mean_of(sums);
    double sxx = 0.0;
    for (double x : sums) sxx += (x - xm) * (x - xm);
    if (!(sxx / static_cast<double>(n) > kMinSumVariance)) throw Error(ErrorCode::kFlatRegion, kFlatHint);

    if (method == FitMethod::kTheilSen) return fit_theil_sen(sums, values);

    const double ym = mean_of(values);
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = sums[i] - xm;
        const double dy = values[i] - ym;
        sxy += dx * dy;
        syy += dy * dy;
    }
    ChannelFit fit;
    fit.n = n;
    fit.slope = sxy / sxx;
    fit.intercept = ym - fit.slope * xm;
    fit.r2 = syy > 0.0 ? std::min(1.0, (sxy * sxy) / (sxx * syy)) : 1.0;
    return fit;
}

Epsilon estimate_epsilon(const LinearImage& img, const RegionMask& mask, FitMethod method) {
    const std::vector<Rgb> pixels = masked_pixels(img, mask);
    require_region_size(pixels.size());

    std::vector<double> sums(pixels.size());
    std::array<std::vector<double>, 3> channels;
    for (auto& c : channels) c.resize(pixels.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        sums[i] = channel_sum(pixels[i]);
        for (int k = 0; k < 3; ++k) channels[k][i] = pixels[i][k];
    }

    Epsilon e;
    e.method = method;
    e.mask_digest = mask_digest(mask);
    for (int k = 0; k < 3; ++k) {
        e.fits[k] = fit_channel_line(sums, channels[k], method);
        e.eps[k] = e.fits[k].intercept;
    }
    check_epsilon(e.eps);
    return e;
}

Epsilon estimate_epsilon(const LinearImage& img, const Rect& rect, FitMethod method) {
    Epsilon e = estimate_epsilon(img, make_mask_rect(rect, img.width(), img.height()), method);
    e.rect = clip_rect(rect, img.width(), img.height());
    e.mask_digest.clear();
    return e;
}

void check_epsilon(const Rgb& eps) {
    for (int k = 0; k < 3; ++k) {
        if (!std::isfinite(eps[k]) || eps[k] >= 1.0) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "epsilon[%d] = %.17g; every component must be finite and < 1", k, eps[k]);
            throw Error(ErrorCode::kInvalidEpsilon, buf);
        }
    }
}

LinearImage correct(const LinearImage& img, const Rgb& eps) {
    check_epsilon(eps);
    LinearImage out(img.width(), img.height());
    const Rgb scale{1.0 - eps[0], 1.0 - eps[1], 1.0 - eps[2]};
    const auto src = img.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const std::size_t k = i % 3;
        dst[i] = (src[i] - eps[k]) / scale[k];
    }
    return out;
}

LinearImage uncorrect(const LinearImage& img, const Rgb& eps) {
    check_epsilon(eps);
    LinearImage out(img.width(), img.height());
    const auto src = img.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const std::size_t k = i % 3;
        dst[i] = src[i] + eps[k] * (1.0 - src[i]);
    }
    return out;
}

ColorLine fit_color_line(std::span<const Rgb> points) {
    const std::size_t n = points.size();
    if (n < 2) throw Error(ErrorCode::kEmptyRegion, "a color line needs at least 2 points");

    Rgb c{0.0, 0.0, 0.0};
    for (const Rgb& p : points) c = c + p;
    c = (1.0 / static_cast<double>(n)) * c;

    Mat3 cov{};
    for (const Rgb& p : points) {
        const Rgb q = p - c;
        for (int r = 0; r < 3; ++r) {
            for (int s = 0; s < 3; ++s) cov[r][s] += q[r] * q[s];
        }
    }
    for (auto& row : cov) {
        for (double& v : row) v /= static_cast<double>(n);
    }
    const double trace = cov[0][0] + cov[1][1] + cov[2][2];
    if (!(trace > 1e-24 * std::max(1.0, dot(c, c)))) throw Error(ErrorCode::kFlatRegion, kFlatHint);

    // Power iteration seeded with the covariance column of largest norm.
    int seed_col = 0;
    double best = -1.0;
    for (int s = 0; s < 3; ++s) {
        const Rgb col{cov[0][s], cov[1][s], cov[2][s]};
        if (norm(col) > best) {
            best = norm(col);
            seed_col = s;
        }
    }
    Rgb v{cov[0][seed_col], cov[1][seed_col], cov[2][seed_col]};
    v = (1.0 / norm(v)) * v;
    for (int it = 0; it < kPowerIterations; ++it) {
        Rgb w = mat_vec(cov, v);
        const double len = norm(w);
        if (!(len > 0.0)) break;
        w = (1.0 / len) * w;
        const double change = norm(w - v);
        v = w;
        if (change < kPowerTolerance) break;
    }
    int largest = 0;
    for (int k = 1; k < 3; ++k) {
        if (std::abs(v[k]) > std::abs(v[largest])) largest = k;
    }
    if (v[largest] < 0.0) v = -1.0 * v;
    v = (1.0 / norm(v)) * v;

    ColorLine line;
    line.centroid = c;
    line.direction = v;
    line.n = n;
    double ss = 0.0;
    for (const Rgb& p : points) {
        const double d = point_line_distance(p, line);
        ss += d * d;
    }
    line.rms_residual = std::sqrt(ss / static_cast<double>(n));
    return line;
}

ColorLine fit_color_line(const LinearImage& img, const RegionMask& mask) {
    const std::vector<Rgb> pixels = masked_pixels(img, mask);
    require_region_size(pixels.size());
    return fit_color_line(pixels);
}

double point_line_distance(const Rgb& p, const ColorLine& line) {
    const Rgb q = p - line.centroid;
    return norm(q - dot(q, line.direction) * line.direction);
}

ConvergenceReport estimate_convergence_point(std::span<const ColorLine> lines) {
    if (lines.size() < 2) {
        throw Error(ErrorCode::kDegenerateBundle, "convergence needs at least 2 lines, got " + std::to_string(lines.size()));
    }
    Mat3 a{};
    Rgb b{0.0, 0.0, 0.0};
    for (const ColorLine& line : lines) {
        const Rgb& d = line.direction;
        Mat3 p{};
        for (int r = 0; r < 3; ++r) {
            for (int s = 0; s < 3; ++s) p[r][s] = (r == s ? 1.0 : 0.0) - d[r] * d[s];
        }
        const Rgb pc = mat_vec(p, line.centroid);
        for (int r = 0; r < 3; ++r) {
            for (int s = 0; s < 3; ++s) a[r][s] += p[r][s];
            b[r] += pc[r];
        }
    }
    const Rgb ev = symmetric_eigenvalues(a);
    const double smallest = std::min({ev[0], ev[1], ev[2]});
    if (!(smallest > kBundleMinEigenvalue)) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "line directions are (nearly) parallel; smallest eigenvalue %.3g <= %.0e",
                      smallest, kBundleMinEigenvalue);
        throw Error(ErrorCode::kDegenerateBundle, buf);
    }

    ConvergenceReport report;
    report.point = solve3(a, b);
    report.lines.assign(lines.begin(), lines.end());
    double ss = 0.0;
    for (const ColorLine& line : lines) {
        const double d = point_line_distance(report.point, line);
        ss += d * d;
    }
    report.rms_line_distance = std::sqrt(ss / static_cast<double>(lines.size()));
    return report;
}

LinearImage subtract_ambient(const LinearImage& img, const LinearImage& ambient) {
    if (!img.same_size(ambient)) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "ambient image " + std::to_string(ambient.width()) + "x" + std::to_string(ambient.height()) +
                        " does not match " + std::to_string(img.width()) + "x" + std::to_string(img.height()));
    }
    LinearImage out(img.width(), img.height());
    const auto a = img.data();
    const auto b = ambient.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < a.size(); ++i) dst[i] = a[i] - b[i];
    return out;
}

std::string mask_digest(const RegionMask& mask) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](std::uint8_t byte) {
        h ^= byte;
        h *= 0x100000001b3ull;
    };
    for (int v : {mask.width(), mask.height()}) {
        for (int b = 0; b < 4; ++b) mix(static_cast<std::uint8_t>(static_cast<unsigned>(v) >> (8 * b)));
    }
    for (std::uint8_t bit : mask.bits()) mix(bit);
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace orgb
