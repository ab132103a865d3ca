#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orgb/image.hpp"

namespace orgb {

/// Smallest region accepted by the estimators.
inline constexpr std::size_t kMinRegionPixels = 8;
/// Minimum population variance of the per-pixel channel sum.
inline constexpr double kMinSumVariance = 1e-12;

enum class FitMethod { kOls, kTheilSen };

std::string fit_method_name(FitMethod method);
FitMethod parse_fit_method(const std::string& name);

/// Straight line rho_j = slope * sum + intercept for one channel.
struct ChannelFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;
};

/// Regresses `values` on `sums`. OLS by default; Theil-Sen takes the median
/// of pairwise slopes (all pairs when there are at most 10 000, otherwise
/// 10 000 pairs drawn with a fixed seed) and the median residual intercept.
///
/// Throws kEmptyRegion below kMinRegionPixels samples and kFlatRegion when
/// the sums do not vary.
ChannelFit fit_channel_line(std::span<const double> sums, std::span<const double> values,
                            FitMethod method = FitMethod::kOls);

/// The color-line convergence offset for one material region.
struct Epsilon {
    Rgb eps{0.0, 0.0, 0.0};
    std::array<ChannelFit, 3> fits{};
    std::optional<Rect> rect;  // set when estimated from a rectangle
    std::string mask_digest;   // set when estimated from an arbitrary mask
    FitMethod method = FitMethod::kOls;
};

/// Fits each channel of the masked pixels against their channel sum and
/// returns the three intercepts as epsilon.
///
/// With OLS the intercepts always sum to zero, so the result is the point
/// where the region's color line crosses the plane rho1+rho2+rho3 = 0, not the
/// environment-light term itself. Use estimate_convergence_point over several
/// regions for a geometric estimate of the shared point.
Epsilon estimate_epsilon(const LinearImage& img, const RegionMask& mask, FitMethod method = FitMethod::kOls);
Epsilon estimate_epsilon(const LinearImage& img, const Rect& rect, FitMethod method = FitMethod::kOls);

/// (rho - eps) / (1 - eps) per channel, unclamped. kInvalidEpsilon if any
/// eps_k >= 1 or is not finite.
LinearImage correct(const LinearImage& img, const Rgb& eps);
inline LinearImage correct(const LinearImage& img, const Epsilon& e) { return correct(img, e.eps); }

/// Exact inverse of correct: rho + eps * (1 - rho).
LinearImage uncorrect(const LinearImage& img, const Rgb& eps);
inline LinearImage uncorrect(const LinearImage& img, const Epsilon& e) { return uncorrect(img, e.eps); }

void check_epsilon(const Rgb& eps);

/// Total-least-squares line through a pixel cloud.
struct ColorLine {
    Rgb centroid{0.0, 0.0, 0.0};
    Rgb direction{1.0, 0.0, 0.0};  // unit, largest-magnitude component positive
    double rms_residual = 0.0;
    std::size_t n = 0;
};

/// Needs at least two points and a nonzero spread (kFlatRegion otherwise).
ColorLine fit_color_line(std::span<const Rgb> points);
/// Image form; needs kMinRegionPixels masked pixels.
ColorLine fit_color_line(const LinearImage& img, const RegionMask& mask);

double point_line_distance(const Rgb& p, const ColorLine& line);
inline double line_origin_distance(const ColorLine& line) { return point_line_distance({0.0, 0.0, 0.0}, line); }

struct ConvergenceReport {
    Rgb point{0.0, 0.0, 0.0};
    double rms_line_distance = 0.0;
    std::vector<ColorLine> lines;
};

/// Least-squares point closest to all lines. kDegenerateBundle with fewer
/// than two lines or when the normal matrix's smallest eigenvalue is <= 1e-9.
ConvergenceReport estimate_convergence_point(std::span<const ColorLine> lines);

/// Per-pixel img - ambient, negatives kept.
LinearImage subtract_ambient(const LinearImage& img, const LinearImage& ambient);

/// "fnv1a64:<hex>" of the mask dimensions and bits.
std::string mask_digest(const RegionMask& mask);

}  // namespace orgb
