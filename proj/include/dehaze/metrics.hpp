// Copyright 2026 The dehaze Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>
#include <dehaze/image.hpp>
#include <dehaze/min_filter.hpp>

namespace dehaze {

struct MetricsConfig
{
    Index eme_blocks_r = 8;
    Index eme_blocks_c = 8;
    double eme_guard = 1.0 / 255.0;
    Index edge_window_radius = 2;       // 5x5 contrast window
    double edge_threshold = 0.05;
    double gradient_guard = 1e-9;
    double saturation_tol = 0.5 / 255.0;
    bool black_only = false;

    void validate() const
    {
        if (eme_blocks_r < 1 || eme_blocks_c < 1) throw ArgumentError("eme blocks must be >= 1");
        if (!(eme_guard > 0.0)) throw ArgumentError("eme guard must be > 0");
        if (edge_window_radius < 1) throw ArgumentError("edge window radius must be >= 1");
        if (!(edge_threshold > 0.0 && edge_threshold < 1.0)) throw ArgumentError("edge threshold must be in (0, 1)");
        if (!(gradient_guard > 0.0)) throw ArgumentError("gradient guard must be > 0");
        if (!(saturation_tol >= 0.0 && saturation_tol < 0.5)) throw ArgumentError("saturation tolerance must be in [0, 0.5)");
    }
};

template <class Scalar>
ScalarMap<Scalar> luminance(const Image<Scalar>& img)
{
    return Scalar(0.299) * img.channel(0) + Scalar(0.587) * img.channel(1) + Scalar(0.114) * img.channel(2);
}

template <class Derived>
double population_stddev(const Eigen::ArrayBase<Derived>& a)
{
    const double mean = static_cast<double>(a.mean());
    return std::sqrt(static_cast<double>((a.template cast<double>() - mean).square().mean()));
}

/// (C_restored - C_original) / C_original, C = standard deviation of
/// luminance.
template <class Scalar>
double contrast_enhancement_ratio(const Image<Scalar>& original, const Image<Scalar>& restored)
{
    require_same_size(original, restored, "contrast_enhancement_ratio");
    if (original.empty()) throw ArgumentError("contrast_enhancement_ratio: empty image");
    const double co = population_stddev(luminance(original));
    const double cr = population_stddev(luminance(restored));
    if (co < 1e-9) throw DegenerateInputError("contrast ratio: original has zero contrast");
    return (cr - co) / co;
}

/// Measure of enhancement on luminance over a blocks_r x blocks_c grid of
/// near-equal tiles (the grid shrinks to the image size if needed).
template <class Scalar>
double eme(const Image<Scalar>& img, Index blocks_r, Index blocks_c, double guard = 1.0 / 255.0)
{
    if (blocks_r < 1 || blocks_c < 1) throw ArgumentError("eme: blocks must be >= 1");
    if (img.empty()) throw ArgumentError("eme: empty image");
    const ScalarMap<Scalar> y = luminance(img);
    const Index h = y.rows(), w = y.cols();
    const Index br = std::min(blocks_r, h), bc = std::min(blocks_c, w);
    double sum = 0.0;
    for (Index i = 0; i < br; ++i) {
        const Index r0 = i * h / br, r1 = (i + 1) * h / br;
        for (Index j = 0; j < bc; ++j) {
            const Index c0 = j * w / bc, c1 = (j + 1) * w / bc;
            const auto block = y.block(r0, c0, r1 - r0, c1 - c0);
            const double mx = static_cast<double>(block.maxCoeff());
            const double mn = static_cast<double>(block.minCoeff());
            sum += 20.0 * std::log10((mx + guard) / (mn + guard));
        }
    }
    return sum / static_cast<double>(br * bc);
}

/// Michelson contrast (max - min) / (max + min) of luminance over the
/// clipped (2r+1)^2 window.
template <class Scalar>
ScalarMap<Scalar> local_contrast(const ScalarMap<Scalar>& y, Index radius)
{
    const ScalarMap<Scalar> lo = min_filter(y, radius);
    const ScalarMap<Scalar> hi = -min_filter((-y).eval(), radius);
    const ScalarMap<Scalar> sum = hi + lo;
    return (sum > Scalar(0)).select((hi - lo) / sum, Scalar(0));
}

/// Sobel gradient magnitude with replicated borders.
template <class Scalar>
ScalarMap<Scalar> sobel_magnitude(const ScalarMap<Scalar>& y)
{
    const Index h = y.rows(), w = y.cols();
    ScalarMap<Scalar> out(h, w);
    auto at = [&](Index i, Index j) {
        return y(std::clamp<Index>(i, 0, h - 1), std::clamp<Index>(j, 0, w - 1));
    };
    for (Index i = 0; i < h; ++i) {
        for (Index j = 0; j < w; ++j) {
            const Scalar gx = (at(i - 1, j + 1) + 2 * at(i, j + 1) + at(i + 1, j + 1))
                            - (at(i - 1, j - 1) + 2 * at(i, j - 1) + at(i + 1, j - 1));
            const Scalar gy = (at(i + 1, j - 1) + 2 * at(i + 1, j) + at(i + 1, j + 1))
                            - (at(i - 1, j - 1) + 2 * at(i - 1, j) + at(i - 1, j + 1));
            out(i, j) = std::sqrt(gx * gx + gy * gy);
        }
    }
    return out;
}

struct BlindAssessment
{
    std::optional<double> e;        // (n_r - n_o) / n_o
    std::optional<double> r;        // geometric mean gradient ratio at restored visible edges
    double sigma = 0.0;             // newly saturated pixel fraction
    Index visible_original = 0;
    Index visible_restored = 0;
};

/// Visible edges are pixels whose local contrast exceeds the threshold.
/// r averages (in log space) grad_restored / max(grad_original, guard) over
/// restored visible-edge pixels with grad_restored above the guard. sigma
/// counts pixels black (or white, unless black_only) in restored but not in
/// original. e and r are left empty when the original has no visible edges.
template <class Scalar>
BlindAssessment blind_assessment(const Image<Scalar>& original, const Image<Scalar>& restored,
                                 const MetricsConfig& cfg = {})
{
    require_same_size(original, restored, "blind_assessment");
    cfg.validate();
    if (original.empty()) throw ArgumentError("blind_assessment: empty image");
    const ScalarMap<Scalar> yo = luminance(original), yr = luminance(restored);
    const ScalarMap<Scalar> co = local_contrast(yo, cfg.edge_window_radius);
    const ScalarMap<Scalar> cr = local_contrast(yr, cfg.edge_window_radius);
    const auto thr = static_cast<Scalar>(cfg.edge_threshold);

    BlindAssessment out;
    out.visible_original = (co > thr).count();
    out.visible_restored = (cr > thr).count();

    if (out.visible_original > 0) {
        out.e = static_cast<double>(out.visible_restored - out.visible_original) /
                static_cast<double>(out.visible_original);
        const ScalarMap<Scalar> go = sobel_magnitude(yo), gr = sobel_magnitude(yr);
        double log_sum = 0.0;
        Index used = 0;
        for (Index i = 0; i < yr.rows(); ++i) {
            for (Index j = 0; j < yr.cols(); ++j) {
                if (!(cr(i, j) > thr) || !(gr(i, j) > cfg.gradient_guard)) continue;
                log_sum += std::log(static_cast<double>(gr(i, j)) /
                                    std::max(static_cast<double>(go(i, j)), cfg.gradient_guard));
                ++used;
            }
        }
        if (used > 0) out.r = std::exp(log_sum / static_cast<double>(used));
    }

    const double tol = cfg.saturation_tol;
    auto saturated = [&](const Image<Scalar>& img, Index i, Index j) {
        const auto px = img.pixel(i, j).template cast<double>();
        if ((px <= tol).all()) return true;
        return !cfg.black_only && (px >= 1.0 - tol).all();
    };
    Index fresh = 0;
    for (Index i = 0; i < yr.rows(); ++i) {
        for (Index j = 0; j < yr.cols(); ++j) {
            if (saturated(restored, i, j) && !saturated(original, i, j)) ++fresh;
        }
    }
    out.sigma = static_cast<double>(fresh) / static_cast<double>(yr.size());
    return out;
}

struct MetricsReport
{
    std::optional<double> contrast_ratio;
    double eme_original = 0.0;
    double eme_restored = 0.0;
    BlindAssessment blind;
    MetricsConfig params;
    std::vector<std::string> errors;    // degenerate-input messages
};

template <class Scalar>
MetricsReport compute_metrics(const Image<Scalar>& original, const Image<Scalar>& restored,
                              const MetricsConfig& cfg = {})
{
    require_same_size(original, restored, "metrics");
    cfg.validate();
    MetricsReport rep;
    rep.params = cfg;
    try {
        rep.contrast_ratio = contrast_enhancement_ratio(original, restored);
    } catch (const DegenerateInputError& e) {
        rep.errors.emplace_back(e.what());
    }
    rep.eme_original = eme(original, cfg.eme_blocks_r, cfg.eme_blocks_c, cfg.eme_guard);
    rep.eme_restored = eme(restored, cfg.eme_blocks_r, cfg.eme_blocks_c, cfg.eme_guard);
    rep.blind = blind_assessment(original, restored, cfg);
    if (!rep.blind.e) rep.errors.emplace_back("blind assessment: original has no visible edges");
    else if (!rep.blind.r) rep.errors.emplace_back("blind assessment: restored has no measurable gradients");
    return rep;
}

} // namespace dehaze
