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

#include <dehaze/pipeline.hpp>

#include <chrono>
#include <cmath>

namespace dehaze {
namespace {

class Stopwatch
{
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}

    double lap()
    {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - start_).count();
        start_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace

void PipelineConfig::validate() const
{
    if (window_radius < 0) throw ArgumentError("window radius must be >= 0");
    if (!(fraction > 0.0 && fraction <= 1.0)) throw ArgumentError("fraction must be in (0, 1]");
    if (k < 1) throw ArgumentError("k must be >= 1");
    refine.validate();
    restore.validate();
    metrics.validate();
}

AirlightEstimate estimate_airlight(const ImageD& img, const MapD& dark, const PipelineConfig& cfg,
                                   AirlightMethod method)
{
    if (method == AirlightMethod::baseline) return estimate_airlight_baseline(img, dark, cfg.fraction);
    return estimate_airlight_clustered(img, dark, ClusteredOptions{cfg.fraction, cfg.k, cfg.seed});
}

DefogResult defog(const ImageD& hazy, const PipelineConfig& cfg)
{
    cfg.validate();
    if (hazy.empty()) throw ArgumentError("defog: empty image");
    DefogResult out;
    Stopwatch sw;

    out.dark = dark_channel(hazy, cfg.window_radius);
    out.times.dark_channel = sw.lap();

    out.airlight = estimate_airlight(hazy, out.dark, cfg, cfg.airlight_method);
    out.times.airlight = sw.lap();

    const Color<double> a = out.airlight.brightness;
    out.rough = rough_transmission(hazy, a, cfg.refine.omega, cfg.window_radius);
    out.times.rough_transmission = sw.lap();

    out.refine_stats = refine_transmission(hazy, out.rough, cfg.refine);
    out.transmission = out.refine_stats.transmission;
    out.times.refine = sw.lap();

    out.restored = restore(hazy, out.transmission, a, cfg.restore);
    out.times.restore = sw.lap();

    if (cfg.compute_metrics) {
        out.metrics = compute_metrics(hazy, out.restored, cfg.metrics);
        out.times.metrics = sw.lap();
    }
    return out;
}

ImageD annotate_diamond(const ImageD& img, double row, double col, Index radius,
                        const Eigen::Array3d& color)
{
    auto planes = img.planes();
    const Index cr = std::lround(row), cc = std::lround(col);
    for (Index dr = -radius; dr <= radius; ++dr) {
        const Index rem = radius - std::abs(dr);
        for (Index dc : {-rem, rem}) {
            const Index r = cr + dr, c = cc + dc;
            if (r < 0 || c < 0 || r >= img.rows() || c >= img.cols()) continue;
            for (int ch = 0; ch < 3; ++ch) planes[ch](r, c) = color[ch];
        }
    }
    return ImageD(std::move(planes));
}

const std::map<std::string, AirlightMethod>& airlight_method_names()
{
    static const std::map<std::string, AirlightMethod> names{
        {"clustered", AirlightMethod::clustered},
        {"baseline", AirlightMethod::baseline},
    };
    return names;
}

const std::map<std::string, RefineMode>& refine_mode_names()
{
    static const std::map<std::string, RefineMode> names{
        {"none", RefineMode::none},
        {"matting", RefineMode::matting},
        {"downscale_matting", RefineMode::downscale_matting},
    };
    return names;
}

std::string to_string(AirlightMethod m)
{
    for (const auto& [name, v] : airlight_method_names()) {
        if (v == m) return name;
    }
    return "unknown";
}

std::string to_string(RefineMode m)
{
    for (const auto& [name, v] : refine_mode_names()) {
        if (v == m) return name;
    }
    return "unknown";
}

} // namespace dehaze
