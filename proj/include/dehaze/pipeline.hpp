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
#include <cstdint>
#include <map>
#include <string>
#include <dehaze/airlight.hpp>
#include <dehaze/image.hpp>
#include <dehaze/metrics.hpp>
#include <dehaze/restoration.hpp>
#include <dehaze/transmission.hpp>

namespace dehaze {

struct PipelineConfig
{
    Index window_radius = 7;            // 15x15 dark-channel window
    double fraction = 0.001;
    int k = 5;
    std::uint64_t seed = 0;
    AirlightMethod airlight_method = AirlightMethod::clustered;
    RefineConfig refine;
    RestoreConfig restore;
    MetricsConfig metrics;
    bool compute_metrics = true;

    void validate() const;
};

/// Wall-clock seconds per stage. IO is timed by the caller.
struct StageTimes
{
    double dark_channel = 0.0;
    double airlight = 0.0;              // candidates + clustering / selection
    double rough_transmission = 0.0;
    double refine = 0.0;
    double restore = 0.0;
    double metrics = 0.0;

    double airlight_estimation() const { return dark_channel + airlight; }
};

struct DefogResult
{
    ImageD restored;
    MapD dark;
    MapD rough;
    MapD transmission;
    AirlightEstimate airlight;
    RefineResult<double> refine_stats;
    std::optional<MetricsReport> metrics;
    StageTimes times;
};

AirlightEstimate estimate_airlight(const ImageD& img, const MapD& dark, const PipelineConfig& cfg,
                                   AirlightMethod method);

/// Dark channel, airlight, rough transmission, refinement and restoration
/// on a decoded image.
DefogResult defog(const ImageD& hazy, const PipelineConfig& cfg);

/// Copy of img with a one-pixel diamond outline |dr| + |dc| = radius around
/// (row, col), clipped to the image.
ImageD annotate_diamond(const ImageD& img, double row, double col, Index radius,
                        const Eigen::Array3d& color);

std::string to_string(AirlightMethod m);
std::string to_string(RefineMode m);
const std::map<std::string, AirlightMethod>& airlight_method_names();
const std::map<std::string, RefineMode>& refine_mode_names();

} // namespace dehaze
