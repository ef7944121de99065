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
#include <json.hpp>
#include <dehaze/airlight.hpp>
#include <dehaze/metrics.hpp>
#include <dehaze/pipeline.hpp>
#include <dehaze/restoration.hpp>

namespace dehaze {

using Json = nlohmann::ordered_json;

// {method, brightness:[r,g,b], location:[row,col], candidates, k, seed}
Json to_json(const AirlightEstimate& est);

// {contrast_ratio, eme:{original, restored}, blind:{e, r, sigma}, params:{...}}
Json to_json(const MetricsReport& rep);
Json to_json(const MetricsConfig& cfg);

Json to_json(const PipelineConfig& cfg);
PipelineConfig pipeline_config_from_json(const Json& j);

Json to_json(const SceneSpec& spec);
SceneSpec scene_spec_from_json(const Json& j);

Json to_json(const StageTimes& t, double decode_seconds, double encode_seconds);

// Run report: airlight, timings, metrics, solver stats and a config echo.
Json run_report(const DefogResult& res, const PipelineConfig& cfg, double decode_seconds,
                double encode_seconds);

// Seconds rounded to milliseconds.
double round_seconds(double s);

} // namespace dehaze
