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

#include <dehaze/serialize.hpp>

#include <cmath>
#include <limits>

namespace dehaze {
namespace {

template <class T>
Json optional_json(const std::optional<T>& v)
{
    return v ? Json(*v) : Json(nullptr);
}

Json color_json(const Eigen::Array3d& c)
{
    return Json::array({c[0], c[1], c[2]});
}

Eigen::Array3d color_from_json(const Json& j)
{
    if (!j.is_array() || j.size() != 3) throw ArgumentError("expected [r, g, b]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

// JSON has no infinity; null stands for +inf.
Json depth_json(double d)
{
    return std::isfinite(d) ? Json(d) : Json(nullptr);
}

double depth_from_json(const Json& j)
{
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

template <class T>
void read_if(const Json& j, const char* key, T& out)
{
    if (j.contains(key)) out = j.at(key).get<T>();
}

template <class E>
E enum_from(const Json& j, const std::map<std::string, E>& names, const char* what)
{
    const auto s = j.get<std::string>();
    const auto it = names.find(s);
    if (it == names.end()) throw ArgumentError(std::string("unknown ") + what + ": " + s);
    return it->second;
}

} // namespace

double round_seconds(double s)
{
    return std::round(s * 1000.0) / 1000.0;
}

Json to_json(const AirlightEstimate& est)
{
    Json j;
    j["method"] = to_string(est.method);
    j["brightness"] = color_json(est.brightness);
    j["location"] = Json::array({est.location_row, est.location_col});
    j["candidates"] = est.candidates;
    j["k"] = optional_json(est.k);
    j["seed"] = optional_json(est.seed);
    j["cluster_size"] = est.cluster_size;
    return j;
}

Json to_json(const MetricsConfig& cfg)
{
    Json j;
    j["eme_blocks"] = Json::array({cfg.eme_blocks_r, cfg.eme_blocks_c});
    j["eme_guard"] = cfg.eme_guard;
    j["edge_window_radius"] = cfg.edge_window_radius;
    j["edge_threshold"] = cfg.edge_threshold;
    j["gradient_guard"] = cfg.gradient_guard;
    j["saturation_tol"] = cfg.saturation_tol;
    j["black_only"] = cfg.black_only;
    return j;
}

namespace {

MetricsConfig metrics_config_from_json(const Json& j)
{
    MetricsConfig cfg;
    if (j.contains("eme_blocks")) {
        cfg.eme_blocks_r = j["eme_blocks"].at(0).get<Index>();
        cfg.eme_blocks_c = j["eme_blocks"].at(1).get<Index>();
    }
    read_if(j, "eme_guard", cfg.eme_guard);
    read_if(j, "edge_window_radius", cfg.edge_window_radius);
    read_if(j, "edge_threshold", cfg.edge_threshold);
    read_if(j, "gradient_guard", cfg.gradient_guard);
    read_if(j, "saturation_tol", cfg.saturation_tol);
    read_if(j, "black_only", cfg.black_only);
    return cfg;
}

} // namespace

Json to_json(const MetricsReport& rep)
{
    Json j;
    j["contrast_ratio"] = optional_json(rep.contrast_ratio);
    j["eme"] = {{"original", rep.eme_original}, {"restored", rep.eme_restored}};
    j["blind"] = {{"e", optional_json(rep.blind.e)},
                  {"r", optional_json(rep.blind.r)},
                  {"sigma", rep.blind.sigma},
                  {"visible_edges", {{"original", rep.blind.visible_original},
                                     {"restored", rep.blind.visible_restored}}}};
    j["params"] = to_json(rep.params);
    if (!rep.errors.empty()) j["errors"] = rep.errors;
    return j;
}

Json to_json(const PipelineConfig& cfg)
{
    Json j;
    j["window_radius"] = cfg.window_radius;
    j["omega"] = cfg.refine.omega;
    j["fraction"] = cfg.fraction;
    j["k"] = cfg.k;
    j["seed"] = cfg.seed;
    j["airlight_method"] = to_string(cfg.airlight_method);
    j["t0"] = cfg.restore.t0;
    j["lambda"] = cfg.refine.lambda;
    j["epsilon"] = cfg.refine.epsilon;
    j["matting_window_radius"] = cfg.refine.matting_window_radius;
    j["refine_mode"] = to_string(cfg.refine.mode);
    j["max_solve_dim"] = cfg.refine.max_solve_dim;
    j["solver_tol"] = cfg.refine.solver_tol;
    j["solver_max_iter"] = cfg.refine.solver_max_iter;
    j["compute_metrics"] = cfg.compute_metrics;
    j["metrics"] = to_json(cfg.metrics);
    return j;
}

PipelineConfig pipeline_config_from_json(const Json& j)
{
    if (!j.is_object()) throw ArgumentError("config: expected a JSON object");
    PipelineConfig cfg;
    try {
        read_if(j, "window_radius", cfg.window_radius);
        read_if(j, "omega", cfg.refine.omega);
        read_if(j, "fraction", cfg.fraction);
        read_if(j, "k", cfg.k);
        read_if(j, "seed", cfg.seed);
        if (j.contains("airlight_method")) {
            cfg.airlight_method = enum_from(j["airlight_method"], airlight_method_names(), "airlight method");
        }
        read_if(j, "t0", cfg.restore.t0);
        read_if(j, "lambda", cfg.refine.lambda);
        read_if(j, "epsilon", cfg.refine.epsilon);
        read_if(j, "matting_window_radius", cfg.refine.matting_window_radius);
        if (j.contains("refine_mode")) {
            cfg.refine.mode = enum_from(j["refine_mode"], refine_mode_names(), "refine mode");
        }
        read_if(j, "max_solve_dim", cfg.refine.max_solve_dim);
        read_if(j, "solver_tol", cfg.refine.solver_tol);
        read_if(j, "solver_max_iter", cfg.refine.solver_max_iter);
        read_if(j, "compute_metrics", cfg.compute_metrics);
        if (j.contains("metrics")) cfg.metrics = metrics_config_from_json(j["metrics"]);
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

Json to_json(const SceneSpec& spec)
{
    Json j;
    j["size"] = Json::array({spec.rows, spec.cols});
    j["sky_rows"] = spec.sky_rows;
    j["sky_color"] = color_json(spec.sky_color);
    if (spec.distractor) {
        const Rect& d = *spec.distractor;
        j["distractor_rect"] = Json::array({d.row, d.col, d.height, d.width});
    } else {
        j["distractor_rect"] = nullptr;
    }
    j["distractor_color"] = color_json(spec.distractor_color);
    j["depth_profile"] = {{"sky", depth_json(spec.depth.sky)},
                          {"horizon", depth_json(spec.depth.horizon)},
                          {"near", depth_json(spec.depth.near)},
                          {"distractor", depth_json(spec.depth.distractor)}};
    j["beta"] = spec.beta;
    j["airlight"] = color_json(spec.airlight);
    j["texture"] = spec.texture;
    j["cell"] = spec.cell;
    j["seed"] = spec.seed;
    return j;
}

SceneSpec scene_spec_from_json(const Json& j)
{
    if (!j.is_object()) throw ArgumentError("scene spec: expected a JSON object");
    SceneSpec spec;
    try {
        if (j.contains("size")) {
            spec.rows = j["size"].at(0).get<Index>();
            spec.cols = j["size"].at(1).get<Index>();
        }
        read_if(j, "sky_rows", spec.sky_rows);
        if (j.contains("sky_color")) spec.sky_color = color_from_json(j["sky_color"]);
        if (j.contains("distractor_rect")) {
            const Json& d = j["distractor_rect"];
            if (d.is_null()) {
                spec.distractor.reset();
            } else {
                spec.distractor = Rect{d.at(0).get<Index>(), d.at(1).get<Index>(),
                                       d.at(2).get<Index>(), d.at(3).get<Index>()};
            }
        }
        if (j.contains("distractor_color")) spec.distractor_color = color_from_json(j["distractor_color"]);
        if (j.contains("depth_profile")) {
            const Json& d = j["depth_profile"];
            if (d.contains("sky")) spec.depth.sky = depth_from_json(d["sky"]);
            if (d.contains("horizon")) spec.depth.horizon = depth_from_json(d["horizon"]);
            if (d.contains("near")) spec.depth.near = depth_from_json(d["near"]);
            if (d.contains("distractor")) spec.depth.distractor = depth_from_json(d["distractor"]);
        }
        read_if(j, "beta", spec.beta);
        if (j.contains("airlight")) spec.airlight = color_from_json(j["airlight"]);
        read_if(j, "texture", spec.texture);
        read_if(j, "cell", spec.cell);
        read_if(j, "seed", spec.seed);
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("scene spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

Json to_json(const StageTimes& t, double decode_seconds, double encode_seconds)
{
    Json j;
    j["decode"] = round_seconds(decode_seconds);
    j["dark_channel"] = round_seconds(t.dark_channel);
    j["airlight"] = round_seconds(t.airlight);
    j["airlight_estimation"] = round_seconds(t.airlight_estimation());
    j["rough_transmission"] = round_seconds(t.rough_transmission);
    j["refine"] = round_seconds(t.refine);
    j["restore"] = round_seconds(t.restore);
    j["metrics"] = round_seconds(t.metrics);
    j["encode"] = round_seconds(encode_seconds);
    return j;
}

Json run_report(const DefogResult& res, const PipelineConfig& cfg, double decode_seconds,
                double encode_seconds)
{
    Json j;
    j["image"] = {{"rows", res.restored.rows()}, {"cols", res.restored.cols()}};
    j["airlight"] = to_json(res.airlight);
    j["solver"] = {{"iterations", res.refine_stats.iterations},
                   {"relative_residual", res.refine_stats.relative_residual},
                   {"solve_size", Json::array({res.refine_stats.solve_rows, res.refine_stats.solve_cols})}};
    j["metrics"] = res.metrics ? to_json(*res.metrics) : Json(nullptr);
    j["timings"] = to_json(res.times, decode_seconds, encode_seconds);
    j["config"] = to_json(cfg);
    return j;
}

} // namespace dehaze
