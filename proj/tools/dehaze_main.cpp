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

// dehaze: command-line front end.
//
//   dehaze defog    IN OUT [flags]   remove fog, print a JSON run report
//   dehaze airlight IN [--compare] [--annotate OUT]
//   dehaze metrics  ORIGINAL RESTORED
//   dehaze synth    --out PREFIX [--spec scene.json] [flags]
//   dehaze config   [flags]          print the resolved pipeline config
//
// Every pipeline flag can also be set through DEHAZE_<FLAG_NAME>, e.g.
// DEHAZE_OMEGA=0.9, and a JSON config (--config) supplies defaults that
// explicit flags override.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <dehaze/codec.hpp>
#include <dehaze/pipeline.hpp>
#include <dehaze/serialize.hpp>

namespace {

using namespace dehaze;

enum ExitCode : int
{
    kOk = 0,
    kFailure = 1,
    kArgument = 2,
    kIo = 3,
    kSolver = 4,
    kDegenerate = 5,
};

std::string env_name(const std::string& flag)
{
    std::string out = "DEHAZE_";
    for (char c : flag) {
        if (c == '-') {
            if (out.back() != '_') out += '_';
        } else {
            out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
    }
    // "--omega" leaves "DEHAZE__OMEGA" otherwise
    out.erase(std::unique(out.begin(), out.end(), [](char a, char b) { return a == '_' && b == '_'; }), out.end());
    return out;
}

Json read_json_file(const std::string& path)
{
    const auto bytes = read_file(path);
    try {
        return Json::parse(bytes.begin(), bytes.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ArgumentError(path + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text)
{
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

// Binds flags to a scratch Config and remembers which ones were given, so a
// base config loaded from a file is overridden only by explicit flags (or
// their environment variables).
template <class Config>
class FlagBinder
{
public:
    explicit FlagBinder(CLI::App& app) : app_(app) {}
    FlagBinder(const FlagBinder&) = delete;
    FlagBinder& operator=(const FlagBinder&) = delete;

    template <class Access>
    CLI::Option* add(const std::string& name, Access access, const std::string& help)
    {
        auto& target = access(scratch_);
        CLI::Option* opt = nullptr;
        if constexpr (std::is_same_v<std::remove_reference_t<decltype(target)>, bool>) {
            opt = app_.add_flag(name, target, help);
        } else {
            opt = app_.add_option(name, target, help);
        }
        opt->envname(env_name(name))->capture_default_str();
        setters_.emplace_back(opt, [this, access](Config& c) { access(c) = access(scratch_); });
        return opt;
    }

    void add_custom(CLI::Option* opt, std::function<void(Config&)> apply)
    {
        setters_.emplace_back(opt, std::move(apply));
    }

    Config apply(Config base) const
    {
        for (const auto& [opt, set] : setters_) {
            if (opt->count() > 0) set(base);
        }
        return base;
    }

private:
    CLI::App& app_;
    Config scratch_;
    std::vector<std::pair<CLI::Option*, std::function<void(Config&)>>> setters_;
};

struct PipelineFlags
{
    explicit PipelineFlags(CLI::App& app) : binder(app)
    {
        app.add_option("--config", config_path, "JSON pipeline config supplying defaults")
            ->check(CLI::ExistingFile);
        binder.add("--window-radius", [](PipelineConfig& c) -> auto& { return c.window_radius; },
                   "dark-channel window radius (7 = 15x15)");
        binder.add("--omega", [](PipelineConfig& c) -> auto& { return c.refine.omega; },
                   "fraction of haze removed, in (0, 1]");
        binder.add("--fraction", [](PipelineConfig& c) -> auto& { return c.fraction; },
                   "fraction of pixels taken as airlight candidates");
        binder.add("--k", [](PipelineConfig& c) -> auto& { return c.k; }, "number of candidate clusters");
        binder.add("--seed", [](PipelineConfig& c) -> auto& { return c.seed; }, "k-means++ seed");
        binder.add("--airlight-method", [](PipelineConfig& c) -> auto& { return c.airlight_method; },
                   "clustered or baseline")
            ->transform(CLI::CheckedTransformer(airlight_method_names(), CLI::ignore_case));
        binder.add("--t0", [](PipelineConfig& c) -> auto& { return c.restore.t0; },
                   "lower bound on transmission during restoration");
        binder.add("--lambda", [](PipelineConfig& c) -> auto& { return c.refine.lambda; },
                   "matting data-term weight");
        binder.add("--epsilon", [](PipelineConfig& c) -> auto& { return c.refine.epsilon; },
                   "matting covariance regularizer");
        binder.add("--matting-window-radius", [](PipelineConfig& c) -> auto& { return c.refine.matting_window_radius; },
                   "matting window radius (1 = 3x3)");
        binder.add("--refine-mode", [](PipelineConfig& c) -> auto& { return c.refine.mode; },
                   "none, matting or downscale_matting")
            ->transform(CLI::CheckedTransformer(refine_mode_names(), CLI::ignore_case));
        binder.add("--max-solve-dim", [](PipelineConfig& c) -> auto& { return c.refine.max_solve_dim; },
                   "longer side of the matting solve in downscale_matting mode");
        binder.add("--solver-tol", [](PipelineConfig& c) -> auto& { return c.refine.solver_tol; },
                   "relative residual tolerance of the CG solve");
        binder.add("--solver-max-iter", [](PipelineConfig& c) -> auto& { return c.refine.solver_max_iter; },
                   "CG iteration limit");
        binder.add("--compute-metrics", [](PipelineConfig& c) -> auto& { return c.compute_metrics; },
                   "include quality metrics in the report");
        add_metric_flags(binder);
    }

    template <class Binder>
    static void add_metric_flags(Binder& b)
    {
        b.add("--eme-blocks-r", [](PipelineConfig& c) -> auto& { return c.metrics.eme_blocks_r; }, "EME block rows");
        b.add("--eme-blocks-c", [](PipelineConfig& c) -> auto& { return c.metrics.eme_blocks_c; }, "EME block columns");
        b.add("--eme-guard", [](PipelineConfig& c) -> auto& { return c.metrics.eme_guard; }, "EME log guard");
        b.add("--edge-window-radius", [](PipelineConfig& c) -> auto& { return c.metrics.edge_window_radius; },
              "visible-edge contrast window radius");
        b.add("--edge-threshold", [](PipelineConfig& c) -> auto& { return c.metrics.edge_threshold; },
              "visible-edge local contrast threshold");
        b.add("--gradient-guard", [](PipelineConfig& c) -> auto& { return c.metrics.gradient_guard; },
              "gradient ratio guard");
        b.add("--saturation-tol", [](PipelineConfig& c) -> auto& { return c.metrics.saturation_tol; },
              "distance from 0 or 1 counted as saturated");
        b.add("--black-only", [](PipelineConfig& c) -> auto& { return c.metrics.black_only; },
              "count only black saturation in sigma");
    }

    PipelineConfig resolve() const
    {
        PipelineConfig base;
        if (!config_path.empty()) base = pipeline_config_from_json(read_json_file(config_path));
        PipelineConfig cfg = binder.apply(base);
        cfg.validate();
        return cfg;
    }

    FlagBinder<PipelineConfig> binder;
    std::string config_path;
};

struct MetricFlags
{
    explicit MetricFlags(CLI::App& app) : binder(app) { PipelineFlags::add_metric_flags(binder); }

    MetricsConfig resolve() const
    {
        auto cfg = binder.apply(PipelineConfig{}).metrics;
        cfg.validate();
        return cfg;
    }

    FlagBinder<PipelineConfig> binder;
};

double seconds_since(std::chrono::steady_clock::time_point t)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

int cmd_defog(const std::string& in, const std::string& out, const PipelineConfig& cfg,
              const std::string& dump_t, const std::string& dump_rough)
{
    auto t = std::chrono::steady_clock::now();
    const ImageD hazy = read_image(in);
    const double decode_s = seconds_since(t);

    const DefogResult res = defog(hazy, cfg);

    t = std::chrono::steady_clock::now();
    const Bytes png = encode_png(res.restored);
    const double encode_s = seconds_since(t);
    write_file(out, png);
    if (!dump_t.empty()) write_file(dump_t, encode_png_gray(res.transmission));
    if (!dump_rough.empty()) write_file(dump_rough, encode_png_gray(res.rough));

    std::cout << run_report(res, cfg, decode_s, encode_s).dump(2) << "\n";
    return kOk;
}

int cmd_airlight(const std::string& in, const PipelineConfig& cfg, bool compare,
                 const std::string& annotate, Index marker_radius)
{
    const ImageD img = read_image(in);
    auto t = std::chrono::steady_clock::now();
    const MapD dark = dark_channel(img, cfg.window_radius);
    const double dark_s = seconds_since(t);

    Json j;
    if (compare) {
        t = std::chrono::steady_clock::now();
        const auto clustered = estimate_airlight(img, dark, cfg, AirlightMethod::clustered);
        const double clustered_s = seconds_since(t);
        const auto baseline = estimate_airlight(img, dark, cfg, AirlightMethod::baseline);
        j["clustered"] = to_json(clustered);
        j["baseline"] = to_json(baseline);
        j["distance"] = std::hypot(clustered.location_row - baseline.location_row,
                                   clustered.location_col - baseline.location_col);
        j["timings"] = {{"dark_channel", round_seconds(dark_s)},
                        {"airlight_estimation", round_seconds(dark_s + clustered_s)}};
        if (!annotate.empty()) {
            ImageD marked = annotate_diamond(img, baseline.location_row, baseline.location_col,
                                             marker_radius, {1.0, 0.0, 0.0});
            marked = annotate_diamond(marked, clustered.location_row, clustered.location_col,
                                      marker_radius, {0.0, 0.0, 1.0});
            write_file(annotate, encode_png(marked));
        }
    } else {
        t = std::chrono::steady_clock::now();
        const auto est = estimate_airlight(img, dark, cfg, cfg.airlight_method);
        j = to_json(est);
        j["timings"] = {{"dark_channel", round_seconds(dark_s)},
                        {"airlight_estimation", round_seconds(dark_s + seconds_since(t))}};
        if (!annotate.empty()) {
            const Eigen::Array3d color = cfg.airlight_method == AirlightMethod::clustered
                                             ? Eigen::Array3d(0.0, 0.0, 1.0)
                                             : Eigen::Array3d(1.0, 0.0, 0.0);
            write_file(annotate, encode_png(annotate_diamond(img, est.location_row, est.location_col,
                                                             marker_radius, color)));
        }
    }
    std::cout << j.dump(2) << "\n";
    return kOk;
}

int cmd_metrics(const std::string& original, const std::string& restored, const MetricsConfig& cfg)
{
    const ImageD a = read_image(original);
    const ImageD b = read_image(restored);
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ArgumentError("metrics: images differ in size");
    }
    std::cout << to_json(compute_metrics(a, b, cfg)).dump(2) << "\n";
    return kOk;
}

int cmd_synth(const std::string& prefix, const SceneSpec& spec)
{
    const SyntheticScene scene = synth_scene(spec);
    write_file(prefix + "hazy.png", encode_png(scene.hazy));
    write_file(prefix + "truth.png", encode_png(scene.truth));
    write_file(prefix + "t.png", encode_png_gray(scene.transmission));
    Json meta = to_json(spec);
    meta["files"] = {{"hazy", prefix + "hazy.png"}, {"truth", prefix + "truth.png"}, {"t", prefix + "t.png"}};
    write_text(prefix + "meta.json", meta.dump(2) + "\n");
    std::cout << meta.dump(2) << "\n";
    return kOk;
}

int run(int argc, char** argv)
{
    CLI::App app{"Single-image fog removal with clustered atmospheric light estimation"};
    app.require_subcommand(1);

    std::function<int()> action;

    auto* defog_cmd = app.add_subcommand("defog", "remove fog from an image");
    std::string defog_in, defog_out, dump_t, dump_rough;
    defog_cmd->add_option("input", defog_in, "hazy PNG or JPEG")->required();
    defog_cmd->add_option("output", defog_out, "restored PNG")->required();
    defog_cmd->add_option("--dump-transmission", dump_t, "write the refined transmission as PNG");
    defog_cmd->add_option("--dump-rough", dump_rough, "write the rough transmission as PNG");
    PipelineFlags defog_flags(*defog_cmd);
    defog_cmd->callback([&] {
        action = [&] { return cmd_defog(defog_in, defog_out, defog_flags.resolve(), dump_t, dump_rough); };
    });

    auto* air_cmd = app.add_subcommand("airlight", "estimate atmospheric light");
    std::string air_in, annotate;
    bool compare = false;
    Index marker_radius = 6;
    air_cmd->add_option("input", air_in, "hazy PNG or JPEG")->required();
    air_cmd->add_flag("--compare", compare, "run both estimators and report their distance");
    air_cmd->add_option("--annotate", annotate, "write a PNG with diamond markers (blue clustered, red baseline)");
    air_cmd->add_option("--marker-radius", marker_radius, "diamond marker radius in pixels")
        ->check(CLI::PositiveNumber);
    PipelineFlags air_flags(*air_cmd);
    air_cmd->callback([&] {
        action = [&] { return cmd_airlight(air_in, air_flags.resolve(), compare, annotate, marker_radius); };
    });

    auto* met_cmd = app.add_subcommand("metrics", "quality metrics of a restoration");
    std::string met_a, met_b;
    met_cmd->add_option("original", met_a, "original (hazy) image")->required();
    met_cmd->add_option("restored", met_b, "restored image")->required();
    MetricFlags met_flags(*met_cmd);
    met_cmd->callback([&] { action = [&] { return cmd_metrics(met_a, met_b, met_flags.resolve()); }; });

    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic hazy scene with ground truth");
    std::string prefix, spec_path;
    synth_cmd->add_option("--out", prefix, "output prefix; files are PREFIX{hazy,truth,t}.png and PREFIXmeta.json")
        ->required();
    synth_cmd->add_option("--spec", spec_path, "scene spec JSON")->check(CLI::ExistingFile);
    FlagBinder<SceneSpec> scene(*synth_cmd);
    scene.add("--rows", [](SceneSpec& s) -> auto& { return s.rows; }, "image height");
    scene.add("--cols", [](SceneSpec& s) -> auto& { return s.cols; }, "image width");
    scene.add("--sky-rows", [](SceneSpec& s) -> auto& { return s.sky_rows; }, "height of the sky band");
    scene.add("--beta", [](SceneSpec& s) -> auto& { return s.beta; }, "scattering coefficient");
    scene.add("--seed", [](SceneSpec& s) -> auto& { return s.seed; }, "texture seed");
    scene.add("--texture", [](SceneSpec& s) -> auto& { return s.texture; }, "texture noise amplitude");
    scene.add("--cell", [](SceneSpec& s) -> auto& { return s.cell; }, "ground cell size");
    scene.add("--sky-depth", [](SceneSpec& s) -> auto& { return s.depth.sky; }, "sky depth (inf allowed)");
    scene.add("--horizon-depth", [](SceneSpec& s) -> auto& { return s.depth.horizon; }, "ground depth at the horizon");
    scene.add("--near-depth", [](SceneSpec& s) -> auto& { return s.depth.near; }, "ground depth at the bottom row");
    scene.add("--distractor-depth", [](SceneSpec& s) -> auto& { return s.depth.distractor; }, "distractor depth");
    std::vector<double> airlight, sky_color, distractor_color;
    std::vector<Index> distractor;
    auto color_setter = [](std::vector<double>& v, Eigen::Array3d SceneSpec::*m) {
        return [&v, m](SceneSpec& s) { s.*m = Eigen::Array3d(v[0], v[1], v[2]); };
    };
    scene.add_custom(synth_cmd->add_option("--airlight", airlight, "ground-truth airlight r g b")
                         ->expected(3)->envname("DEHAZE_AIRLIGHT"),
                     color_setter(airlight, &SceneSpec::airlight));
    scene.add_custom(synth_cmd->add_option("--sky-color", sky_color, "sky radiance r g b")->expected(3),
                     color_setter(sky_color, &SceneSpec::sky_color));
    scene.add_custom(synth_cmd->add_option("--distractor-color", distractor_color, "distractor radiance r g b")
                         ->expected(3),
                     color_setter(distractor_color, &SceneSpec::distractor_color));
    scene.add_custom(synth_cmd->add_option("--distractor", distractor, "distractor rect: row col height width")
                         ->expected(4),
                     [&distractor](SceneSpec& s) {
                         s.distractor = Rect{distractor[0], distractor[1], distractor[2], distractor[3]};
                     });
    synth_cmd->callback([&] {
        action = [&] {
            SceneSpec base;
            if (!spec_path.empty()) base = scene_spec_from_json(read_json_file(spec_path));
            return cmd_synth(prefix, scene.apply(base));
        };
    });

    auto* cfg_cmd = app.add_subcommand("config", "print the resolved pipeline config as JSON");
    PipelineFlags cfg_flags(*cfg_cmd);
    cfg_cmd->callback([&] {
        action = [&] {
            std::cout << to_json(cfg_flags.resolve()).dump(2) << "\n";
            return static_cast<int>(kOk);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kArgument;
    }
    return action();
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const dehaze::ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kArgument;
    } catch (const dehaze::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const dehaze::SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << dehaze::Json{{"solver_error", {{"relative_residual", e.residual()},
                                                    {"iterations", e.iterations()}}}}.dump() << "\n";
        return kSolver;
    } catch (const dehaze::DegenerateInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDegenerate;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kArgument;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
}
