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
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <dehaze/image.hpp>

namespace dehaze {

struct RestoreConfig
{
    double t0 = 0.1;

    void validate() const
    {
        if (!(t0 > 0.0 && t0 <= 1.0)) throw ArgumentError("t0 must be in (0, 1]");
    }
};

/// J = (I - A) / max(t, t0) + A per channel, without clamping.
template <class Scalar>
std::array<Plane<Scalar>, 3> restore_radiance(const Image<Scalar>& img, const ScalarMap<Scalar>& t,
                                              const Color<Scalar>& airlight, const RestoreConfig& cfg = {})
{
    require_same_size(img, t, "restore");
    cfg.validate();
    const Plane<Scalar> denom = t.max(static_cast<Scalar>(cfg.t0));
    std::array<Plane<Scalar>, 3> out;
    for (int c = 0; c < 3; ++c) {
        out[c] = (img.channel(c) - airlight[c]) / denom + airlight[c];
    }
    return out;
}

template <class Scalar>
Image<Scalar> restore(const Image<Scalar>& img, const ScalarMap<Scalar>& t,
                      const Color<Scalar>& airlight, const RestoreConfig& cfg = {})
{
    auto j = restore_radiance(img, t, airlight, cfg);
    for (auto& p : j) p = clamp01(p);
    return Image<Scalar>(std::move(j));
}

/// Scattering model I = J t + A (1 - t). std::lerp keeps each sample
/// between J and A, so the result stays in [0, 1] without clamping.
template <class Scalar>
Image<Scalar> synthesize_fog(const Image<Scalar>& scene, const ScalarMap<Scalar>& t,
                             const Color<Scalar>& airlight)
{
    require_same_size(scene, t, "synthesize_fog");
    if (!in_unit_range(t)) throw ArgumentError("synthesize_fog: transmission outside [0, 1]");
    if (!in_unit_range(airlight)) throw ArgumentError("synthesize_fog: airlight outside [0, 1]");
    std::array<Plane<Scalar>, 3> out;
    for (int c = 0; c < 3; ++c) {
        out[c].resize(scene.rows(), scene.cols());
        for (Index i = 0; i < scene.rows(); ++i) {
            for (Index j = 0; j < scene.cols(); ++j) {
                out[c](i, j) = std::lerp(airlight[c], scene(i, j, c), t(i, j));
            }
        }
    }
    return Image<Scalar>(std::move(out));
}

struct Rect
{
    Index row = 0;
    Index col = 0;
    Index height = 0;
    Index width = 0;

    bool contains(double r, double c) const
    {
        return r >= static_cast<double>(row) && r <= static_cast<double>(row + height - 1) &&
               c >= static_cast<double>(col) && c <= static_cast<double>(col + width - 1);
    }
};

/// Scene depth per region. Ground depth falls linearly from horizon_depth
/// at the first ground row to near_depth at the bottom row.
struct DepthProfile
{
    double sky = 4.0;           // may be +inf
    double horizon = 3.0;
    double near = 0.5;
    double distractor = 1.0;
};

struct SceneSpec
{
    Index rows = 200;
    Index cols = 300;
    Index sky_rows = 60;
    Eigen::Array3d sky_color{0.80, 0.84, 0.88};
    std::optional<Rect> distractor;
    Eigen::Array3d distractor_color{1.0, 1.0, 1.0};
    DepthProfile depth;
    double beta = 1.0;
    Eigen::Array3d airlight{0.82, 0.86, 0.90};
    double texture = 0.04;      // noise amplitude on sky and ground
    Index cell = 8;             // ground color cell size
    std::uint64_t seed = 0;

    void validate() const
    {
        if (rows < 1 || cols < 1) throw ArgumentError("scene: size must be >= 1");
        if (sky_rows < 0 || sky_rows > rows) throw ArgumentError("scene: sky_rows outside image");
        if (distractor) {
            const Rect& d = *distractor;
            if (d.height < 1 || d.width < 1 || d.row < 0 || d.col < 0 ||
                d.row + d.height > rows || d.col + d.width > cols) {
                throw ArgumentError("scene: distractor rect outside image");
            }
        }
        if (!(beta >= 0.0) || !std::isfinite(beta)) throw ArgumentError("scene: beta must be finite and >= 0");
        if (!(depth.sky >= 0.0 && depth.horizon >= 0.0 && depth.near >= 0.0 && depth.distractor >= 0.0)) {
            throw ArgumentError("scene: depths must be >= 0");
        }
        if (!in_unit_range(sky_color) || !in_unit_range(distractor_color) || !in_unit_range(airlight)) {
            throw ArgumentError("scene: colors must be in [0, 1]");
        }
        if (!(texture >= 0.0 && texture <= 1.0)) throw ArgumentError("scene: texture must be in [0, 1]");
        if (cell < 1) throw ArgumentError("scene: cell must be >= 1");
    }
};

struct SyntheticScene
{
    ImageD hazy;
    ImageD truth;
    MapD transmission;
    Eigen::Array3d airlight;
};

/// Deterministic textured test scene: a sky band on top, a ground of
/// colored cells with one channel kept dark, and an optional bright
/// rectangle. Fogged with t = exp(-beta * depth).
inline SyntheticScene synth_scene(const SceneSpec& spec)
{
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    auto noise = [&] { return (2.0 * unit() - 1.0) * spec.texture; };

    const Index h = spec.rows, w = spec.cols;
    const Index cells_r = (h + spec.cell - 1) / spec.cell;
    const Index cells_c = (w + spec.cell - 1) / spec.cell;
    std::vector<Eigen::Array3d> cell_colors(static_cast<std::size_t>(cells_r * cells_c));
    for (auto& col : cell_colors) {
        for (int c = 0; c < 3; ++c) col[c] = 0.05 + 0.65 * unit();
        col[static_cast<int>(rng() % 3)] = 0.1 * unit();
    }

    std::array<MapD, 3> truth;
    for (auto& p : truth) p.resize(h, w);
    MapD depth(h, w);
    const Index ground_rows = h - spec.sky_rows;
    for (Index i = 0; i < h; ++i) {
        for (Index j = 0; j < w; ++j) {
            Eigen::Array3d col;
            if (i < spec.sky_rows) {
                col = spec.sky_color + noise() * 0.5;
                depth(i, j) = spec.depth.sky;
            } else {
                col = cell_colors[static_cast<std::size_t>((i / spec.cell) * cells_c + j / spec.cell)];
                col += noise();
                const double f = ground_rows > 1
                    ? static_cast<double>(i - spec.sky_rows) / static_cast<double>(ground_rows - 1) : 1.0;
                depth(i, j) = spec.depth.horizon + f * (spec.depth.near - spec.depth.horizon);
            }
            for (int c = 0; c < 3; ++c) truth[c](i, j) = std::clamp(col[c], 0.0, 1.0);
        }
    }
    if (spec.distractor) {
        const Rect& d = *spec.distractor;
        for (Index i = d.row; i < d.row + d.height; ++i) {
            for (Index j = d.col; j < d.col + d.width; ++j) {
                const double dim = unit() * spec.texture * 0.5;
                for (int c = 0; c < 3; ++c) truth[c](i, j) = std::clamp(spec.distractor_color[c] - dim, 0.0, 1.0);
                depth(i, j) = spec.depth.distractor;
            }
        }
        // the undimmed center pixel is the brightest sample of the rect
        const Index ci = d.row + d.height / 2, cj = d.col + d.width / 2;
        for (int c = 0; c < 3; ++c) truth[c](ci, cj) = spec.distractor_color[c];
    }

    SyntheticScene out;
    out.transmission = spec.beta == 0.0 ? MapD::Ones(h, w) : MapD((-spec.beta * depth).exp());
    out.truth = ImageD(std::move(truth));
    out.airlight = spec.airlight;
    out.hazy = synthesize_fog(out.truth, out.transmission, Color<double>(spec.airlight));
    return out;
}

} // namespace dehaze
