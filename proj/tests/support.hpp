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

// Random generators and brute-force oracles shared by the test binaries.
// Oracles deliberately avoid the library's algorithms (no min_filter, no
// band assembly, no CG) so they check the implementation independently.

#pragma once
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>
#include <dehaze/image.hpp>
#include <dehaze/restoration.hpp>

namespace dehaze::testing {

inline double unit(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline MapD random_map(std::mt19937_64& rng, Index h, Index w)
{
    MapD m(h, w);
    for (Index i = 0; i < m.size(); ++i) m(i / w, i % w) = unit(rng);
    return m;
}

inline ImageD random_image(std::mt19937_64& rng, Index h, Index w)
{
    auto r = random_map(rng, h, w);
    auto g = random_map(rng, h, w);
    auto b = random_map(rng, h, w);
    return ImageD(r, g, b);
}

inline MapD brute_min_filter(const MapD& m, Index radius)
{
    MapD out(m.rows(), m.cols());
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            double v = std::numeric_limits<double>::infinity();
            for (Index y = i - radius; y <= i + radius; ++y) {
                for (Index x = j - radius; x <= j + radius; ++x) {
                    if (y < 0 || x < 0 || y >= m.rows() || x >= m.cols()) continue;
                    v = std::min(v, m(y, x));
                }
            }
            out(i, j) = v;
        }
    }
    return out;
}

inline MapD brute_dark_channel(const ImageD& img, Index radius)
{
    MapD out(img.rows(), img.cols());
    for (Index i = 0; i < img.rows(); ++i) {
        for (Index j = 0; j < img.cols(); ++j) {
            double v = std::numeric_limits<double>::infinity();
            for (Index y = std::max<Index>(0, i - radius); y <= std::min(img.rows() - 1, i + radius); ++y) {
                for (Index x = std::max<Index>(0, j - radius); x <= std::min(img.cols() - 1, j + radius); ++x) {
                    for (int c = 0; c < 3; ++c) v = std::min(v, img(y, x, c));
                }
            }
            out(i, j) = v;
        }
    }
    return out;
}

// 1 - omega * min_c min_window I^c / max(A^c, 0.05), clamped.
inline MapD brute_rough_transmission(const ImageD& img, const Eigen::Array3d& a, double omega, Index radius)
{
    MapD out(img.rows(), img.cols());
    for (Index i = 0; i < img.rows(); ++i) {
        for (Index j = 0; j < img.cols(); ++j) {
            double v = std::numeric_limits<double>::infinity();
            for (Index y = i - radius; y <= i + radius; ++y) {
                for (Index x = j - radius; x <= j + radius; ++x) {
                    if (y < 0 || x < 0 || y >= img.rows() || x >= img.cols()) continue;
                    for (int c = 0; c < 3; ++c) v = std::min(v, img(y, x, c) / std::max(a[c], 0.05));
                }
            }
            out(i, j) = std::clamp(1.0 - omega * v, 0.0, 1.0);
        }
    }
    return out;
}

inline double brute_luma(const ImageD& img, Index i, Index j)
{
    return 0.299 * img(i, j, 0) + 0.587 * img(i, j, 1) + 0.114 * img(i, j, 2);
}

inline double brute_eme(const ImageD& img, Index br, Index bc, double guard)
{
    const Index h = img.rows(), w = img.cols();
    double sum = 0.0;
    for (Index bi = 0; bi < br; ++bi) {
        for (Index bj = 0; bj < bc; ++bj) {
            double mx = -1.0, mn = 2.0;
            for (Index i = bi * h / br; i < (bi + 1) * h / br; ++i) {
                for (Index j = bj * w / bc; j < (bj + 1) * w / bc; ++j) {
                    mx = std::max(mx, brute_luma(img, i, j));
                    mn = std::min(mn, brute_luma(img, i, j));
                }
            }
            sum += 20.0 * std::log10((mx + guard) / (mn + guard));
        }
    }
    return sum / static_cast<double>(br * bc);
}

// Full sort by (value desc, index asc), first n linear indices.
inline std::vector<Index> brute_top_indices(const MapD& m, Index n)
{
    std::vector<Index> idx(static_cast<std::size_t>(m.size()));
    std::iota(idx.begin(), idx.end(), Index(0));
    std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
        return m(a / m.cols(), a % m.cols()) > m(b / m.cols(), b % m.cols());
    });
    idx.resize(static_cast<std::size_t>(n));
    return idx;
}

// Dense matting Laplacian by direct per-window accumulation over all pairs,
// covariance from raw second moments.
inline Eigen::MatrixXd naive_matting_laplacian(const ImageD& img, Index radius, double eps)
{
    const Index h = img.rows(), w = img.cols(), n = h * w;
    const Index side = 2 * radius + 1;
    const double m = static_cast<double>(side * side);
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    for (Index kr = radius; kr + radius < h; ++kr) {
        for (Index kc = radius; kc + radius < w; ++kc) {
            std::vector<Index> members;
            Eigen::Vector3d mu = Eigen::Vector3d::Zero();
            Eigen::Matrix3d second = Eigen::Matrix3d::Zero();
            for (Index y = kr - radius; y <= kr + radius; ++y) {
                for (Index x = kc - radius; x <= kc + radius; ++x) {
                    members.push_back(y * w + x);
                    Eigen::Vector3d c(img(y, x, 0), img(y, x, 1), img(y, x, 2));
                    mu += c;
                    second += c * c.transpose();
                }
            }
            mu /= m;
            Eigen::Matrix3d cov = second / m - mu * mu.transpose();
            Eigen::Matrix3d inv = (cov + (eps / m) * Eigen::Matrix3d::Identity()).inverse();
            for (Index a : members) {
                Eigen::Vector3d ca(img(a / w, a % w, 0), img(a / w, a % w, 1), img(a / w, a % w, 2));
                for (Index b : members) {
                    Eigen::Vector3d cb(img(b / w, b % w, 0), img(b / w, b % w, 1), img(b / w, b % w, 2));
                    lap(a, b) += (a == b ? 1.0 : 0.0) - (1.0 + (ca - mu).dot(inv * (cb - mu))) / m;
                }
            }
        }
    }
    return lap;
}

// Exhaustive minimum of the k-means objective over all 2-partitions.
inline double exhaustive_two_partition_objective(const std::vector<Eigen::Vector2d>& pts)
{
    const std::size_t n = pts.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t mask = 0; mask < (std::size_t(1) << (n - 1)); ++mask) {
        Eigen::Vector2d s[2] = {Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
        double cnt[2] = {0, 0};
        for (std::size_t i = 0; i < n; ++i) {
            const int g = (mask >> i) & 1;
            s[g] += pts[i];
            cnt[g] += 1;
        }
        if (cnt[0] == 0 || cnt[1] == 0) continue;
        double j = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const int g = (mask >> i) & 1;
            j += (pts[i] - s[g] / cnt[g]).squaredNorm();
        }
        best = std::min(best, j);
    }
    return best;
}

// Distractor scene family used by the airlight property and acceptance
// suites. The sky band is far away (t ~ 0.02), the distractor is a
// 15-17 px near-white square on the ground at depth 1, so its interior has
// the highest dark channel but supplies at most 9 of the candidates.
inline SceneSpec distractor_scene(std::uint64_t index, Index rows = 200, Index cols = 300)
{
    std::mt19937_64 rng(0x5eed0000 + index);
    SceneSpec s;
    s.rows = rows;
    s.cols = cols;
    s.sky_rows = rows * 3 / 10 + static_cast<Index>(unit(rng) * rows / 10.0);
    s.airlight = Eigen::Array3d(0.78 + 0.08 * unit(rng), 0.82 + 0.06 * unit(rng), 0.86 + 0.06 * unit(rng));
    s.sky_color = s.airlight - 0.05 * unit(rng);
    const Index side = 15 + static_cast<Index>(rng() % 3);
    const Index ground = rows - s.sky_rows;
    const Index dr = s.sky_rows + ground / 3 + static_cast<Index>(unit(rng) * (ground / 3.0));
    const Index dc = 10 + static_cast<Index>(unit(rng) * static_cast<double>(cols - side - 20));
    s.distractor = Rect{std::min(dr, rows - side - 1), dc, side, side};
    s.distractor_color = Eigen::Array3d(1.0, 1.0, 1.0);
    s.depth = DepthProfile{4.0, 2.5, 0.4, 1.0};
    s.beta = 1.0;
    s.texture = 0.04;
    s.seed = 1000 + index;
    return s;
}

} // namespace dehaze::testing
