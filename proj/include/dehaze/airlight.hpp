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
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>
#include <dehaze/image.hpp>
#include <dehaze/kmeans.hpp>

namespace dehaze {

struct PixelCoord
{
    Index row = 0;
    Index col = 0;

    friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// Top-fraction pixels of a dark channel, in rank order (highest value
/// first, ties by row-major index).
struct CandidateSet
{
    std::vector<PixelCoord> points;
    double source_fraction = 0.001;
};

enum class AirlightMethod
{
    clustered,
    baseline
};

struct AirlightEstimate
{
    Eigen::Array3d brightness = Eigen::Array3d::Zero();
    double location_row = 0.0;
    double location_col = 0.0;
    AirlightMethod method = AirlightMethod::clustered;
    Index candidates = 0;
    // set for the clustered method only
    std::optional<int> k;
    std::optional<std::uint64_t> seed;
    Index cluster_size = 0;
};

inline Index candidate_count(Index rows, Index cols, double fraction)
{
    // the small bias keeps e.g. 0.29 * 100 from flooring to 28
    const auto n = static_cast<Index>(std::floor(fraction * static_cast<double>(rows * cols) + 1e-9));
    return std::max<Index>(1, std::min(n, rows * cols));
}

template <class Derived>
CandidateSet select_candidates(const Eigen::ArrayBase<Derived>& dark, double fraction)
{
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ArgumentError("select_candidates: fraction must be in (0, 1]");
    }
    const Index h = dark.rows(), w = dark.cols();
    if (h * w == 0) throw ArgumentError("select_candidates: empty map");
    const Index count = candidate_count(h, w, fraction);

    std::vector<Index> order(static_cast<std::size_t>(h * w));
    std::iota(order.begin(), order.end(), Index(0));
    auto value = [&](Index i) { return dark.derived()(i / w, i % w); };
    auto ranks_before = [&](Index a, Index b) {
        const auto va = value(a), vb = value(b);
        return va > vb || (va == vb && a < b);
    };
    std::nth_element(order.begin(), order.begin() + (count - 1), order.end(), ranks_before);
    std::sort(order.begin(), order.begin() + count, ranks_before);

    CandidateSet out;
    out.source_fraction = fraction;
    out.points.reserve(static_cast<std::size_t>(count));
    for (Index i = 0; i < count; ++i) out.points.push_back({order[i] / w, order[i] % w});
    return out;
}

struct ClusteredOptions
{
    double fraction = 0.001;
    int k = 5;
    std::uint64_t seed = 0;
};

/// Index of the cluster taken as the sky zone: most members, then smaller
/// within-cluster sum of squares, then lower id.
inline int largest_cluster(std::span<const Point2> pts, const ClusterSet& cs)
{
    std::vector<double> spread(cs.k, 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        spread[cs.assignments[i]] += (pts[i] - cs.centroids[cs.assignments[i]]).squaredNorm();
    }
    int best = 0;
    for (int c = 1; c < cs.k; ++c) {
        if (cs.sizes[c] > cs.sizes[best] ||
            (cs.sizes[c] == cs.sizes[best] && spread[c] < spread[best])) {
            best = c;
        }
    }
    return best;
}

/// Atmospheric light from the largest spatial cluster of dark-channel
/// candidates. Location is the mean (row, col) of that cluster's members;
/// brightness is the per-channel mean of the input image over them.
template <class Scalar, class Derived>
AirlightEstimate estimate_airlight_clustered(const Image<Scalar>& img,
                                             const Eigen::ArrayBase<Derived>& dark,
                                             const ClusteredOptions& opt = {})
{
    require_same_size(img, dark, "estimate_airlight_clustered");
    const CandidateSet cand = select_candidates(dark, opt.fraction);
    std::vector<Point2> pts;
    pts.reserve(cand.points.size());
    for (const auto& p : cand.points) {
        pts.emplace_back(static_cast<double>(p.row), static_cast<double>(p.col));
    }
    const ClusterSet cs = kmeans(pts, {opt.k, opt.seed});
    const int sky = largest_cluster(pts, cs);

    double row_sum = 0.0, col_sum = 0.0;
    Eigen::Array3d color = Eigen::Array3d::Zero();
    Index members = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (cs.assignments[i] != sky) continue;
        const auto& p = cand.points[i];
        row_sum += static_cast<double>(p.row);
        col_sum += static_cast<double>(p.col);
        color += img.pixel(p.row, p.col).template cast<double>();
        ++members;
    }

    AirlightEstimate est;
    est.method = AirlightMethod::clustered;
    est.location_row = row_sum / static_cast<double>(members);
    est.location_col = col_sum / static_cast<double>(members);
    est.brightness = clamp01(color / static_cast<double>(members));
    est.candidates = static_cast<Index>(cand.points.size());
    est.k = opt.k;
    est.seed = opt.seed;
    est.cluster_size = members;
    return est;
}

/// Brightest-candidate estimator: among the dark-channel candidates, the
/// pixel with the largest (r + g + b) / 3; ties go to the smaller
/// row-major index.
template <class Scalar, class Derived>
AirlightEstimate estimate_airlight_baseline(const Image<Scalar>& img,
                                            const Eigen::ArrayBase<Derived>& dark,
                                            double fraction = 0.001)
{
    require_same_size(img, dark, "estimate_airlight_baseline");
    const CandidateSet cand = select_candidates(dark, fraction);
    const Index w = img.cols();
    const PixelCoord* best = nullptr;
    double best_v = -1.0;
    for (const auto& p : cand.points) {
        const double v = static_cast<double>(img.pixel(p.row, p.col).sum()) / 3.0;
        if (v > best_v || (v == best_v && p.row * w + p.col < best->row * w + best->col)) {
            best_v = v;
            best = &p;
        }
    }
    AirlightEstimate est;
    est.method = AirlightMethod::baseline;
    est.brightness = img.pixel(best->row, best->col).template cast<double>();
    est.location_row = static_cast<double>(best->row);
    est.location_col = static_cast<double>(best->col);
    est.candidates = static_cast<Index>(cand.points.size());
    est.cluster_size = 1;
    return est;
}

} // namespace dehaze
