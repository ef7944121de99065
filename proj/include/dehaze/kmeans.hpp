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
#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>
#include <dehaze/error.hpp>

namespace dehaze {

using Point2 = Eigen::Vector2d;

struct ClusterSet
{
    std::vector<int> assignments;       // one cluster id per input point
    std::vector<Point2> centroids;
    std::vector<Eigen::Index> sizes;
    int k = 0;                          // non-empty clusters after compaction
    int iterations = 0;
    std::vector<double> objective_history;  // after each Lloyd iteration

    double objective() const
    {
        return objective_history.empty() ? 0.0 : objective_history.back();
    }
};

struct KMeansOptions
{
    int k = 5;
    std::uint64_t seed = 0;
    int max_iterations = 100;
};

namespace detail {

// Portable [0, 1) draw; std::uniform_real_distribution is not specified
// bit-for-bit across standard libraries.
inline double unit_draw(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::vector<Point2> kmeanspp_init(std::span<const Point2> pts, int k, std::mt19937_64& rng)
{
    const std::size_t n = pts.size();
    std::vector<Point2> centers;
    centers.push_back(pts[rng() % n]);
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = (pts[i] - centers[0]).squaredNorm();

    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (double v : d2) total += v;
        // every point coincides with a chosen center
        if (total <= 0.0) break;
        const double target = unit_draw(rng) * total;
        std::size_t pick = n;
        double cum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (d2[i] <= 0.0) continue;
            cum += d2[i];
            pick = i;
            if (cum > target) break;
        }
        centers.push_back(pts[pick]);
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], (pts[i] - centers.back()).squaredNorm());
        }
    }
    return centers;
}

} // namespace detail

/// Lloyd's algorithm on 2-D points from a seeded k-means++ start.
///
/// Stops when an assignment pass changes nothing or after max_iterations.
/// An empty cluster takes the point farthest from its own centroid (taken
/// only from clusters with more than one member). Clusters still empty at
/// the end are dropped and the remaining ids renumbered in order, so
/// coincident inputs collapse to fewer than k clusters.
/// Deterministic in (point order, k, seed).
inline ClusterSet kmeans(std::span<const Point2> pts, const KMeansOptions& opt = {})
{
    if (pts.empty()) throw ArgumentError("kmeans: empty point list");
    if (opt.k < 1) throw ArgumentError("kmeans: k must be >= 1");
    const std::size_t n = pts.size();
    std::mt19937_64 rng(opt.seed);
    std::vector<Point2> centroids = detail::kmeanspp_init(
        pts, static_cast<int>(std::min<std::size_t>(opt.k, n)), rng);
    const int k = static_cast<int>(centroids.size());

    ClusterSet out;
    std::vector<int> assign(n, -1);
    std::vector<Eigen::Index> sizes(k, 0);

    auto nearest = [&](const Point2& p, int current) {
        int best = current;
        double best_d = current >= 0 ? (p - centroids[current]).squaredNorm()
                                     : std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            const double d = (p - centroids[c]).squaredNorm();
            // strict improvement only; ties keep the current or lower id
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        return best;
    };

    for (int it = 0; it < opt.max_iterations; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            const int c = nearest(pts[i], assign[i]);
            if (c != assign[i]) {
                assign[i] = c;
                changed = true;
            }
        }
        if (!changed) break;

        std::fill(sizes.begin(), sizes.end(), 0);
        for (int a : assign) ++sizes[a];
        for (int e = 0; e < k; ++e) {
            if (sizes[e] > 0) continue;
            std::size_t far = n;
            double far_d = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (sizes[assign[i]] < 2) continue;
                const double d = (pts[i] - centroids[assign[i]]).squaredNorm();
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            if (far == n) continue;
            --sizes[assign[far]];
            assign[far] = e;
            sizes[e] = 1;
        }

        std::vector<Point2> sums(k, Point2::Zero());
        for (std::size_t i = 0; i < n; ++i) sums[assign[i]] += pts[i];
        for (int c = 0; c < k; ++c) {
            if (sizes[c] > 0) centroids[c] = sums[c] / static_cast<double>(sizes[c]);
        }

        double j = 0.0;
        for (std::size_t i = 0; i < n; ++i) j += (pts[i] - centroids[assign[i]]).squaredNorm();
        out.objective_history.push_back(j);
        out.iterations = it + 1;
    }

    std::vector<int> remap(k, -1);
    for (int c = 0; c < k; ++c) {
        if (sizes[c] == 0) continue;
        remap[c] = static_cast<int>(out.centroids.size());
        out.centroids.push_back(centroids[c]);
        out.sizes.push_back(sizes[c]);
    }
    out.k = static_cast<int>(out.centroids.size());
    out.assignments.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.assignments[i] = remap[assign[i]];
    return out;
}

} // namespace dehaze
