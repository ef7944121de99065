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
#include <limits>
#include <vector>
#include <dehaze/image.hpp>

namespace dehaze {
namespace detail {

// van Herk / Gil-Werman running minimum over windows of 2r+1 samples.
// The line is padded with +inf on both sides, which is the same as clipping
// the window at the ends. Uses ~3 comparisons per sample for any radius.
template <class Scalar>
class RunningMin
{
public:
    explicit RunningMin(Index radius) : r_(radius), w_(2 * radius + 1) {}

    // in and out may not alias.
    void apply(const Scalar* in, Index n, Index in_stride, Scalar* out, Index out_stride)
    {
        constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
        const Index padded = n + 2 * r_;
        // round up to whole blocks so every block has a full suffix
        const Index total = ((padded + w_ - 1) / w_) * w_;
        buf_.assign(static_cast<std::size_t>(total), inf);
        prefix_.resize(buf_.size());
        suffix_.resize(buf_.size());
        for (Index i = 0; i < n; ++i) buf_[r_ + i] = in[i * in_stride];

        for (Index b = 0; b < total; b += w_) {
            prefix_[b] = buf_[b];
            for (Index i = b + 1; i < b + w_; ++i) prefix_[i] = std::min(prefix_[i - 1], buf_[i]);
            suffix_[b + w_ - 1] = buf_[b + w_ - 1];
            for (Index i = b + w_ - 2; i >= b; --i) suffix_[i] = std::min(suffix_[i + 1], buf_[i]);
        }
        // window over padded [i, i + w - 1] is centered at sample i
        for (Index i = 0; i < n; ++i) {
            out[i * out_stride] = std::min(suffix_[i], prefix_[i + w_ - 1]);
        }
    }

private:
    Index r_;
    Index w_;
    std::vector<Scalar> buf_;
    std::vector<Scalar> prefix_;
    std::vector<Scalar> suffix_;
};

} // namespace detail

/// Minimum over the (2 radius + 1)^2 square window centered at each pixel,
/// with the window clipped to the map bounds. Separable: rows, then columns.
template <class Derived>
Plane<typename Derived::Scalar> min_filter(const Eigen::ArrayBase<Derived>& map, Index radius)
{
    using Scalar = typename Derived::Scalar;
    if (radius < 0) throw ArgumentError("min_filter: negative radius");
    Plane<Scalar> src = map;
    if (radius == 0 || src.size() == 0) return src;

    const Index h = src.rows(), w = src.cols();
    Plane<Scalar> tmp(h, w);
    detail::RunningMin<Scalar> runner(radius);
    for (Index r = 0; r < h; ++r) {
        runner.apply(src.data() + r * w, w, 1, tmp.data() + r * w, 1);
    }
    for (Index c = 0; c < w; ++c) {
        runner.apply(tmp.data() + c, h, w, src.data() + c, w);
    }
    return src;
}

/// Dark channel: minimum over the color channels and the clipped window.
template <class Scalar>
ScalarMap<Scalar> dark_channel(const Image<Scalar>& img, Index radius)
{
    return min_filter(channel_min(img), radius);
}

} // namespace dehaze
