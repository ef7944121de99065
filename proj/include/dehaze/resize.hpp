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
#include <vector>
#include <dehaze/image.hpp>

namespace dehaze {

enum class ResizeMethod
{
    bicubic
};

namespace detail {

// Catmull-Rom cubic, a = -0.5.
inline double cubic_kernel(double x)
{
    constexpr double a = -0.5;
    x = std::abs(x);
    if (x < 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
    return 0.0;
}

struct ResampleTaps
{
    std::vector<Index> first;       // first source index per output sample
    std::vector<Index> count;
    std::vector<double> weights;    // count[o] weights starting at offset[o]
    std::vector<std::size_t> offset;
};

// Pixel centers sit at half-integers. When shrinking, the kernel is widened
// by the scale factor so it averages over the source footprint. Source
// indices outside the line are clamped to the edge sample.
inline ResampleTaps make_taps(Index n_in, Index n_out)
{
    ResampleTaps t;
    const double scale = static_cast<double>(n_in) / static_cast<double>(n_out);
    const double support = std::max(1.0, scale);
    t.first.resize(n_out);
    t.count.resize(n_out);
    t.offset.resize(n_out);
    for (Index o = 0; o < n_out; ++o) {
        const double center = (o + 0.5) * scale - 0.5;
        const Index lo = static_cast<Index>(std::floor(center - 2.0 * support));
        const Index hi = static_cast<Index>(std::ceil(center + 2.0 * support));
        t.first[o] = lo;
        t.count[o] = hi - lo + 1;
        t.offset[o] = t.weights.size();
        double sum = 0.0;
        for (Index j = lo; j <= hi; ++j) {
            const double wgt = cubic_kernel((j - center) / support);
            t.weights.push_back(wgt);
            sum += wgt;
        }
        for (Index j = 0; j < t.count[o]; ++j) t.weights[t.offset[o] + j] /= sum;
    }
    return t;
}

template <class Scalar>
void resample_line(const Scalar* in, Index n_in, Index in_stride,
                   const ResampleTaps& taps, Scalar* out, Index out_stride)
{
    const Index n_out = static_cast<Index>(taps.first.size());
    for (Index o = 0; o < n_out; ++o) {
        double acc = 0.0;
        const double* w = taps.weights.data() + taps.offset[o];
        for (Index j = 0; j < taps.count[o]; ++j) {
            if (w[j] == 0.0) continue;
            const Index src = std::clamp<Index>(taps.first[o] + j, 0, n_in - 1);
            acc += w[j] * static_cast<double>(in[src * in_stride]);
        }
        out[o * out_stride] = static_cast<Scalar>(acc);
    }
}

} // namespace detail

/// Separable bicubic resampling of a scalar field. No clamping; cubic
/// overshoot near edges can leave the input range.
template <class Derived>
Plane<typename Derived::Scalar> resize_plane(const Eigen::ArrayBase<Derived>& src_in,
                                             Index new_rows, Index new_cols)
{
    using Scalar = typename Derived::Scalar;
    if (new_rows < 1 || new_cols < 1) throw ArgumentError("resize: target size must be >= 1");
    const Plane<Scalar> src = src_in;
    if (src.size() == 0) throw ArgumentError("resize: empty source");
    const Index h = src.rows(), w = src.cols();

    const auto col_taps = detail::make_taps(w, new_cols);
    const auto row_taps = detail::make_taps(h, new_rows);

    Plane<Scalar> tmp(h, new_cols);
    for (Index r = 0; r < h; ++r) {
        detail::resample_line(src.data() + r * w, w, 1, col_taps, tmp.data() + r * new_cols, 1);
    }
    Plane<Scalar> out(new_rows, new_cols);
    for (Index c = 0; c < new_cols; ++c) {
        detail::resample_line(tmp.data() + c, h, new_cols, row_taps, out.data() + c, new_cols);
    }
    return out;
}

/// Bicubic resize of an image, result clamped to [0, 1].
template <class Scalar>
Image<Scalar> resize(const Image<Scalar>& img, Index new_rows, Index new_cols,
                     ResizeMethod method = ResizeMethod::bicubic)
{
    (void)method;
    std::array<Plane<Scalar>, 3> out;
    for (int c = 0; c < 3; ++c) {
        out[c] = clamp01(resize_plane(img.channel(c), new_rows, new_cols));
    }
    return Image<Scalar>(std::move(out));
}

} // namespace dehaze
