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
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>
#include <dehaze/error.hpp>

namespace dehaze {

using Index = Eigen::Index;

// Row-major H x W scalar field. Dark channel, transmission and luminance
// maps all use this type.
template <class Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class Scalar>
using ScalarMap = Plane<Scalar>;

template <class Scalar>
using Color = Eigen::Array<Scalar, 3, 1>;

template <class Derived>
bool in_unit_range(const Eigen::ArrayBase<Derived>& a)
{
    // NaN fails both comparisons.
    return ((a >= 0) && (a <= 1)).all();
}

template <class Derived>
auto clamp01(const Eigen::ArrayBase<Derived>& a)
{
    using Scalar = typename Derived::Scalar;
    return a.max(Scalar(0)).min(Scalar(1));
}

/// Three-channel (r, g, b) image with samples in [0, 1], stored as one plane
/// per channel. Immutable after construction; every constructor checks the
/// range invariant.
template <class Scalar_>
class Image
{
public:
    using Scalar = Scalar_;
    using plane_type = Plane<Scalar>;
    using color_type = Color<Scalar>;

    Image() = default;

    Image(plane_type r, plane_type g, plane_type b)
        : planes_{std::move(r), std::move(g), std::move(b)}
    {
        for (int c = 1; c < 3; ++c) {
            if (planes_[c].rows() != planes_[0].rows() ||
                planes_[c].cols() != planes_[0].cols()) {
                throw ArgumentError("Image: channel planes differ in size");
            }
        }
        for (const auto& p : planes_) {
            if (!in_unit_range(p)) {
                throw ArgumentError("Image: sample outside [0, 1]");
            }
        }
    }

    explicit Image(std::array<plane_type, 3> planes)
        : Image(std::move(planes[0]), std::move(planes[1]), std::move(planes[2]))
    {}

    static Image constant(Index rows, Index cols, const color_type& color)
    {
        return Image(plane_type::Constant(rows, cols, color[0]),
                     plane_type::Constant(rows, cols, color[1]),
                     plane_type::Constant(rows, cols, color[2]));
    }

    // Interleaved row-major rgb samples, length rows * cols * 3.
    static Image from_interleaved(Index rows, Index cols, std::span<const Scalar> data)
    {
        if (rows < 0 || cols < 0 ||
            static_cast<Index>(data.size()) != rows * cols * 3) {
            throw ArgumentError("Image: interleaved buffer has wrong length");
        }
        std::array<plane_type, 3> p;
        for (auto& q : p) q.resize(rows, cols);
        for (Index i = 0; i < rows * cols; ++i) {
            for (int c = 0; c < 3; ++c) p[c](i / cols, i % cols) = data[3 * i + c];
        }
        return Image(std::move(p));
    }

    Index rows() const { return planes_[0].rows(); }
    Index cols() const { return planes_[0].cols(); }
    Index size() const { return rows() * cols(); }
    bool empty() const { return size() == 0; }

    const plane_type& channel(int c) const { return planes_[c]; }
    const std::array<plane_type, 3>& planes() const { return planes_; }

    Scalar operator()(Index r, Index c, int ch) const { return planes_[ch](r, c); }

    color_type pixel(Index r, Index c) const
    {
        return color_type(planes_[0](r, c), planes_[1](r, c), planes_[2](r, c));
    }

    std::vector<Scalar> interleaved() const
    {
        std::vector<Scalar> out(static_cast<std::size_t>(size() * 3));
        for (Index i = 0; i < size(); ++i) {
            for (int c = 0; c < 3; ++c) {
                out[3 * i + c] = planes_[c](i / cols(), i % cols());
            }
        }
        return out;
    }

    friend bool operator==(const Image& a, const Image& b)
    {
        if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
        for (int c = 0; c < 3; ++c) {
            if ((a.planes_[c] != b.planes_[c]).any()) return false;
        }
        return true;
    }

private:
    std::array<plane_type, 3> planes_;
};

using ImageD = Image<double>;
using MapD = ScalarMap<double>;

template <class Scalar>
Plane<Scalar> channel_min(const Image<Scalar>& img)
{
    return img.channel(0).min(img.channel(1)).min(img.channel(2));
}

template <class Scalar>
Image<Scalar> image_from_map(const ScalarMap<Scalar>& map)
{
    return Image<Scalar>(map, map, map);
}

template <class A, class B>
void require_same_size(const A& a, const B& b, const char* what)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ArgumentError(std::string(what) + ": dimension mismatch");
    }
}

} // namespace dehaze
