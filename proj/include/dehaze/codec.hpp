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
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>
#include <dehaze/image.hpp>

namespace dehaze {

enum class ImageFormat
{
    png,
    jpeg
};

using Bytes = std::vector<std::uint8_t>;

/// Decodes an 8-bit PNG (gray, gray+alpha, rgb, rgba) or baseline JPEG.
/// Samples map to s / 255; gray is replicated, alpha dropped.
/// Throws DecodeError naming the stage that failed.
ImageD decode_image(std::span<const std::uint8_t> bytes);

/// 8-bit RGB PNG; samples quantized as round(s * 255).
Bytes encode_png(const ImageD& img);

/// 8-bit single-channel PNG of a scalar map, values clamped to [0, 1] first.
Bytes encode_png_gray(const MapD& map);

std::uint8_t quantize(double s);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

inline ImageD read_image(const std::filesystem::path& path) { return decode_image(read_file(path)); }

} // namespace dehaze
