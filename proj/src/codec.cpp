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

#include <dehaze/codec.hpp>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include <jpeglib.h>
#include <png.h>

namespace dehaze {
namespace {

bool is_png(std::span<const std::uint8_t> b)
{
    static constexpr std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    return b.size() >= 8 && std::memcmp(b.data(), sig, 8) == 0;
}

bool is_jpeg(std::span<const std::uint8_t> b)
{
    return b.size() >= 3 && b[0] == 0xff && b[1] == 0xd8 && b[2] == 0xff;
}

ImageD decode_png(std::span<const std::uint8_t> bytes)
{
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        std::string msg = image.message;
        png_image_free(&image);
        throw DecodeError("png: reading header: " + msg);
    }
    // alpha is read and discarded; asking for RGB would composite onto black
    image.format = PNG_FORMAT_RGBA;
    const Index rows = image.height, cols = image.width;
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw DecodeError("png: reading pixel data: " + msg);
    }
    std::vector<double> samples(buf.size() / 4 * 3);
    for (std::size_t i = 0, o = 0; i < buf.size(); i += 4) {
        for (std::size_t c = 0; c < 3; ++c) samples[o++] = buf[i + c] / 255.0;
    }
    return ImageD::from_interleaved(rows, cols, samples);
}

struct JpegErrorManager
{
    jpeg_error_mgr pub;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo)
{
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

// Only trivially destructible locals live across setjmp here.
bool decode_jpeg_raw(std::span<const std::uint8_t> bytes, std::vector<std::uint8_t>& out,
                     unsigned& rows, unsigned& cols, const char*& stage, char* message)
{
    jpeg_decompress_struct cinfo;
    JpegErrorManager err;
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = jpeg_error_exit;
    stage = "creating decoder";
    if (setjmp(err.jump)) {
        std::strncpy(message, err.message, JMSG_LENGTH_MAX);
        jpeg_destroy_decompress(&cinfo);
        return false;
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    stage = "reading header";
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    stage = "starting decompression";
    jpeg_start_decompress(&cinfo);
    rows = cinfo.output_height;
    cols = cinfo.output_width;
    out.resize(static_cast<std::size_t>(rows) * cols * 3);
    stage = "reading scanlines";
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = out.data() + static_cast<std::size_t>(cinfo.output_scanline) * cols * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    stage = "finishing decompression";
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return true;
}

ImageD decode_jpeg(std::span<const std::uint8_t> bytes)
{
    std::vector<std::uint8_t> buf;
    unsigned rows = 0, cols = 0;
    const char* stage = "";
    char message[JMSG_LENGTH_MAX] = {0};
    if (!decode_jpeg_raw(bytes, buf, rows, cols, stage, message)) {
        throw DecodeError(std::string("jpeg: ") + stage + ": " + message);
    }
    std::vector<double> samples(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) samples[i] = buf[i] / 255.0;
    return ImageD::from_interleaved(rows, cols, samples);
}

Bytes write_png(const std::vector<std::uint8_t>& pixels, Index rows, Index cols, png_uint_32 format)
{
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(cols);
    image.height = static_cast<png_uint_32>(rows);
    image.format = format;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0, nullptr)) {
        throw IoError(std::string("png: sizing output: ") + image.message);
    }
    Bytes out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels.data(), 0, nullptr)) {
        throw IoError(std::string("png: writing output: ") + image.message);
    }
    out.resize(size);
    return out;
}

} // namespace

std::uint8_t quantize(double s)
{
    const double v = std::clamp(std::floor(s * 255.0 + 0.5), 0.0, 255.0);
    return static_cast<std::uint8_t>(v);
}

ImageD decode_image(std::span<const std::uint8_t> bytes)
{
    if (is_png(bytes)) return decode_png(bytes);
    if (is_jpeg(bytes)) return decode_jpeg(bytes);
    throw DecodeError("signature: not a PNG or JPEG stream");
}

Bytes encode_png(const ImageD& img)
{
    if (img.empty()) throw ArgumentError("encode_png: empty image");
    const auto samples = img.interleaved();
    std::vector<std::uint8_t> px(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) px[i] = quantize(samples[i]);
    return write_png(px, img.rows(), img.cols(), PNG_FORMAT_RGB);
}

Bytes encode_png_gray(const MapD& map)
{
    if (map.size() == 0) throw ArgumentError("encode_png_gray: empty map");
    std::vector<std::uint8_t> px(static_cast<std::size_t>(map.size()));
    for (Index i = 0; i < map.size(); ++i) px[i] = quantize(map(i / map.cols(), i % map.cols()));
    return write_png(px, map.rows(), map.cols(), PNG_FORMAT_GRAY);
}

Bytes read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path.string());
    return data;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace dehaze
