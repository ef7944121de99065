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

#include <doctest.h>

#include <dehaze/codec.hpp>
#include "support.hpp"

using namespace dehaze;

namespace {

ImageD fixture(const char* name)
{
    return read_image(std::filesystem::path(DEHAZE_TEST_DATA) / name);
}

} // namespace

TEST_CASE("decode fixtures")
{
    SUBCASE("1x1 red")
    {
        const ImageD img = fixture("red_1x1.png");
        CHECK(img.rows() == 1);
        CHECK(img.cols() == 1);
        CHECK((img.pixel(0, 0) == Eigen::Array3d(1.0, 0.0, 0.0)).all());
    }
    SUBCASE("2x2 black")
    {
        const ImageD img = fixture("black_2x2.png");
        for (int c = 0; c < 3; ++c) CHECK((img.channel(c) == 0.0).all());
    }
    SUBCASE("gray replicates, alpha is dropped")
    {
        const ImageD gray = fixture("gray_2x1.png");
        CHECK((gray.pixel(0, 0) == 0.0).all());
        CHECK((gray.pixel(0, 1) == 1.0).all());
        const ImageD rgba = fixture("rgba_2x1.png");
        CHECK((rgba.pixel(0, 0) == Eigen::Array3d(1.0, 0.0, 0.0)).all());
        CHECK((rgba.pixel(0, 1) == Eigen::Array3d(0.0, 1.0, 0.0)).all());
    }
    SUBCASE("jpeg")
    {
        const ImageD img = fixture("solid_8x8.jpg");
        CHECK(img.rows() == 8);
        const Eigen::Array3d want(200 / 255.0, 100 / 255.0, 50 / 255.0);
        CHECK((img.pixel(4, 4) - want).abs().maxCoeff() <= 3.0 / 255.0);
    }
}

TEST_CASE("decode errors name the stage")
{
    const Bytes junk{'n', 'o', 'p', 'e'};
    CHECK_THROWS_WITH_AS(decode_image(junk), doctest::Contains("signature"), DecodeError);
    const Bytes truncated = read_file(std::filesystem::path(DEHAZE_TEST_DATA) / "truncated.png");
    CHECK_THROWS_WITH_AS(decode_image(truncated), doctest::Contains("png:"), DecodeError);
    Bytes bad_jpeg{0xff, 0xd8, 0xff, 0xe0, 0x00, 0x02};
    CHECK_THROWS_WITH_AS(decode_image(bad_jpeg), doctest::Contains("jpeg:"), DecodeError);
    CHECK_THROWS_AS(read_file("/nonexistent/file.png"), IoError);
}

TEST_CASE("encode quantization")
{
    CHECK(quantize(0.5) == 128);
    CHECK(quantize(1.0) == 255);
    CHECK(quantize(0.0) == 0);
    CHECK(quantize(2.0 / 510.0) == 1);

    const ImageD white = ImageD::constant(1, 1, {1.0, 1.0, 1.0});
    CHECK((decode_image(encode_png(white)).pixel(0, 0) == 1.0).all());
    const ImageD gray = ImageD::constant(1, 1, {0.5, 0.5, 0.5});
    CHECK((decode_image(encode_png(gray)).pixel(0, 0) == 128.0 / 255.0).all());
}

TEST_CASE("png round trips")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Index h = 1 + rng() % 40, w = 1 + rng() % 40;
        const ImageD img = dehaze::testing::random_image(rng, h, w);
        const Bytes first = encode_png(img);
        const ImageD decoded = decode_image(first);
        // quantization bound
        for (int c = 0; c < 3; ++c) {
            CHECK((decoded.channel(c) - img.channel(c)).abs().maxCoeff() <= 0.5 / 255.0 + 1e-12);
        }
        // an 8-bit png re-encodes byte for byte
        CHECK(encode_png(decoded) == first);
    }
}

TEST_CASE("gray map encoding")
{
    MapD m(1, 3);
    m << 0.0, 0.2, 1.0;
    const ImageD back = decode_image(encode_png_gray(m));
    CHECK(back(0, 1, 0) == quantize(0.2) / 255.0);
    CHECK((back.channel(0) == back.channel(2)).all());
}
