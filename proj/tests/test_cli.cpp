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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include <dehaze/codec.hpp>
#include <dehaze/restoration.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Sandbox
{
    fs::path dir;

    Sandbox()
    {
        dir = fs::temp_directory_path() / ("dehaze_cli_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }

    // Runs the binary with stdout to `out` (relative to the sandbox) and returns the exit code.
    int run(const std::string& args, const std::string& out = "stdout.txt", const std::string& env = "") const
    {
        const std::string cmd = env + " '" + std::string(DEHAZE_BIN) + "' " + args + " > '" + path(out) +
                                "' 2> '" + path("stderr.txt") + "'";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string text(const std::string& name) const
    {
        std::ifstream in(path(name), std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    Json json(const std::string& name) const { return Json::parse(text(name)); }
};

} // namespace

TEST_CASE("cli synth, defog and metrics")
{
    Sandbox sb;
    const std::string p = sb.path("s_");
    REQUIRE(sb.run("synth --out '" + p + "' --rows 60 --cols 90 --sky-rows 20 --seed 3") == 0);
    CHECK(fs::exists(p + "hazy.png"));
    CHECK(fs::exists(p + "truth.png"));
    CHECK(fs::exists(p + "meta.json"));

    REQUIRE(sb.run("defog '" + p + "hazy.png' '" + sb.path("out.png") + "' --refine-mode none", "rep.json") == 0);
    const Json rep = sb.json("rep.json");
    CHECK(rep["image"]["rows"] == 60);
    CHECK(rep["config"]["refine_mode"] == "none");
    CHECK(rep.contains("timings"));
    const dehaze::ImageD out = dehaze::read_image(sb.path("out.png"));
    CHECK(out.rows() == 60);
    CHECK(out.cols() == 90);

    REQUIRE(sb.run("metrics '" + p + "hazy.png' '" + sb.path("out.png") + "'", "m1.json") == 0);
    REQUIRE(sb.run("metrics '" + p + "hazy.png' '" + sb.path("out.png") + "'", "m2.json") == 0);
    CHECK(sb.text("m1.json") == sb.text("m2.json"));
    CHECK(sb.json("m1.json").contains("eme"));
}

TEST_CASE("cli error exit codes")
{
    Sandbox sb;
    CHECK(sb.run("defog '" + std::string(DEHAZE_TEST_DATA) + "/truncated.png' '" + sb.path("x.png") + "'") == 3);
    CHECK(sb.run("defog '" + sb.path("missing.png") + "' '" + sb.path("x.png") + "'") == 3);
    CHECK(sb.run("metrics '" + std::string(DEHAZE_TEST_DATA) + "/red_1x1.png' '" + std::string(DEHAZE_TEST_DATA) +
                 "/black_2x2.png'") == 2);
    CHECK(sb.run("defog") == 2);
    CHECK(sb.run("config --k 0") == 2);
    CHECK(sb.run("config --refine-mode bogus") == 2);
    // tiny solver budget cannot converge
    REQUIRE(sb.run("synth --out '" + sb.path("s_") + "' --rows 40 --cols 60 --sky-rows 15") == 0);
    CHECK(sb.run("defog '" + sb.path("s_hazy.png") + "' '" + sb.path("x.png") +
                 "' --refine-mode matting --solver-max-iter 1") == 4);
    CHECK(sb.text("stderr.txt").find("relative_residual") != std::string::npos);
}

TEST_CASE("cli synth is deterministic and honours beta = 0")
{
    Sandbox sb;
    REQUIRE(sb.run("synth --out '" + sb.path("a_") + "' --rows 50 --cols 70 --sky-rows 20 --seed 9") == 0);
    REQUIRE(sb.run("synth --out '" + sb.path("b_") + "' --rows 50 --cols 70 --sky-rows 20 --seed 9") == 0);
    CHECK(sb.text("a_hazy.png") == sb.text("b_hazy.png"));
    CHECK(sb.text("a_t.png") == sb.text("b_t.png"));

    REQUIRE(sb.run("synth --out '" + sb.path("c_") + "' --rows 50 --cols 70 --sky-rows 20 --beta 0") == 0);
    CHECK(sb.text("c_hazy.png") == sb.text("c_truth.png"));

    // t.png holds round(255 t)
    const Json meta = sb.json("a_meta.json");
    const dehaze::SceneSpec spec = [&] {
        dehaze::SceneSpec s;
        s.rows = 50;
        s.cols = 70;
        s.sky_rows = 20;
        s.seed = 9;
        return s;
    }();
    const auto scene = dehaze::synth_scene(spec);
    const auto bytes = dehaze::read_file(sb.path("a_t.png"));
    const dehaze::ImageD t = dehaze::decode_image(bytes);
    for (dehaze::Index i = 0; i < 50; ++i) {
        for (dehaze::Index j = 0; j < 70; ++j) {
            CHECK(std::lround(t(i, j, 0) * 255.0) == dehaze::quantize(scene.transmission(i, j)));
        }
    }
    CHECK(meta["size"][0] == 50);

    // spec file round trip
    REQUIRE(sb.run("synth --out '" + sb.path("d_") + "' --spec '" + sb.path("a_meta.json") + "'") == 0);
    CHECK(sb.text("d_hazy.png") == sb.text("a_hazy.png"));
    CHECK(sb.run("synth --out '" + sb.path("e_") + "' --rows 50 --cols 70 --sky-rows 20 --sky-depth inf") == 0);
}

TEST_CASE("cli config resolution: file, flags, environment")
{
    Sandbox sb;
    REQUIRE(sb.run("config", "default.json") == 0);
    const Json def = sb.json("default.json");
    CHECK(def["k"] == 5);
    CHECK(def["window_radius"] == 7);

    {
        std::ofstream f(sb.path("cfg.json"));
        f << R"({"k": 4, "fraction": 0.002})";
    }
    REQUIRE(sb.run("config --config '" + sb.path("cfg.json") + "'", "file.json") == 0);
    CHECK(sb.json("file.json")["k"] == 4);
    CHECK(sb.json("file.json")["fraction"] == 0.002);

    REQUIRE(sb.run("config --config '" + sb.path("cfg.json") + "' --k 6", "flag.json") == 0);
    CHECK(sb.json("flag.json")["k"] == 6);
    CHECK(sb.json("flag.json")["fraction"] == 0.002);

    REQUIRE(sb.run("config", "env.json", "DEHAZE_K=3 DEHAZE_REFINE_MODE=none") == 0);
    CHECK(sb.json("env.json")["k"] == 3);
    CHECK(sb.json("env.json")["refine_mode"] == "none");

    // the resolved config feeds back in unchanged
    REQUIRE(sb.run("config --config '" + sb.path("flag.json") + "'", "again.json") == 0);
    CHECK(sb.text("again.json") == sb.text("flag.json"));
}

TEST_CASE("cli airlight compare and annotate")
{
    Sandbox sb;
    REQUIRE(sb.run("synth --out '" + sb.path("s_") + "' --rows 80 --cols 120 --sky-rows 25 --distractor 50 50 12 12") ==
            0);
    REQUIRE(sb.run("airlight '" + sb.path("s_hazy.png") + "' --compare --annotate '" + sb.path("ann.png") + "'",
                   "air.json") == 0);
    const Json j = sb.json("air.json");
    CHECK(j.contains("clustered"));
    CHECK(j.contains("baseline"));
    CHECK(j["distance"].get<double>() >= 0.0);

    const dehaze::ImageD src = dehaze::read_image(sb.path("s_hazy.png"));
    const dehaze::ImageD ann = dehaze::read_image(sb.path("ann.png"));
    int changed = 0, off_marker = 0;
    for (dehaze::Index i = 0; i < src.rows(); ++i) {
        for (dehaze::Index j2 = 0; j2 < src.cols(); ++j2) {
            if ((src.pixel(i, j2) != ann.pixel(i, j2)).any()) {
                ++changed;
                const bool red = (ann.pixel(i, j2) == Eigen::Array3d(1, 0, 0)).all();
                const bool blue = (ann.pixel(i, j2) == Eigen::Array3d(0, 0, 1)).all();
                if (!red && !blue) ++off_marker;
            }
        }
    }
    CHECK(changed > 0);
    CHECK(off_marker == 0);
}

TEST_CASE("cli defog output and report are reproducible")
{
    Sandbox sb;
    REQUIRE(sb.run("synth --out '" + sb.path("s_") + "' --rows 64 --cols 96 --sky-rows 20") == 0);
    REQUIRE(sb.run("defog '" + sb.path("s_hazy.png") + "' '" + sb.path("o1.png") + "'", "r1.json") == 0);
    REQUIRE(sb.run("defog '" + sb.path("s_hazy.png") + "' '" + sb.path("o2.png") + "'", "r2.json") == 0);
    CHECK(sb.text("o1.png") == sb.text("o2.png"));
    Json r1 = sb.json("r1.json"), r2 = sb.json("r2.json");
    r1.erase("timings");
    r2.erase("timings");
    CHECK(r1 == r2);
}
