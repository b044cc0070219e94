#include <doctest.h>

#include <cstring>
#include <fstream>

#include "synthrm/io.hpp"
#include "synthrm/render.hpp"
#include "synthrm/vas.hpp"

using namespace synthrm;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
    fs::path p = fs::temp_directory_path() / "synthrm_io_test";
    fs::create_directories(p);
    return p;
}

} // namespace

TEST_CASE("PFM round trip preserves bits, including NaN payloads") {
    Image<float> img(2, 2);
    img.data = {1.0f, -83.33f, std::numeric_limits<float>::quiet_NaN(), 0.0f};
    // A NaN with a nonstandard payload must survive too.
    uint32_t weird = 0x7fc12345u;
    std::memcpy(&img.data[2], &weird, 4);

    fs::path p = tmp_dir() / "roundtrip.pfm";
    write_raster(p, img);
    Image<float> back = read_raster(p);
    REQUIRE(back.width == 2);
    REQUIRE(back.height == 2);
    for (int i = 0; i < 4; ++i) {
        uint32_t a, b;
        std::memcpy(&a, &img.data[i], 4);
        std::memcpy(&b, &back.data[i], 4);
        CHECK(a == b);
    }
}

TEST_CASE("PFM header matches the format definition") {
    Image<float> img(640, 480, 0.0f);
    fs::path p = tmp_dir() / "header.pfm";
    write_raster(p, img);
    std::ifstream f(p, std::ios::binary);
    std::string l1, l2, l3;
    std::getline(f, l1);
    std::getline(f, l2);
    std::getline(f, l3);
    CHECK(l1 == "Pf");
    CHECK(l2 == "640 480");
    CHECK(l3 == "-1.0");
}

TEST_CASE("big-endian PFM fixture reads with byte swap") {
    // 2x1 map {1.5, -2.0}, stored big-endian (positive scale), bottom-to-top.
    fs::path p = tmp_dir() / "bigendian.pfm";
    {
        std::ofstream f(p, std::ios::binary);
        f << "Pf\n2 1\n1.0\n";
        unsigned char bytes[8] = {0x3f, 0xc0, 0x00, 0x00,   // 1.5
                                  0xc0, 0x00, 0x00, 0x00};  // -2.0
        f.write(reinterpret_cast<char*>(bytes), 8);
    }
    Image<float> img = read_raster(p);
    REQUIRE(img.width == 2);
    REQUIRE(img.height == 1);
    CHECK(img.data[0] == 1.5f);
    CHECK(img.data[1] == -2.0f);
}

TEST_CASE("malformed PFM files are rejected") {
    fs::path p = tmp_dir() / "bad.pfm";
    {
        std::ofstream f(p, std::ios::binary);
        f << "PF\n2 2\n-1.0\n";
    }
    CHECK_THROWS(read_raster(p));
    {
        std::ofstream f(p, std::ios::binary);
        f << "Pf\n4 4\n-1.0\nxx"; // truncated payload
    }
    CHECK_THROWS(read_raster(p));
    CHECK_THROWS(read_raster(tmp_dir() / "does_not_exist.pfm"));
}

TEST_CASE("PPM round trip") {
    Image<Rgb> img(3, 2);
    for (size_t i = 0; i < img.size(); ++i)
        img.data[i] = {i / 6.0f, 1.0f - i / 6.0f, 0.5f};
    fs::path p = tmp_dir() / "color.ppm";
    write_ppm(p, img);
    Image<Rgb> back = read_ppm(p);
    REQUIRE(back.same_shape(img));
    for (size_t i = 0; i < img.size(); ++i) {
        CHECK(back.data[i].r == doctest::Approx(img.data[i].r).epsilon(0.01));
        CHECK(back.data[i].g == doctest::Approx(img.data[i].g).epsilon(0.01));
    }
}

TEST_CASE("VAS PLY round trip keeps faces and per-face gain") {
    CameraModel cam;
    cam.fx = cam.fy = 20;
    cam.cx = cam.cy = 4;
    cam.width = cam.height = 8;
    Image<float> depth(8, 8, 12.0f);
    VasMesh mesh = reconstruct_vas(depth, cam);
    REQUIRE(!mesh.empty());
    std::vector<double> gain(mesh.faces.size());
    for (size_t i = 0; i < gain.size(); ++i) gain[i] = -60.0 - (double)i;

    fs::path p = tmp_dir() / "mesh.ply";
    write_vas_ply(p, mesh, gain);
    PlyData back = read_vas_ply(p);
    CHECK(back.faces.size() == mesh.faces.size());
    for (size_t i = 0; i < back.faces.size(); ++i) {
        CHECK(back.face_gain_db[i] == doctest::Approx(gain[i]));
        for (int k = 0; k < 3; ++k) {
            CHECK(back.faces[i][k] >= 0);
            CHECK(back.faces[i][k] < (int)back.vertices.size());
        }
    }
    CHECK_THROWS_AS(write_vas_ply(p, mesh, std::vector<double>(2)), std::invalid_argument);
}

TEST_CASE("camera json round trip keeps R orthonormal") {
    CameraModel cam = CameraModel::look_at({10, -5, 30}, {0, 0, 0}, 48, 50, 31.5, 32.5, 64, 64);
    fs::path p = tmp_dir() / "camera.json";
    write_camera_json(p, cam);
    CameraModel back = read_camera_json(p);
    CHECK_NOTHROW(back.validate());
    for (int i = 0; i < 9; ++i) CHECK(back.R.m[i] == cam.R.m[i]);
    CHECK(back.t.z == cam.t.z);
    CHECK(back.fx == cam.fx);
    CHECK(back.cy == cam.cy);
}

TEST_CASE("scene OBJ groups by semantic class") {
    Scene s = generate_city(BlockSpec::for_archetype(Archetype::Mix, 120, 44));
    fs::path p = tmp_dir() / "scene.obj";
    write_scene_obj(p, s);
    std::ifstream f(p);
    std::string line;
    int groups = 0, faces = 0;
    while (std::getline(f, line)) {
        if (line.rfind("g ", 0) == 0) ++groups;
        if (line.rfind("f ", 0) == 0) ++faces;
    }
    CHECK(groups == 4); // terrain, road, wall, roof
    CHECK(faces == (int)s.triangles.size());
}
