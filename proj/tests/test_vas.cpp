#include <doctest.h>

#include <cmath>

#include "synthrm/render.hpp"
#include "synthrm/rng.hpp"
#include "synthrm/vas.hpp"

using namespace synthrm;

namespace {

CameraModel identity_camera(int w, int h, double f) {
    CameraModel cam;
    cam.fx = cam.fy = f;
    cam.cx = w / 2.0;
    cam.cy = h / 2.0;
    cam.width = w;
    cam.height = h;
    return cam;
}

} // namespace

TEST_CASE("lift_pixel hand-evaluated cases") {
    CameraModel cam = identity_camera(64, 64, 32.0);
    Vec3 p = lift_pixel(cam.cx, cam.cy, 5.0, cam);
    CHECK(p.x == doctest::Approx(0.0));
    CHECK(p.y == doctest::Approx(0.0));
    CHECK(p.z == doctest::Approx(5.0));

    p = lift_pixel(cam.cx + cam.fx, cam.cy, 2.0, cam);
    CHECK(p.x == doctest::Approx(2.0));
    CHECK(p.y == doctest::Approx(0.0));
    CHECK(p.z == doctest::Approx(2.0));

    CHECK_THROWS_AS(lift_pixel(0, 0, -1.0, cam), std::invalid_argument);
    CHECK_THROWS_AS(lift_pixel(0, 0, std::nan(""), cam), std::invalid_argument);
}

TEST_CASE("lift then forward-project recovers the pixel for arbitrary poses") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        Vec3 eye{rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(5, 80)};
        Vec3 target{rng.uniform(-20, 20), rng.uniform(-20, 20), 0};
        CameraModel cam = CameraModel::look_at(eye, target, 48, 48, 32, 32, 64, 64);
        double u = rng.uniform(0, 63), v = rng.uniform(0, 63), d = rng.uniform(1, 200);
        Vec3 p = lift_pixel(u, v, d, cam);
        double ru, rv, rd;
        REQUIRE(cam.project(p, ru, rv, rd));
        CHECK(ru == doctest::Approx(u).epsilon(1e-9));
        CHECK(rv == doctest::Approx(v).epsilon(1e-9));
        CHECK(rd == doctest::Approx(d).epsilon(1e-9));
    }
}

TEST_CASE("smooth 3x3 depth yields the full 8 faces") {
    CameraModel cam = identity_camera(3, 3, 10.0);
    Image<float> depth(3, 3, 7.0f);
    VasMesh mesh = reconstruct_vas(depth, cam);
    CHECK(mesh.faces.size() == 8);
    CHECK(mesh.centroids.size() == 8);
    CHECK(mesh.pixel_of_face.size() == 8);
    // pixel_of_face unique per quad half
    for (size_t i = 0; i < mesh.faces.size(); ++i)
        for (size_t j = i + 1; j < mesh.faces.size(); ++j) {
            bool same = mesh.pixel_of_face[i].u == mesh.pixel_of_face[j].u &&
                        mesh.pixel_of_face[i].v == mesh.pixel_of_face[j].v &&
                        mesh.pixel_of_face[i].half == mesh.pixel_of_face[j].half;
            CHECK(!same);
        }
}

TEST_CASE("a NaN corner kills its quad") {
    CameraModel cam = identity_camera(3, 3, 10.0);
    Image<float> depth(3, 3, 7.0f);
    depth.at(0, 0) = std::numeric_limits<float>::quiet_NaN();
    VasMesh mesh = reconstruct_vas(depth, cam);
    CHECK(mesh.faces.size() == 6); // three surviving quads
    for (const auto& f : mesh.faces)
        for (int idx : f) CHECK(mesh.valid.data[idx] == 1);
}

TEST_CASE("depth discontinuities are culled per the ratio and spread rules") {
    CameraModel cam = identity_camera(4, 2, 10.0);
    Image<float> depth(4, 2, 10.0f);
    // Quad 0: smooth. Quad 1: ratio jump (10 -> 20). Quad 2: ratio fine
    // (20 -> 22.5 is 1.125) but spread 2.5 m breaks the absolute rule.
    depth.at(2, 0) = 20.0f;
    depth.at(2, 1) = 20.0f;
    depth.at(3, 0) = 22.5f;
    depth.at(3, 1) = 22.5f;
    VasOptions opts;
    opts.max_crease_cos = -1.0;  // isolate the depth rules
    opts.curvature_tol = 1e300;
    VasMesh mesh = reconstruct_vas(depth, cam, opts);
    CHECK(mesh.faces.size() == 2); // only quad 0 survives

    // Brute-force re-count with the same thresholds.
    int expected = 0;
    for (int u = 0; u + 1 < 4; ++u) {
        double d[4] = {depth.at(u, 0), depth.at(u + 1, 0), depth.at(u, 1), depth.at(u + 1, 1)};
        double lo = std::min(std::min(d[0], d[1]), std::min(d[2], d[3]));
        double hi = std::max(std::max(d[0], d[1]), std::max(d[2], d[3]));
        if (hi / lo <= 1.15 && hi - lo <= 2.0) expected += 2;
    }
    CHECK((int)mesh.faces.size() == expected);
}

TEST_CASE("inverse-depth curvature culls quads bridging parallel planes") {
    // Two fronto-parallel planes 0.5 m apart: ratio and spread both pass,
    // the fitted halves are parallel (crease passes), but 1/d is not linear
    // across the seam, so the bridging quad must go.
    CameraModel cam = identity_camera(6, 2, 10.0);
    Image<float> depth(6, 2, 10.0f);
    for (int v = 0; v < 2; ++v)
        for (int u = 3; u < 6; ++u) depth.at(u, v) = 10.5f;
    VasMesh mesh = reconstruct_vas(depth, cam);
    CHECK(mesh.faces.size() == 8); // the seam quad at u = 2 dies
    for (const auto& px : mesh.pixel_of_face) CHECK(px.u != 2);

    // A slanted single plane keeps every quad: 1/d linear along u.
    Image<float> slant(6, 2);
    for (int v = 0; v < 2; ++v)
        for (int u = 0; u < 6; ++u) slant.at(u, v) = (float)(1.0 / (0.1 - 0.004 * u));
    CHECK(reconstruct_vas(slant, cam).faces.size() == 10);
}

TEST_CASE("probes are bit-exact centroids, one per face") {
    Scene s = generate_city(BlockSpec::for_archetype(Archetype::Mix, 150, 12));
    auto cams = sample_trajectory(s, TrajectoryKind::OrbitUAV, 1, 4, 48, 48);
    ViewBuffers buf = render_view(s, cams[0]);
    VasMesh mesh = reconstruct_vas(buf.depth, cams[0]);
    REQUIRE(!mesh.empty());
    auto probes = receiver_probes(mesh);
    REQUIRE(probes.size() == mesh.faces.size());
    for (size_t i = 0; i < probes.size(); ++i) {
        CHECK(probes[i].position.x == mesh.centroids[i].x);
        CHECK(probes[i].position.y == mesh.centroids[i].y);
        CHECK(probes[i].position.z == mesh.centroids[i].z);
        CHECK(probes[i].face_index == (int)i);
        // centroid is the exact mean of its vertices
        const auto& f = mesh.faces[i];
        Vec3 m = (mesh.vertices.data[f[0]] + mesh.vertices.data[f[1]] +
                  mesh.vertices.data[f[2]]) / 3.0;
        CHECK(m.x == mesh.centroids[i].x);
        CHECK(m.z == mesh.centroids[i].z);
    }
}

TEST_CASE("face normals look back at the camera") {
    Scene s = generate_city(BlockSpec::for_archetype(Archetype::Downtown, 200, 5));
    auto cams = sample_trajectory(s, TrajectoryKind::OrbitUAV, 1, 1, 64, 64);
    ViewBuffers buf = render_view(s, cams[0]);
    VasMesh mesh = reconstruct_vas(buf.depth, cams[0]);
    REQUIRE(!mesh.empty());
    Vec3 cam_pos = cams[0].center();
    for (size_t i = 0; i < mesh.faces.size(); ++i)
        CHECK(dot(mesh.face_normals[i], mesh.centroids[i] - cam_pos) < 0);
}

TEST_CASE("rendered planar wall probes lie on the source plane") {
    Scene s;
    Vec3 n{0, 0, -1};
    s.triangles.push_back({{-50, -50, 8}, {50, -50, 8}, {50, 50, 8}, n,
                           kMaterialConcrete, SemanticClass::BuildingWall});
    s.triangles.push_back({{-50, -50, 8}, {50, 50, 8}, {-50, 50, 8}, n,
                           kMaterialConcrete, SemanticClass::BuildingWall});
    CameraModel cam = identity_camera(32, 32, 40.0);
    ViewBuffers buf = render_view(s, cam);
    VasMesh mesh = reconstruct_vas(buf.depth, cam);
    REQUIRE(!mesh.empty());
    for (const auto& c : mesh.centroids) CHECK(std::abs(c.z - 8.0) < 1e-3);
}

TEST_CASE("empty depth map reconstructs an empty mesh") {
    CameraModel cam = identity_camera(8, 8, 10.0);
    Image<float> depth(8, 8, std::numeric_limits<float>::quiet_NaN());
    VasMesh mesh = reconstruct_vas(depth, cam);
    CHECK(mesh.empty());
    CHECK(receiver_probes(mesh).empty());
}
