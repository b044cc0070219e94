#include "synthrm/render.hpp"

#include <cmath>
#include <stdexcept>

#include "synthrm/parallel.hpp"
#include "synthrm/rng.hpp"

namespace synthrm {

namespace {

const Vec3 kSunDir = normalize(Vec3{0.35, 0.25, -0.9}); // travel direction of light

Rgb base_color(SemanticClass c) {
    switch (c) {
        case SemanticClass::Terrain: return {0.42f, 0.50f, 0.30f};
        case SemanticClass::Road: return {0.32f, 0.32f, 0.34f};
        case SemanticClass::BuildingWall: return {0.62f, 0.58f, 0.54f};
        case SemanticClass::BuildingRoof: return {0.48f, 0.34f, 0.30f};
        case SemanticClass::Sky: return {0.55f, 0.70f, 0.90f};
    }
    return {0, 0, 0};
}

} // namespace

ViewBuffers render_view(const Scene& scene, const CameraModel& camera) {
    Bvh bvh(scene.triangles);
    return render_view(scene, bvh, camera);
}

ViewBuffers render_view(const Scene& scene, const Bvh& bvh, const CameraModel& camera) {
    camera.validate();
    const int W = camera.width, H = camera.height;
    const float nan = std::numeric_limits<float>::quiet_NaN();

    ViewBuffers out;
    out.depth = Image<float>(W, H, nan);
    out.normal = Image<Vec3>(W, H, Vec3{0, 0, 0});
    out.semantic = Image<int32_t>(W, H, (int32_t)SemanticClass::Sky);
    out.color = Image<Rgb>(W, H, base_color(SemanticClass::Sky));
    out.albedo = Image<float>(W, H, nan);
    out.roughness = Image<float>(W, H, nan);
    out.triangle_id = Image<int32_t>(W, H, -1);

    const Vec3 origin = camera.center();
    parallel_for(0, H, [&](int v) {
        for (int u = 0; u < W; ++u) {
            Vec3 o, dir;
            camera.pixel_ray((double)u, (double)v, o, dir);
            auto hit = bvh.closest_hit(origin, dir, 1e-6);
            if (!hit) continue;
            const Triangle& tri = scene.triangles[hit->triangle];
            const Material& mat = material_table()[tri.material_id];

            out.depth.at(u, v) = (float)hit->t; // ray parameter == z-depth
            out.normal.at(u, v) = tri.normal;
            out.semantic.at(u, v) = (int32_t)tri.semantic;
            out.triangle_id.at(u, v) = hit->triangle;
            out.albedo.at(u, v) = (float)mat.albedo;
            out.roughness.at(u, v) = (float)mat.roughness;

            double lambert = std::max(0.0, dot(tri.normal, -kSunDir));
            double shade = 0.25 + 0.75 * lambert;
            Rgb base = base_color(tri.semantic);
            out.color.at(u, v) = {(float)(base.r * shade), (float)(base.g * shade),
                                  (float)(base.b * shade)};
        }
    });
    return out;
}

std::vector<CameraModel> sample_trajectory(const Scene& scene, TrajectoryKind kind,
                                           int count, uint64_t seed,
                                           int width, int height, double fov_deg) {
    if (count < 1) throw std::invalid_argument("sample_trajectory: count must be >= 1");
    const double f = (width / 2.0) / std::tan(fov_deg * kPi / 360.0);
    const double cx = width / 2.0, cy = height / 2.0;
    Rng rng(derive_seed(seed, 0x747261)); // "tra"
    std::vector<CameraModel> out;
    out.reserve(count);

    if (kind == TrajectoryKind::OrbitUAV) {
        Vec3 c = scene.bounds.center();
        double extent = std::max(scene.bounds.hi.x - scene.bounds.lo.x,
                                 scene.bounds.hi.y - scene.bounds.lo.y);
        double radius = 0.6 * extent;
        double alt = scene.bounds.hi.z + 0.3 * extent;
        double phase = rng.uniform(0, 2 * kPi);
        for (int i = 0; i < count; ++i) {
            double a = phase + 2 * kPi * i / count;
            Vec3 eye{c.x + radius * std::cos(a), c.y + radius * std::sin(a), alt};
            out.push_back(CameraModel::look_at(eye, c, f, f, cx, cy, width, height));
        }
        return out;
    }

    // StreetVehicle: drive a vertical road strip at ground-agent height.
    if (!scene.has_road()) throw std::runtime_error("sample_trajectory: scene has no road strips");
    double lane_x = scene.bounds.lo.x;
    for (const auto& t : scene.triangles)
        if (t.semantic == SemanticClass::Road) {
            Aabb b;
            b.expand(t.v0); b.expand(t.v1); b.expand(t.v2);
            lane_x = b.center().x;
            break;
        }
    double y0 = scene.bounds.lo.y + 2.0, y1 = scene.bounds.hi.y - 2.0;
    double jitter = rng.uniform(0.0, 1.0);
    for (int i = 0; i < count; ++i) {
        double frac = count > 1 ? (i + 0.5 * jitter) / count : 0.5;
        double y = y0 + frac * (y1 - y0);
        Vec3 eye{lane_x, y, scene.datum_z + kTxHeightAboveDatum};
        Vec3 target{lane_x, y + 10.0, scene.datum_z + kTxHeightAboveDatum};
        out.push_back(CameraModel::look_at(eye, target, f, f, cx, cy, width, height));
    }
    return out;
}

} // namespace synthrm
