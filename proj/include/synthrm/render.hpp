#pragma once

#include <cstdint>

#include "synthrm/bvh.hpp"
#include "synthrm/camera.hpp"
#include "synthrm/scene.hpp"

namespace synthrm {

struct Rgb {
    float r = 0, g = 0, b = 0;
};

// Pixel-aligned optical buffers. depth is camera-frame z-depth in meters,
// NaN where no geometry (semantic == Sky).
struct ViewBuffers {
    Image<float> depth;
    Image<Vec3> normal;
    Image<int32_t> semantic;   // SemanticClass values, Sky where empty
    Image<Rgb> color;
    Image<float> albedo;
    Image<float> roughness;
    Image<int32_t> triangle_id; // source scene triangle, -1 for Sky
};

ViewBuffers render_view(const Scene& scene, const CameraModel& camera);

// Reuses an already-built occlusion structure over scene.triangles.
ViewBuffers render_view(const Scene& scene, const Bvh& bvh, const CameraModel& camera);

enum class TrajectoryKind { OrbitUAV, StreetVehicle };

std::vector<CameraModel> sample_trajectory(const Scene& scene, TrajectoryKind kind,
                                           int count, uint64_t seed,
                                           int width = 256, int height = 256,
                                           double fov_deg = 60.0);

} // namespace synthrm
