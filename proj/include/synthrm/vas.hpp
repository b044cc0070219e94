#pragma once

#include <array>
#include <cstdint>

#include "synthrm/camera.hpp"
#include "synthrm/math.hpp"

namespace synthrm {

// Visible-surface mesh lifted from a depth buffer. Vertex index of pixel
// (u, v) is v * W + u; faces reference only valid vertices.
struct VasMesh {
    int width = 0, height = 0;
    Image<Vec3> vertices;
    Image<uint8_t> valid;
    std::vector<std::array<int, 3>> faces;
    std::vector<Vec3> centroids;
    std::vector<Vec3> face_normals;
    // Source quad anchor pixel (u, v) and diagonal half (0 or 1).
    struct FacePixel { int u, v, half; };
    std::vector<FacePixel> pixel_of_face;

    bool empty() const { return faces.empty(); }
};

struct ReceiverProbe {
    Vec3 position; // equals the face centroid bit-exactly
    int face_index = -1;
    int u = 0, v = 0;
};

// Quad culling thresholds: depth ratio / absolute spread catch occlusion
// jumps, the crease angle catches quads folded across two surfaces (which
// would otherwise park probes off every source plane), and the curvature
// rule catches small jumps between nearby planes. On a single plane the
// inverse z-depth is exactly linear in pixel coordinates, so a nonzero
// second difference of 1/d across a quad edge (relative to 1/d itself)
// marks the edge as straddling two surfaces.
struct VasOptions {
    double max_depth_ratio = 1.15;
    double max_depth_spread = 2.0;   // meters
    double max_crease_cos = std::cos(15.0 * kPi / 180.0);
    double curvature_tol = 1e-5;     // relative to 1/depth
};

// Eq. of the lifting map: R^T (depth * K^-1 [u v 1]^T - t).
// Throws std::invalid_argument on non-finite or non-positive depth.
Vec3 lift_pixel(double u, double v, double depth, const CameraModel& camera);

VasMesh reconstruct_vas(const Image<float>& depth, const CameraModel& camera,
                        const VasOptions& opts = {});

std::vector<ReceiverProbe> receiver_probes(const VasMesh& mesh);

} // namespace synthrm
