#include "synthrm/vas.hpp"

#include <cmath>
#include <stdexcept>

#include "synthrm/parallel.hpp"

namespace synthrm {

Vec3 lift_pixel(double u, double v, double depth, const CameraModel& camera) {
    if (!std::isfinite(depth) || depth <= 0)
        throw std::invalid_argument("lift_pixel: depth must be finite and > 0");
    Vec3 pc{depth * (u - camera.cx) / camera.fx, depth * (v - camera.cy) / camera.fy, depth};
    return camera.R.transposed() * (pc - camera.t);
}

namespace {

struct QuadFaces {
    std::array<int, 3> idx[2];
    Vec3 centroid[2];
    Vec3 normal[2];
    int count = 0;
};

// True when the edge (u,v)->(u+du,v+dv) straddles two surfaces. Inverse
// z-depth is exactly linear in pixel coordinates on a plane, so the second
// difference of 1/d over any collinear pixel triple containing the edge
// vanishes on a single surface. The minimum over the two continuation
// triples is used so that a quad merely adjacent to a crease survives.
bool depth_step(const Image<float>& depth, const Image<uint8_t>& valid, int u, int v, int du,
                int dv, const VasOptions& opts) {
    const double ia = 1.0 / depth.at(u, v);
    const double ib = 1.0 / depth.at(u + du, v + dv);
    const double edge = ib - ia;
    double curv = 1e300;
    bool any = false;
    const int pu = u - du, pv = v - dv;
    if (pu >= 0 && pv >= 0 && pu < depth.width && pv < depth.height && valid.at(pu, pv)) {
        curv = std::min(curv, std::abs(edge - (ia - 1.0 / depth.at(pu, pv))));
        any = true;
    }
    const int nu = u + 2 * du, nv = v + 2 * dv;
    if (nu >= 0 && nv >= 0 && nu < depth.width && nv < depth.height && valid.at(nu, nv)) {
        curv = std::min(curv, std::abs((1.0 / depth.at(nu, nv) - ib) - edge));
        any = true;
    }
    if (!any) return false;
    return curv > opts.curvature_tol * std::max(ia, ib);
}

// Emits up to two triangles for the quad anchored at (u, v), split along the
// (u,v)-(u+1,v+1) diagonal, wound toward the camera.
QuadFaces build_quad(const Image<Vec3>& verts, const Image<uint8_t>& valid,
                     const Image<float>& depth, int u, int v, const Vec3& cam_pos,
                     const VasOptions& opts) {
    QuadFaces out;
    const int W = verts.width;
    if (!valid.at(u, v) || !valid.at(u + 1, v) || !valid.at(u, v + 1) || !valid.at(u + 1, v + 1))
        return out;

    double d00 = depth.at(u, v), d10 = depth.at(u + 1, v);
    double d01 = depth.at(u, v + 1), d11 = depth.at(u + 1, v + 1);
    double dmin = std::min(std::min(d00, d10), std::min(d01, d11));
    double dmax = std::max(std::max(d00, d10), std::max(d01, d11));
    if (dmax / dmin > opts.max_depth_ratio) return out;
    if (dmax - dmin > opts.max_depth_spread) return out;
    if (depth_step(depth, valid, u, v, 1, 0, opts) ||
        depth_step(depth, valid, u, v + 1, 1, 0, opts) ||
        depth_step(depth, valid, u, v, 0, 1, opts) ||
        depth_step(depth, valid, u + 1, v, 0, 1, opts))
        return out;

    const int i00 = v * W + u, i10 = v * W + u + 1;
    const int i01 = (v + 1) * W + u, i11 = (v + 1) * W + u + 1;
    const Vec3& p00 = verts.data[i00];
    const Vec3& p10 = verts.data[i10];
    const Vec3& p01 = verts.data[i01];
    const Vec3& p11 = verts.data[i11];

    std::array<int, 3> tri[2] = {{i00, i10, i11}, {i00, i11, i01}};
    const Vec3* pts[2][3] = {{&p00, &p10, &p11}, {&p00, &p11, &p01}};

    Vec3 normals[2];
    for (int k = 0; k < 2; ++k) {
        Vec3 n = cross(*pts[k][1] - *pts[k][0], *pts[k][2] - *pts[k][0]);
        double l = length(n);
        if (l < 1e-15) return out; // degenerate quad
        normals[k] = n / l;
    }
    if (dot(normals[0], normals[1]) < opts.max_crease_cos) return out;

    for (int k = 0; k < 2; ++k) {
        std::array<int, 3> ids = tri[k];
        Vec3 n = normals[k];
        if (dot(n, *pts[k][0] + *pts[k][1] + *pts[k][2] - cam_pos * 3.0) > 0) {
            std::swap(ids[1], ids[2]); // flip toward the camera
            n = -n;
        }
        // Summed in final vertex-index order so probes can reproduce the
        // centroid bit-exactly from the face.
        Vec3 centroid =
            (verts.data[ids[0]] + verts.data[ids[1]] + verts.data[ids[2]]) / 3.0;
        out.idx[out.count] = ids;
        out.centroid[out.count] = centroid;
        out.normal[out.count] = n;
        ++out.count;
    }
    return out;
}

} // namespace

VasMesh reconstruct_vas(const Image<float>& depth, const CameraModel& camera,
                        const VasOptions& opts) {
    camera.validate();
    if (depth.width != camera.width || depth.height != camera.height)
        throw std::invalid_argument("reconstruct_vas: depth dimensions do not match camera");

    const int W = depth.width, H = depth.height;
    VasMesh mesh;
    mesh.width = W;
    mesh.height = H;
    mesh.vertices = Image<Vec3>(W, H);
    mesh.valid = Image<uint8_t>(W, H, 0);

    parallel_for(0, H, [&](int v) {
        for (int u = 0; u < W; ++u) {
            float d = depth.at(u, v);
            if (!std::isfinite(d) || d <= 0) continue;
            mesh.vertices.at(u, v) = lift_pixel(u, v, d, camera);
            mesh.valid.at(u, v) = 1;
        }
    });

    const Vec3 cam_pos = camera.center();
    // Row-major face ordering, independent of thread count.
    std::vector<QuadFaces> rows((size_t)(H - 1 > 0 ? H - 1 : 0) * (W - 1 > 0 ? W - 1 : 0));
    if (W >= 2 && H >= 2) {
        parallel_for(0, H - 1, [&](int v) {
            for (int u = 0; u < W - 1; ++u)
                rows[(size_t)v * (W - 1) + u] =
                    build_quad(mesh.vertices, mesh.valid, depth, u, v, cam_pos, opts);
        });
        for (int v = 0; v < H - 1; ++v)
            for (int u = 0; u < W - 1; ++u) {
                const QuadFaces& q = rows[(size_t)v * (W - 1) + u];
                for (int k = 0; k < q.count; ++k) {
                    mesh.faces.push_back(q.idx[k]);
                    mesh.centroids.push_back(q.centroid[k]);
                    mesh.face_normals.push_back(q.normal[k]);
                    mesh.pixel_of_face.push_back({u, v, k});
                }
            }
    }
    return mesh;
}

std::vector<ReceiverProbe> receiver_probes(const VasMesh& mesh) {
    std::vector<ReceiverProbe> probes;
    probes.reserve(mesh.faces.size());
    for (size_t i = 0; i < mesh.faces.size(); ++i) {
        const auto& px = mesh.pixel_of_face[i];
        probes.push_back({mesh.centroids[i], (int)i, px.u, px.v});
    }
    return probes;
}

} // namespace synthrm
