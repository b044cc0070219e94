#include "synthrm/camera.hpp"

#include <cmath>
#include <stdexcept>

namespace synthrm {

void CameraModel::validate() const {
    if (fx <= 0 || fy <= 0) throw std::invalid_argument("camera: focal lengths must be > 0");
    if (width <= 0 || height <= 0) throw std::invalid_argument("camera: bad resolution");
    if (cx < 0 || cx >= width || cy < 0 || cy >= height)
        throw std::invalid_argument("camera: principal point outside image");
    Mat3 rtr = R.transposed() * R;
    double err = 0;
    for (int i = 0; i < 9; ++i) {
        double id = (i % 4 == 0) ? 1.0 : 0.0;
        err = std::max(err, std::abs(rtr.m[i] - id));
    }
    if (err >= 1e-9) throw std::invalid_argument("camera: R not orthonormal");
    if (std::abs(R.det() - 1.0) >= 1e-9) throw std::invalid_argument("camera: det R != +1");
}

bool CameraModel::project(const Vec3& p_world, double& u, double& v, double& depth) const {
    Vec3 pc = world_to_camera(p_world);
    if (pc.z <= 0) return false;
    u = fx * pc.x / pc.z + cx;
    v = fy * pc.y / pc.z + cy;
    depth = pc.z;
    return true;
}

void CameraModel::pixel_ray(double u, double v, Vec3& origin, Vec3& dir) const {
    origin = center();
    Vec3 d_cam{(u - cx) / fx, (v - cy) / fy, 1.0}; // K^-1 * (u, v, 1)
    dir = R.transposed() * d_cam;
}

CameraModel CameraModel::look_at(const Vec3& eye, const Vec3& target, double fx, double fy,
                                 double cx, double cy, int width, int height) {
    Vec3 forward = normalize(target - eye);
    Vec3 world_up{0, 0, 1};
    // Image-down axis: -world_up projected off the view direction.
    Vec3 down = -world_up + forward * dot(world_up, forward);
    double dl = length(down);
    if (dl < 1e-9) {
        // Looking straight up/down: pick +y as image-down.
        down = Vec3{0, 1, 0} - forward * dot(Vec3{0, 1, 0}, forward);
        dl = length(down);
    }
    down = down / dl;
    Vec3 right = cross(down, forward);

    CameraModel cam;
    cam.fx = fx; cam.fy = fy; cam.cx = cx; cam.cy = cy;
    cam.width = width; cam.height = height;
    cam.R = Mat3::from_rows(right, down, forward);
    cam.t = -(cam.R * eye);
    return cam;
}

} // namespace synthrm
