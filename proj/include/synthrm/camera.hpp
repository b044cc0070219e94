#pragma once

#include "synthrm/math.hpp"

namespace synthrm {

// Pinhole camera. World-to-camera: p_c = R * p_w + t; the camera looks
// down +z in its own frame, image v grows downward.
struct CameraModel {
    double fx = 0, fy = 0;
    double cx = 0, cy = 0;
    int width = 0, height = 0;
    Mat3 R;
    Vec3 t;

    void validate() const; // throws std::invalid_argument

    Vec3 center() const { return R.transposed() * (-t); }

    Vec3 world_to_camera(const Vec3& p) const { return R * p + t; }

    // Projects a world point; returns false when behind the camera.
    bool project(const Vec3& p_world, double& u, double& v, double& depth) const;

    // World-space ray for pixel (u, v): origin + s * dir, where the ray
    // parameter s equals camera-frame z-depth (dir has unit camera z).
    void pixel_ray(double u, double v, Vec3& origin, Vec3& dir) const;

    static CameraModel look_at(const Vec3& eye, const Vec3& target, double fx, double fy,
                               double cx, double cy, int width, int height);
};

} // namespace synthrm
