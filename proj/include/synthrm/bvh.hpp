#pragma once

#include <optional>
#include <vector>

#include "synthrm/scene.hpp"

namespace synthrm {

struct RayHit {
    double t = 0.0;  // in units of the (possibly unnormalized) ray direction
    int triangle = -1;
};

// Static midpoint-split BVH over a triangle soup. Immutable after build;
// safe to query from many threads.
class Bvh {
public:
    Bvh() = default;
    explicit Bvh(const std::vector<Triangle>& triangles);

    // Nearest intersection with t in (t_min, t_max).
    std::optional<RayHit> closest_hit(const Vec3& origin, const Vec3& dir,
                                      double t_min = 1e-9,
                                      double t_max = std::numeric_limits<double>::infinity()) const;

    // True when any triangle cuts the open segment (a, b), shrunk by eps at
    // both ends (world meters).
    bool segment_blocked(const Vec3& a, const Vec3& b, double eps = 1e-6) const;

    // All intersections of segment a->b (parameter in (eps_t, 1 - eps_t)),
    // sorted by t; used for through-wall transmission accounting.
    std::vector<RayHit> segment_hits(const Vec3& a, const Vec3& b, double eps = 1e-6) const;

    bool empty() const { return tris_ == nullptr || tris_->empty(); }

private:
    struct Node {
        Aabb box;
        int left = -1, right = -1; // internal children
        int first = 0, count = 0;  // leaf triangle range
        bool leaf() const { return count > 0; }
    };

    int build_node(int first, int count);
    template <typename Fn>
    void traverse(const Vec3& origin, const Vec3& dir, double t_min, double t_max, Fn&& fn) const;

    const std::vector<Triangle>* tris_ = nullptr;
    std::vector<int> order_;      // triangle indices, leaf-contiguous
    std::vector<Vec3> centroids_; // build-time scratch, indexed by triangle
    std::vector<Node> nodes_;
};

// Watertight enough for this use: Moller-Trumbore, rejects near-edge-on hits.
std::optional<double> ray_triangle(const Vec3& origin, const Vec3& dir, const Triangle& tri);

} // namespace synthrm
