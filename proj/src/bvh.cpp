#include "synthrm/bvh.hpp"

#include <algorithm>
#include <cmath>

namespace synthrm {

std::optional<double> ray_triangle(const Vec3& origin, const Vec3& dir, const Triangle& tri) {
    const Vec3 e1 = tri.v1 - tri.v0;
    const Vec3 e2 = tri.v2 - tri.v0;
    const Vec3 pvec = cross(dir, e2);
    const double det = dot(e1, pvec);
    if (std::abs(det) < 1e-14) return std::nullopt; // edge-on
    const double inv_det = 1.0 / det;
    const Vec3 tvec = origin - tri.v0;
    const double u = dot(tvec, pvec) * inv_det;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    const Vec3 qvec = cross(tvec, e1);
    const double v = dot(dir, qvec) * inv_det;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    return dot(e2, qvec) * inv_det;
}

namespace {

inline bool slab_hit(const Aabb& box, const Vec3& origin, const Vec3& inv_dir,
                     double t_min, double t_max) {
    for (int i = 0; i < 3; ++i) {
        double t0 = (box.lo[i] - origin[i]) * inv_dir[i];
        double t1 = (box.hi[i] - origin[i]) * inv_dir[i];
        if (inv_dir[i] < 0) std::swap(t0, t1);
        t_min = std::max(t_min, t0);
        t_max = std::min(t_max, t1);
        if (t_max < t_min) return false;
    }
    return true;
}

Aabb triangle_box(const Triangle& t) {
    Aabb b;
    b.expand(t.v0);
    b.expand(t.v1);
    b.expand(t.v2);
    return b;
}

} // namespace

Bvh::Bvh(const std::vector<Triangle>& triangles) : tris_(&triangles) {
    const int n = (int)triangles.size();
    if (n == 0) return;
    order_.resize(n);
    centroids_.resize(n);
    for (int i = 0; i < n; ++i) {
        order_[i] = i;
        centroids_[i] = (triangles[i].v0 + triangles[i].v1 + triangles[i].v2) / 3.0;
    }
    nodes_.reserve(2 * n);
    build_node(0, n);
    centroids_.clear();
    centroids_.shrink_to_fit();
}

int Bvh::build_node(int first, int count) {
    const int index = (int)nodes_.size();
    nodes_.emplace_back();
    Aabb box;
    for (int i = first; i < first + count; ++i)
        box.expand(triangle_box((*tris_)[order_[i]]));
    nodes_[index].box = box;

    if (count <= 4) {
        nodes_[index].first = first;
        nodes_[index].count = count;
        return index;
    }

    Vec3 extent = box.hi - box.lo;
    int axis = 0;
    if (extent.y > extent.x) axis = 1;
    if (extent.z > extent[axis]) axis = 2;
    double split = box.center()[axis];

    auto mid_it = std::partition(order_.begin() + first, order_.begin() + first + count,
                                 [&](int i) { return centroids_[i][axis] < split; });
    int mid = (int)(mid_it - order_.begin());
    if (mid == first || mid == first + count) mid = first + count / 2;

    int left = build_node(first, mid - first);
    int right = build_node(mid, first + count - mid);
    nodes_[index].left = left;
    nodes_[index].right = right;
    return index;
}

template <typename Fn>
void Bvh::traverse(const Vec3& origin, const Vec3& dir, double t_min, double t_max, Fn&& fn) const {
    if (nodes_.empty()) return;
    const Vec3 inv_dir{1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z};
    int stack[64];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const Node& node = nodes_[stack[--sp]];
        if (!slab_hit(node.box, origin, inv_dir, t_min, t_max)) continue;
        if (node.leaf()) {
            for (int i = node.first; i < node.first + node.count; ++i) {
                int ti = order_[i];
                if (auto t = ray_triangle(origin, dir, (*tris_)[ti]))
                    if (*t > t_min && *t < t_max) fn(*t, ti, t_max);
            }
        } else {
            stack[sp++] = node.left;
            stack[sp++] = node.right;
        }
    }
}

std::optional<RayHit> Bvh::closest_hit(const Vec3& origin, const Vec3& dir,
                                       double t_min, double t_max) const {
    std::optional<RayHit> best;
    traverse(origin, dir, t_min, t_max, [&](double t, int tri, double& cur_max) {
        if (!best || t < best->t) {
            best = RayHit{t, tri};
            cur_max = t;
        }
    });
    return best;
}

bool Bvh::segment_blocked(const Vec3& a, const Vec3& b, double eps) const {
    const Vec3 d = b - a;
    const double len = length(d);
    if (len <= 2 * eps) return false;
    const double t_eps = eps / len;
    bool blocked = false;
    traverse(a, d, t_eps, 1.0 - t_eps, [&](double, int, double& cur_max) {
        blocked = true;
        cur_max = 0; // stop: no tighter hits needed
    });
    return blocked;
}

std::vector<RayHit> Bvh::segment_hits(const Vec3& a, const Vec3& b, double eps) const {
    const Vec3 d = b - a;
    const double len = length(d);
    std::vector<RayHit> hits;
    if (len <= 2 * eps) return hits;
    const double t_eps = eps / len;
    traverse(a, d, t_eps, 1.0 - t_eps, [&](double t, int tri, double&) {
        hits.push_back({t, tri});
    });
    std::sort(hits.begin(), hits.end(), [](const RayHit& x, const RayHit& y) {
        return x.t != y.t ? x.t < y.t : x.triangle < y.triangle;
    });
    return hits;
}

} // namespace synthrm
