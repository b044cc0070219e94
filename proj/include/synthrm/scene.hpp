#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "synthrm/math.hpp"

namespace synthrm {

enum class SemanticClass : int {
    Terrain = 0,
    Road = 1,
    BuildingWall = 2,
    BuildingRoof = 3,
    Sky = 4,
};

enum class Archetype { Downtown, Mix, Margin };

// Frequency-dependent ITU-style material: eps'_r(f) = a * f_GHz^b,
// sigma(f) = c * f_GHz^d  [S/m].
struct Material {
    std::string name;
    double perm_a = 1.0, perm_b = 0.0;
    double cond_c = 0.0, cond_d = 0.0;
    double albedo = 0.5;    // rendering only
    double roughness = 0.5; // rendering only

    double rel_permittivity(double freq_hz) const;
    double conductivity(double freq_hz) const;
};

// Fixed two-material palette: 0 = concrete, 1 = very dry ground.
constexpr int kMaterialConcrete = 0;
constexpr int kMaterialVeryDryGround = 1;
const std::vector<Material>& material_table();
int material_for_class(SemanticClass c);

struct Triangle {
    Vec3 v0, v1, v2;
    Vec3 normal; // outward unit normal
    int material_id = 0;
    SemanticClass semantic = SemanticClass::Terrain;
};

// Building ground outline (simple polygon, CCW) with extrusion height.
struct Footprint {
    std::vector<Vec2> points;
    double height = 0.0;
};

// Bounded planar rectangle used by the image-method reflector set.
// Points are origin + u*u_axis + v*v_axis, u in [0, u_len], v in [0, v_len].
struct Facet {
    Vec3 origin;
    Vec3 u_axis, v_axis; // orthonormal in-plane directions
    double u_len = 0.0, v_len = 0.0;
    Vec3 normal;
    int material_id = 0;

    Vec3 point(double u, double v) const { return origin + u_axis * u + v_axis * v; }
    double plane_offset() const { return dot(normal, origin); }
    bool contains_uv(double u, double v, double eps = 1e-9) const {
        return u >= -eps && u <= u_len + eps && v >= -eps && v <= v_len + eps;
    }
};

// Vertical building edge, a knife-edge diffraction site.
struct VerticalEdge {
    Vec2 xy;
    double z0 = 0.0, z1 = 0.0;
    Vec2 outward; // unit direction away from the building corner
};

struct Scene {
    std::vector<Triangle> triangles;
    std::vector<Footprint> footprints;
    Aabb bounds;
    double datum_z = 0.0;

    // Derived propagation geometry (walls + ground as planar reflectors,
    // footprint corners as diffraction edges). Populated by generate_city;
    // hand-built scenes fill these directly.
    std::vector<Facet> facets;
    std::vector<VerticalEdge> vertical_edges;

    bool has_road() const;
};

struct BlockSpec {
    Archetype archetype = Archetype::Mix;
    double grid_extent = 200.0;  // square side, meters
    double street_width = 12.0;
    double lot_size = 25.0;
    double height_min = 10.0, height_max = 60.0;
    double density = 0.6; // per-lot building probability
    uint64_t seed = 0;

    // Archetype parameter table; seed must still be set by the caller.
    static BlockSpec for_archetype(Archetype a, double grid_extent, uint64_t seed);

    void validate() const; // throws std::invalid_argument
};

// Point-in-polygon, boundary counts as inside.
bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly);

Scene generate_city(const BlockSpec& spec);

// n transmitter candidates at datum + 1.6 m, rejection-sampled outside all
// footprints; throws std::runtime_error after 10000*n failed attempts.
std::vector<Vec3> sample_tx_positions(const Scene& scene, int n, uint64_t seed);

constexpr double kTxHeightAboveDatum = 1.6;

const char* semantic_name(SemanticClass c);

} // namespace synthrm
