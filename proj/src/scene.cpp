#include "synthrm/scene.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "synthrm/rng.hpp"

namespace synthrm {

double Material::rel_permittivity(double freq_hz) const {
    return perm_a * std::pow(freq_hz / 1e9, perm_b);
}

double Material::conductivity(double freq_hz) const {
    return cond_c * std::pow(freq_hz / 1e9, cond_d);
}

const std::vector<Material>& material_table() {
    // ITU-R P.2040 power-law fits for the two-material palette.
    static const std::vector<Material> table = {
        {"concrete", 5.24, 0.0, 0.0462, 0.7822, 0.55, 0.80},
        {"very_dry_ground", 3.0, 0.0, 0.00015, 2.52, 0.35, 0.95},
    };
    return table;
}

int material_for_class(SemanticClass c) {
    switch (c) {
        case SemanticClass::BuildingWall:
        case SemanticClass::BuildingRoof:
            return kMaterialConcrete;
        default:
            return kMaterialVeryDryGround;
    }
}

const char* semantic_name(SemanticClass c) {
    switch (c) {
        case SemanticClass::Terrain: return "terrain";
        case SemanticClass::Road: return "road";
        case SemanticClass::BuildingWall: return "building_wall";
        case SemanticClass::BuildingRoof: return "building_roof";
        case SemanticClass::Sky: return "sky";
    }
    return "unknown";
}

bool Scene::has_road() const {
    for (const auto& t : triangles)
        if (t.semantic == SemanticClass::Road) return true;
    return false;
}

BlockSpec BlockSpec::for_archetype(Archetype a, double grid_extent, uint64_t seed) {
    BlockSpec s;
    s.archetype = a;
    s.grid_extent = grid_extent;
    s.seed = seed;
    switch (a) {
        case Archetype::Downtown:
            s.density = 0.85; s.height_min = 40; s.height_max = 150;
            s.lot_size = 30; s.street_width = 15;
            break;
        case Archetype::Mix:
            s.density = 0.60; s.height_min = 10; s.height_max = 60;
            s.lot_size = 25; s.street_width = 12;
            break;
        case Archetype::Margin:
            s.density = 0.35; s.height_min = 4; s.height_max = 15;
            s.lot_size = 20; s.street_width = 10;
            break;
    }
    return s;
}

void BlockSpec::validate() const {
    if (street_width <= 0) throw std::invalid_argument("street_width must be > 0");
    if (lot_size <= 0) throw std::invalid_argument("lot_size must be > 0");
    if (density < 0 || density > 1) throw std::invalid_argument("density must be in [0,1]");
    if (height_min <= 0 || height_min > height_max)
        throw std::invalid_argument("height range must satisfy 0 < min <= max");
    if (grid_extent < 2 * (lot_size + street_width))
        throw std::invalid_argument("grid_extent too small for one block");
}

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
    const size_t n = poly.size();
    if (n < 3) return false;
    // Boundary counts as inside.
    const double eps = 1e-9;
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        Vec2 ab = b - a, ap = p - a;
        double len2 = dot(ab, ab);
        if (len2 == 0) continue;
        double t = std::clamp(dot(ap, ab) / len2, 0.0, 1.0);
        Vec2 closest = a + ab * t;
        if (length(p - closest) < eps) return true;
    }
    bool inside = false;
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            double x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

namespace {

struct Interval {
    double lo, hi;
    bool is_street;
    bool full_lot; // complete (unclipped) lot cell
};

std::vector<Interval> axis_intervals(double extent, double street, double lot) {
    std::vector<Interval> out;
    const double period = street + lot;
    for (double x = 0.0; x < extent - 1e-9; x += period) {
        double s_hi = std::min(x + street, extent);
        out.push_back({x, s_hi, true, false});
        if (s_hi >= extent - 1e-9) break;
        double l_hi = std::min(x + period, extent);
        bool full = (l_hi - s_hi) >= lot - 1e-9;
        out.push_back({s_hi, l_hi, false, full});
    }
    return out;
}

void add_ground_quad(Scene& scene, double x0, double y0, double x1, double y1,
                     double z, SemanticClass cls) {
    Vec3 a{x0, y0, z}, b{x1, y0, z}, c{x1, y1, z}, d{x0, y1, z};
    Vec3 up{0, 0, 1};
    int mat = material_for_class(cls);
    scene.triangles.push_back({a, b, c, up, mat, cls});
    scene.triangles.push_back({a, c, d, up, mat, cls});
}

// Extrude a CCW footprint polygon: walls, roof (from rectangular pieces),
// reflector facets and corner diffraction edges.
void extrude_building(Scene& scene, const std::vector<Vec2>& poly,
                      const std::vector<std::array<Vec2, 2>>& roof_rects,
                      double z0, double h) {
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        Vec2 e = q - p;
        double elen = length(e);
        if (elen < 1e-12) continue;
        Vec2 dir{e.x / elen, e.y / elen};
        Vec3 normal{dir.y, -dir.x, 0.0}; // outward for CCW winding

        Vec3 a{p.x, p.y, z0}, b{q.x, q.y, z0};
        Vec3 c{q.x, q.y, z0 + h}, d{p.x, p.y, z0 + h};
        scene.triangles.push_back({a, b, c, normal, kMaterialConcrete, SemanticClass::BuildingWall});
        scene.triangles.push_back({a, c, d, normal, kMaterialConcrete, SemanticClass::BuildingWall});

        Facet f;
        f.origin = a;
        f.u_axis = {dir.x, dir.y, 0.0};
        f.v_axis = {0, 0, 1};
        f.u_len = elen;
        f.v_len = h;
        f.normal = normal;
        f.material_id = kMaterialConcrete;
        scene.facets.push_back(f);
    }
    // Corner edges: outward direction bisects the two adjacent wall normals.
    for (size_t i = 0; i < n; ++i) {
        const Vec2& prev = poly[(i + n - 1) % n];
        const Vec2& cur = poly[i];
        const Vec2& next = poly[(i + 1) % n];
        Vec2 e0 = cur - prev, e1 = next - cur;
        Vec2 n0{e0.y, -e0.x}, n1{e1.y, -e1.x};
        double l0 = length(n0), l1 = length(n1);
        if (l0 < 1e-12 || l1 < 1e-12) continue;
        Vec2 bisect{n0.x / l0 + n1.x / l1, n0.y / l0 + n1.y / l1};
        double bl = length(bisect);
        if (bl < 1e-9) continue; // collinear edges, not a corner
        // Only convex corners diffract outward.
        if (cross(e0, e1) <= 0) continue;
        scene.vertical_edges.push_back({cur, z0, z0 + h, {bisect.x / bl, bisect.y / bl}});
    }
    for (const auto& r : roof_rects) {
        Vec3 up{0, 0, 1};
        double zt = z0 + h;
        Vec3 a{r[0].x, r[0].y, zt}, b{r[1].x, r[0].y, zt};
        Vec3 c{r[1].x, r[1].y, zt}, d{r[0].x, r[1].y, zt};
        scene.triangles.push_back({a, b, c, up, kMaterialConcrete, SemanticClass::BuildingRoof});
        scene.triangles.push_back({a, c, d, up, kMaterialConcrete, SemanticClass::BuildingRoof});
    }
}

} // namespace

Scene generate_city(const BlockSpec& spec) {
    spec.validate();
    Scene scene;
    scene.datum_z = 0.0;

    const double E = spec.grid_extent;
    auto xs = axis_intervals(E, spec.street_width, spec.lot_size);
    auto ys = axis_intervals(E, spec.street_width, spec.lot_size);

    // Ground plane tiles: road where either axis runs along a street.
    for (const auto& iy : ys)
        for (const auto& ix : xs) {
            SemanticClass cls = (ix.is_street || iy.is_street) ? SemanticClass::Road
                                                               : SemanticClass::Terrain;
            add_ground_quad(scene, ix.lo, iy.lo, ix.hi, iy.hi, scene.datum_z, cls);
        }

    // Buildings on complete lot cells.
    uint64_t lot_index = 0;
    for (const auto& iy : ys)
        for (const auto& ix : xs) {
            if (ix.is_street || iy.is_street) continue;
            ++lot_index;
            if (!ix.full_lot || !iy.full_lot) continue;
            Rng rng(derive_seed(spec.seed, lot_index));
            if (!rng.bernoulli(spec.density)) continue;

            double lot_w = ix.hi - ix.lo, lot_h = iy.hi - iy.lo;
            double mx0 = rng.uniform(0.05, 0.15) * lot_w;
            double mx1 = rng.uniform(0.05, 0.15) * lot_w;
            double my0 = rng.uniform(0.05, 0.15) * lot_h;
            double my1 = rng.uniform(0.05, 0.15) * lot_h;
            double x0 = ix.lo + mx0, x1 = ix.hi - mx1;
            double y0 = iy.lo + my0, y1 = iy.hi - my1;
            double h = rng.uniform(spec.height_min, spec.height_max);

            Footprint fp;
            fp.height = h;
            std::vector<std::array<Vec2, 2>> roof_rects;
            bool l_shape = rng.bernoulli(0.3);
            if (!l_shape) {
                fp.points = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
                roof_rects.push_back({Vec2{x0, y0}, Vec2{x1, y1}});
            } else {
                // Cut the +x/+y quadrant; CCW hexagon.
                double cx = x1 - rng.uniform(0.3, 0.5) * (x1 - x0);
                double cy = y1 - rng.uniform(0.3, 0.5) * (y1 - y0);
                fp.points = {{x0, y0}, {x1, y0}, {x1, cy}, {cx, cy}, {cx, y1}, {x0, y1}};
                roof_rects.push_back({Vec2{x0, y0}, Vec2{x1, cy}});
                roof_rects.push_back({Vec2{x0, cy}, Vec2{cx, y1}});
            }
            extrude_building(scene, fp.points, roof_rects, scene.datum_z, h);
            scene.footprints.push_back(std::move(fp));
        }

    // Ground reflector facet spanning the whole block.
    Facet ground;
    ground.origin = {0, 0, scene.datum_z};
    ground.u_axis = {1, 0, 0};
    ground.v_axis = {0, 1, 0};
    ground.u_len = E;
    ground.v_len = E;
    ground.normal = {0, 0, 1};
    ground.material_id = kMaterialVeryDryGround;
    scene.facets.push_back(ground);

    for (const auto& t : scene.triangles) {
        scene.bounds.expand(t.v0);
        scene.bounds.expand(t.v1);
        scene.bounds.expand(t.v2);
    }
    // Keep headroom for transmitters and cameras above a flat scene.
    scene.bounds.expand(Vec3{E * 0.5, E * 0.5, scene.datum_z + 5.0});
    return scene;
}

std::vector<Vec3> sample_tx_positions(const Scene& scene, int n, uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_tx_positions: n must be >= 1");
    Rng rng(derive_seed(seed, 0x7478)); // "tx"
    std::vector<Vec3> out;
    out.reserve(n);
    const long budget = 10000L * n;
    long attempts = 0;
    while ((int)out.size() < n) {
        if (attempts++ >= budget)
            throw std::runtime_error("sample_tx_positions: rejection budget exhausted");
        Vec2 p{rng.uniform(scene.bounds.lo.x, scene.bounds.hi.x),
               rng.uniform(scene.bounds.lo.y, scene.bounds.hi.y)};
        bool blocked = false;
        for (const auto& fp : scene.footprints)
            if (point_in_polygon(p, fp.points)) { blocked = true; break; }
        if (blocked) continue;
        out.push_back({p.x, p.y, scene.datum_z + kTxHeightAboveDatum});
    }
    return out;
}

} // namespace synthrm
