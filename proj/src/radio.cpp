#include "synthrm/radio.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "synthrm/parallel.hpp"

namespace synthrm {

void RadioConfig::validate() const {
    if (frequency <= 0 || bandwidth <= 0) throw std::invalid_argument("radio: frequency and bandwidth must be > 0");
    if (temperature <= 0) throw std::invalid_argument("radio: temperature must be > 0");
    if (max_depth < 0) throw std::invalid_argument("radio: max_depth must be >= 0");
    if (std::abs(length(antenna.boresight) - 1.0) > 1e-6)
        throw std::invalid_argument("radio: antenna boresight must be unit length");
}

std::complex<double> fresnel_reflection(const Material& material, double cos_theta_i,
                                        double frequency, Polarization pol) {
    if (cos_theta_i < 0 || cos_theta_i > 1)
        throw std::invalid_argument("fresnel_reflection: cos_theta_i must be in [0,1]");
    const double eps_r = material.rel_permittivity(frequency);
    const double sigma = material.conductivity(frequency);
    const std::complex<double> eps(eps_r, -sigma / (2 * kPi * frequency * kVacuumPermittivity));
    const double sin2 = 1.0 - cos_theta_i * cos_theta_i;
    const std::complex<double> s = std::sqrt(eps - sin2);
    if (pol == Polarization::TE)
        return (cos_theta_i - s) / (cos_theta_i + s);
    return (eps * cos_theta_i - s) / (eps * cos_theta_i + s);
}

double knife_edge_loss(double nu) {
    if (!std::isfinite(nu)) throw std::invalid_argument("knife_edge_loss: nu must be finite");
    if (nu <= -0.78) return 0.0;
    const double a = nu - 0.1;
    return 6.9 + 20.0 * std::log10(std::sqrt(a * a + 1.0) + a);
}

double noise_power_dbm(double bandwidth, double temperature) {
    if (bandwidth <= 0 || temperature <= 0)
        throw std::invalid_argument("noise_power_dbm: bandwidth and temperature must be > 0");
    return db10(kBoltzmann * temperature * bandwidth / 1e-3);
}

namespace {

void antenna_shape(AntennaKind kind, int& m, int& n) {
    switch (kind) {
        case AntennaKind::SISO: m = 1; n = 1; break;
        case AntennaKind::MIMO4x4: m = 4; n = 4; break;
        case AntennaKind::MIMO8x4: m = 8; n = 4; break;
    }
}

double sinc(double x) { return std::abs(x) < 1e-12 ? 1.0 : std::sin(x) / x; }

// Sphere average of |AF|^2 for a uniform m x n lattice with the given
// spacing (wavelengths): sum of pairwise sinc(k * distance) terms.
double array_power_sum(int m, int n, double spacing_wl) {
    double s = 0.0;
    for (int dp = -(m - 1); dp <= m - 1; ++dp)
        for (int dq = -(n - 1); dq <= n - 1; ++dq) {
            double w = double(m - std::abs(dp)) * double(n - std::abs(dq));
            double dist = spacing_wl * std::hypot((double)dp, (double)dq);
            s += w * sinc(2 * kPi * dist);
        }
    return s;
}

double array_factor_sq(int count, double psi) {
    // |sin(N psi / 2) / sin(psi / 2)|^2 with the psi -> 0 limit.
    double den = std::sin(psi / 2);
    if (std::abs(den) < 1e-9) {
        double v = (double)count;
        return v * v;
    }
    double num = std::sin(count * psi / 2);
    return (num * num) / (den * den);
}

} // namespace

double antenna_gain(const AntennaConfig& antenna, const Vec3& direction, double /*frequency*/) {
    if (std::abs(length(direction) - 1.0) > 1e-6)
        throw std::invalid_argument("antenna_gain: direction must be unit length");
    int m, n;
    antenna_shape(antenna.kind, m, n);
    if (m == 1 && n == 1) return 1.0;

    // Array plane basis perpendicular to boresight, fixed deterministically.
    Vec3 b = normalize(antenna.boresight);
    Vec3 ref = std::abs(b.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    Vec3 e1 = normalize(cross(b, ref));
    Vec3 e2 = cross(b, e1);

    const double s = antenna.element_spacing;
    const double psi1 = 2 * kPi * s * dot(direction, e1);
    const double psi2 = 2 * kPi * s * dot(direction, e2);
    const double af2 = array_factor_sq(m, psi1) * array_factor_sq(n, psi2);
    return af2 / array_power_sum(m, n, s);
}

PathSolver::PathSolver(const Scene& scene, const RadioConfig& config)
    : scene_(scene), config_(config), bvh_(scene.triangles) {
    config_.validate();
    effective_depth_ = std::min(config_.max_depth, config_.specular_depth_cap);
}

namespace {

double signed_dist(const Facet& f, const Vec3& p) { return dot(f.normal, p) - f.plane_offset(); }

Vec3 mirror_point(const Facet& f, const Vec3& p) {
    return p - f.normal * (2.0 * signed_dist(f, p));
}

// False when facet b is entirely behind facet a's plane (no ray leaving a's
// front side can reach b's front side).
bool partly_in_front(const Facet& a, const Facet& b) {
    const Vec3 corners[4] = {b.point(0, 0), b.point(b.u_len, 0),
                             b.point(b.u_len, b.v_len), b.point(0, b.v_len)};
    for (const Vec3& c : corners)
        if (signed_dist(a, c) > 1e-9) return true;
    return false;
}

} // namespace

PathSolver::TxImages PathSolver::build_tx_images(const Vec3& tx) const {
    TxImages out;
    out.tx = tx;
    if (!config_.specular_reflection || effective_depth_ < 1) return out;

    struct Frame { std::vector<int> seq; std::vector<Vec3> images; };
    std::vector<Frame> frontier = {{{}, {}}};
    for (int depth = 1; depth <= effective_depth_; ++depth) {
        std::vector<Frame> next;
        for (const Frame& fr : frontier) {
            const Vec3 src = fr.images.empty() ? tx : fr.images.back();
            const int last = fr.seq.empty() ? -1 : fr.seq.back();
            for (int fi = 0; fi < (int)scene_.facets.size(); ++fi) {
                if (fi == last) continue;
                const Facet& f = scene_.facets[fi];
                if (signed_dist(f, src) <= 1e-9) continue; // source behind mirror
                if (last >= 0 && !partly_in_front(scene_.facets[last], f)) continue;
                if (last >= 0 && !partly_in_front(f, scene_.facets[last])) continue;
                Frame child = fr;
                child.seq.push_back(fi);
                child.images.push_back(mirror_point(f, src));
                out.nodes.push_back({child.seq, child.images});
                next.push_back(std::move(child));
            }
        }
        frontier = std::move(next);
    }
    // Traversal order is already (depth, lexicographic facet sequence)
    // within each depth; make the full ordering canonical.
    std::sort(out.nodes.begin(), out.nodes.end(), [](const TxImages::Node& a, const TxImages::Node& b) {
        if (a.facet_seq.size() != b.facet_seq.size())
            return a.facet_seq.size() < b.facet_seq.size();
        return a.facet_seq < b.facet_seq;
    });
    return out;
}

std::complex<double> PathSolver::reflection_coefficient(const Vec3& incident_dir,
                                                        const Vec3& normal,
                                                        int material_id) const {
    const Material& mat = material_table()[material_id];
    const double cos_i = std::clamp(-dot(incident_dir, normal), 0.0, 1.0);
    const std::complex<double> gte =
        fresnel_reflection(mat, cos_i, config_.frequency, Polarization::TE);
    const std::complex<double> gtm =
        fresnel_reflection(mat, cos_i, config_.frequency, Polarization::TM);

    // Vertically polarized Tx: project the field axis onto the TE/TM basis
    // of this bounce; depolarization is ignored.
    Vec3 e_pol = Vec3{0, 0, 1} - incident_dir * incident_dir.z;
    double el = length(e_pol);
    if (el < 1e-9) return gtm; // vertical propagation: field is horizontal, plane ambiguous
    e_pol = e_pol / el;
    Vec3 te_axis = cross(incident_dir, normal);
    double tl = length(te_axis);
    if (tl < 1e-9) return gte; // normal incidence, TE == TM up to sign
    te_axis = te_axis / tl;
    double w_te = dot(e_pol, te_axis);
    w_te *= w_te;
    return gte * w_te + gtm * (1.0 - w_te);
}

bool PathSolver::segment_factor(const Vec3& a, const Vec3& b, std::complex<double>& factor,
                                std::vector<std::pair<Vec3, InteractionKind>>* interactions) const {
    auto hits = bvh_.segment_hits(a, b, 1e-4);
    if (hits.empty()) return true;
    if (!config_.refraction) return false;

    // Pair crossings into through-building chords; an unpaired crossing
    // contributes its interface losses with zero chord.
    const Vec3 d = b - a;
    const double len = length(d);
    for (size_t i = 0; i < hits.size(); i += 2) {
        const Triangle& tri = scene_.triangles[hits[i].triangle];
        const Material& mat = material_table()[tri.material_id];
        double chord = (i + 1 < hits.size()) ? (hits[i + 1].t - hits[i].t) * len : 0.0;

        std::complex<double> gamma =
            fresnel_reflection(mat, 1.0, config_.frequency, Polarization::TE);
        double t_interface = 1.0 - std::norm(gamma); // power through one air-wall interface
        if (t_interface <= 0) return false;

        // Attenuation inside the slab from the complex wavenumber.
        const std::complex<double> eps(
            mat.rel_permittivity(config_.frequency),
            -mat.conductivity(config_.frequency) /
                (2 * kPi * config_.frequency * kVacuumPermittivity));
        double alpha_np = -std::imag(std::sqrt(eps)) * 2 * kPi / config_.wavelength();
        double amp = t_interface * std::exp(-alpha_np * chord);
        factor *= amp;
        if (interactions) {
            Vec3 entry = a + d * hits[i].t;
            interactions->push_back({entry, InteractionKind::Transmission});
        }
    }
    return true;
}

bool PathSolver::los_path(const Vec3& tx, const Vec3& rx, PropagationPath& out) const {
    const double dist = distance(tx, rx);
    if (dist < 1e-9) return false;
    std::complex<double> factor(1.0, 0.0);
    std::vector<std::pair<Vec3, InteractionKind>> inter;
    if (!segment_factor(tx, rx, factor, &inter)) return false;
    if ((int)inter.size() > config_.max_depth) return false;

    const double lambda = config_.wavelength();
    out.vertices = {tx};
    for (auto& [p, k] : inter) {
        out.vertices.push_back(p);
        out.kinds.push_back(k);
    }
    out.vertices.push_back(rx);
    out.length = dist;
    out.gain = factor * (lambda / (4 * kPi * dist)) *
               std::exp(std::complex<double>(0.0, -2 * kPi * dist / lambda));
    out.departure_dir = normalize(rx - tx);
    out.arrival_dir = out.departure_dir;
    return true;
}

bool PathSolver::specular_path(const TxImages::Node& node, const Vec3& tx, const Vec3& rx,
                               PropagationPath& out) const {
    const int k = (int)node.facet_seq.size();
    // Backward unfolding: intersect each mirror segment with its facet.
    std::vector<Vec3> points(k);
    Vec3 p_after = rx;
    for (int i = k - 1; i >= 0; --i) {
        const Facet& f = scene_.facets[node.facet_seq[i]];
        double sp = signed_dist(f, p_after);
        double si = signed_dist(f, node.images[i]);
        if (sp <= 1e-9 || si >= -1e-9) return false;
        double t = sp / (sp - si);
        Vec3 p = p_after + (node.images[i] - p_after) * t;
        double u = dot(p - f.origin, f.u_axis);
        double v = dot(p - f.origin, f.v_axis);
        if (!f.contains_uv(u, v)) return false;
        points[i] = p;
        p_after = p;
    }

    std::vector<Vec3> corners;
    corners.reserve(k + 2);
    corners.push_back(tx);
    for (const Vec3& p : points) corners.push_back(p);
    corners.push_back(rx);

    std::complex<double> coeff(1.0, 0.0);
    double total_len = 0.0;
    std::vector<Vec3> verts = {tx};
    std::vector<InteractionKind> kinds;
    for (int i = 0; i + 1 < (int)corners.size(); ++i) {
        const Vec3 seg = corners[i + 1] - corners[i];
        const double seg_len = length(seg);
        if (seg_len < 1e-9) return false;
        total_len += seg_len;
        // Transmissions are appended in order along this segment.
        std::vector<std::pair<Vec3, InteractionKind>> trans;
        if (!segment_factor(corners[i], corners[i + 1], coeff, &trans)) return false;
        for (auto& [p, kind] : trans) {
            verts.push_back(p);
            kinds.push_back(kind);
        }
        verts.push_back(corners[i + 1]);
        if (i + 1 < (int)corners.size() - 1) {
            const Facet& f = scene_.facets[node.facet_seq[i]];
            coeff *= reflection_coefficient(seg / seg_len, f.normal, f.material_id);
            kinds.push_back(InteractionKind::Reflection);
        }
    }
    if ((int)kinds.size() > config_.max_depth) return false;

    const double lambda = config_.wavelength();
    out.vertices = std::move(verts);
    out.kinds = std::move(kinds);
    out.length = total_len;
    out.gain = coeff * (lambda / (4 * kPi * total_len)) *
               std::exp(std::complex<double>(0.0, -2 * kPi * total_len / lambda));
    out.departure_dir = normalize(points.empty() ? rx - tx : points[0] - tx);
    out.arrival_dir = normalize(rx - (k > 0 ? points[k - 1] : tx));
    return true;
}

void PathSolver::diffraction_paths(const Vec3& tx, const Vec3& rx,
                                   std::vector<PropagationPath>& out) const {
    if (scene_.vertical_edges.empty()) return;
    const double lambda = config_.wavelength();
    const Vec3 line = rx - tx;
    const double line_len = length(line);
    if (line_len < 1e-9) return;

    for (const auto& edge : scene_.vertical_edges) {
        // Shortest detour over the edge: convex in the edge height.
        auto path_len = [&](double z) {
            Vec3 p{edge.xy.x, edge.xy.y, z};
            return distance(tx, p) + distance(p, rx);
        };
        double lo = edge.z0, hi = edge.z1;
        for (int it = 0; it < 80; ++it) {
            double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
            if (path_len(m1) < path_len(m2)) hi = m2; else lo = m1;
        }
        const double z = 0.5 * (lo + hi);
        // Nudge off the corner so the occlusion test does not graze the walls.
        Vec3 p{edge.xy.x + 1e-3 * edge.outward.x, edge.xy.y + 1e-3 * edge.outward.y, z};

        if (bvh_.segment_blocked(tx, p, 1e-3)) continue;
        if (bvh_.segment_blocked(p, rx, 1e-3)) continue;

        const double d1 = distance(tx, p);
        const double d2 = distance(p, rx);
        if (d1 < 1e-6 || d2 < 1e-6) continue;
        const double h = length(cross(p - tx, line)) / line_len;
        const double nu = h * std::sqrt(2.0 * (d1 + d2) / (lambda * d1 * d2));
        const double loss_db = knife_edge_loss(nu);

        PropagationPath path;
        path.vertices = {tx, p, rx};
        path.kinds = {InteractionKind::Diffraction};
        path.length = d1 + d2;
        path.gain = (lambda / (4 * kPi * path.length)) * std::pow(10.0, -loss_db / 20.0) *
                    std::exp(std::complex<double>(0.0, -2 * kPi * path.length / lambda));
        path.departure_dir = normalize(p - tx);
        path.arrival_dir = normalize(rx - p);
        out.push_back(std::move(path));
    }
}

std::vector<PropagationPath> PathSolver::compute_paths(const TxImages& tx_images,
                                                       const Vec3& rx) const {
    std::vector<PropagationPath> out;
    const Vec3& tx = tx_images.tx;

    bool los_clear = !bvh_.segment_blocked(tx, rx, 1e-4);
    if (config_.los) {
        PropagationPath p;
        if (los_path(tx, rx, p)) out.push_back(std::move(p));
    }
    if (config_.specular_reflection) {
        for (const auto& node : tx_images.nodes) {
            PropagationPath p;
            if (specular_path(node, tx, rx, p)) out.push_back(std::move(p));
        }
    }
    if (config_.diffraction && config_.max_depth >= 1 && !los_clear)
        diffraction_paths(tx, rx, out);
    return out;
}

std::vector<PropagationPath> PathSolver::compute_paths(const Vec3& tx, const Vec3& rx) const {
    return compute_paths(build_tx_images(tx), rx);
}

std::vector<PropagationPath> compute_paths(const Scene& scene, const Vec3& tx, const Vec3& rx,
                                           const RadioConfig& config) {
    return PathSolver(scene, config).compute_paths(tx, rx);
}

RadioMap compute_radio_map(const Scene& scene, const Vec3& tx, const CameraModel& camera,
                           const VasMesh& vas, const RadioConfig& config) {
    if (vas.width != camera.width || vas.height != camera.height)
        throw std::invalid_argument("compute_radio_map: VAS dimensions do not match camera");

    PathSolver solver(scene, config);
    const auto tx_images = solver.build_tx_images(tx);
    const int faces = (int)vas.faces.size();

    RadioMap map;
    map.per_face_gain.assign(faces, 0.0);
    parallel_for(0, faces, [&](int fi) {
        auto paths = solver.compute_paths(tx_images, vas.centroids[fi]);
        std::complex<double> acc(0.0, 0.0);
        for (const auto& p : paths)
            acc += p.gain * std::sqrt(antenna_gain(config.antenna, p.departure_dir,
                                                   config.frequency));
        map.per_face_gain[fi] = std::norm(acc);
    });

    const float nan = std::numeric_limits<float>::quiet_NaN();
    map.path_gain_db = Image<float>(vas.width, vas.height, nan);
    map.sinr_db = Image<float>(vas.width, vas.height, nan);

    // Pixel value: mean linear gain of the quad's (<= 2) faces.
    Image<double> sum(vas.width, vas.height, 0.0);
    Image<int> cnt(vas.width, vas.height, 0);
    for (int fi = 0; fi < faces; ++fi) {
        const auto& px = vas.pixel_of_face[fi];
        sum.at(px.u, px.v) += map.per_face_gain[fi];
        cnt.at(px.u, px.v) += 1;
    }
    const double noise = noise_power_dbm(config.bandwidth, config.temperature);
    for (int y = 0; y < vas.height; ++y)
        for (int x = 0; x < vas.width; ++x) {
            if (cnt.at(x, y) == 0) continue;
            double g = sum.at(x, y) / cnt.at(x, y);
            if (g <= 0) continue;
            double pg_db = db10(g);
            map.path_gain_db.at(x, y) = (float)pg_db;
            map.sinr_db.at(x, y) = (float)(config.tx_power_dbm + pg_db - noise);
        }
    return map;
}

} // namespace synthrm
