#pragma once

#include <complex>
#include <vector>

#include "synthrm/bvh.hpp"
#include "synthrm/camera.hpp"
#include "synthrm/scene.hpp"
#include "synthrm/vas.hpp"

namespace synthrm {

enum class AntennaKind { SISO, MIMO4x4, MIMO8x4 };
enum class Polarization { TE, TM };
enum class InteractionKind { Reflection, Diffraction, Transmission };

struct AntennaConfig {
    AntennaKind kind = AntennaKind::SISO;
    Vec3 boresight{1, 0, 0};       // unit direction
    double element_spacing = 0.5;  // wavelengths
};

struct RadioConfig {
    double frequency = 3.5e9;   // Hz
    double bandwidth = 1e6;     // Hz
    double tx_power_dbm = 30.0;
    double temperature = 293.0; // K
    int max_depth = 20;
    bool los = true;
    bool specular_reflection = true;
    bool refraction = true;
    bool diffraction = true;
    // Deterministic image-method cap; effective specular depth is
    // min(max_depth, specular_depth_cap).
    int specular_depth_cap = 3;
    AntennaConfig antenna;

    double wavelength() const { return kSpeedOfLight / frequency; }
    void validate() const; // throws std::invalid_argument
};

struct PropagationPath {
    std::vector<Vec3> vertices;          // tx, interactions..., rx
    std::vector<InteractionKind> kinds;  // one per interior vertex
    double length = 0.0;                 // meters, sum of segments
    std::complex<double> gain;           // linear amplitude, antenna gains excluded
    Vec3 departure_dir, arrival_dir;     // unit vectors
};

struct RadioMap {
    Image<float> path_gain_db; // NaN where no face or no path
    Image<float> sinr_db;
    std::vector<double> per_face_gain; // linear, per VAS face
};

// Air-to-material reflection coefficient with complex permittivity
// eps = eps'_r(f) - j * sigma(f) / (2 pi f eps0).
std::complex<double> fresnel_reflection(const Material& material, double cos_theta_i,
                                        double frequency, Polarization pol);

// ITU single knife-edge loss J(nu) in dB; 0 below nu = -0.78.
double knife_edge_loss(double nu);

// Linear power gain. SISO is isotropic; MIMO is a uniform half-wavelength
// planar array factor normalized so the total radiated power over the
// sphere equals an isotropic radiator's.
double antenna_gain(const AntennaConfig& antenna, const Vec3& direction, double frequency);

// Thermal noise k_B * T * B referenced to 1 mW.
double noise_power_dbm(double bandwidth, double temperature);

// Deterministic image-method path solver. Holds an immutable occlusion BVH
// built from Scene triangles only (the VAS never enters the tracer).
class PathSolver {
public:
    PathSolver(const Scene& scene, const RadioConfig& config);

    // Transmitter-specific mirrored-image sequences, reusable across probes.
    struct TxImages {
        Vec3 tx;
        struct Node {
            std::vector<int> facet_seq;
            std::vector<Vec3> images; // image after each successive mirror
        };
        std::vector<Node> nodes; // sorted by (depth, facet sequence)
    };

    TxImages build_tx_images(const Vec3& tx) const;

    std::vector<PropagationPath> compute_paths(const TxImages& tx_images, const Vec3& rx) const;
    std::vector<PropagationPath> compute_paths(const Vec3& tx, const Vec3& rx) const;

    const Bvh& occluder() const { return bvh_; }

private:
    bool los_path(const Vec3& tx, const Vec3& rx, PropagationPath& out) const;
    bool specular_path(const TxImages::Node& node, const Vec3& tx, const Vec3& rx,
                       PropagationPath& out) const;
    void diffraction_paths(const Vec3& tx, const Vec3& rx,
                           std::vector<PropagationPath>& out) const;
    // Applies through-wall transmission along a segment; returns false when
    // the segment is blocked and refraction is disabled.
    bool segment_factor(const Vec3& a, const Vec3& b, std::complex<double>& factor,
                        std::vector<std::pair<Vec3, InteractionKind>>* interactions) const;
    std::complex<double> reflection_coefficient(const Vec3& incident_dir, const Vec3& normal,
                                                int material_id) const;

    const Scene& scene_;
    RadioConfig config_;
    Bvh bvh_;
    int effective_depth_;
};

std::vector<PropagationPath> compute_paths(const Scene& scene, const Vec3& tx, const Vec3& rx,
                                           const RadioConfig& config);

RadioMap compute_radio_map(const Scene& scene, const Vec3& tx, const CameraModel& camera,
                           const VasMesh& vas, const RadioConfig& config);

} // namespace synthrm
