#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "synthrm/camera.hpp"
#include "synthrm/math.hpp"
#include "synthrm/radio.hpp"
#include "synthrm/render.hpp"
#include "synthrm/scene.hpp"
#include "synthrm/vas.hpp"

namespace synthrm {

// Grayscale PFM: "Pf", width height, scale (sign = endianness), rows stored
// bottom-to-top as 32-bit floats. NaN payloads survive bit-exactly.
void write_raster(const std::filesystem::path& path, const Image<float>& values);
Image<float> read_raster(const std::filesystem::path& path);

void write_ppm(const std::filesystem::path& path, const Image<Rgb>& image);
Image<Rgb> read_ppm(const std::filesystem::path& path);

// Binary little-endian PLY with a float path_gain_db property per face.
void write_vas_ply(const std::filesystem::path& path, const VasMesh& mesh,
                   const std::vector<double>& face_gain_db);

struct PlyData {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::vector<float> face_gain_db;
};
PlyData read_vas_ply(const std::filesystem::path& path);

// Scene export: OBJ grouped by semantic class plus materials.json and
// footprints.json sidecars.
void write_scene_obj(const std::filesystem::path& obj_path, const Scene& scene);
void write_materials_json(const std::filesystem::path& path);
void write_footprints_json(const std::filesystem::path& path, const Scene& scene);

void write_camera_json(const std::filesystem::path& path, const CameraModel& camera);
CameraModel read_camera_json(const std::filesystem::path& path);

void write_tx_json(const std::filesystem::path& path, const Vec3& tx,
                   const RadioConfig& config);

struct SampleRecord {
    std::string id;
    std::string dir; // relative to the campaign root
    std::string archetype;
    uint64_t seed = 0;
    int width = 0, height = 0;
    int community = -1; // filled after orchestration
};

// Writes every raster, camera.json, tx.json and the radio-textured VAS PLY
// into sample_dir.
SampleRecord export_sample(const std::filesystem::path& campaign_root,
                           const std::string& sample_id, const ViewBuffers& buffers,
                           const CameraModel& camera, const Vec3& tx,
                           const RadioConfig& config, const VasMesh& vas,
                           const RadioMap& radio, const std::string& archetype,
                           uint64_t seed);

// Re-checks the per-file invariants of an exported sample; throws on the
// first violation.
void validate_sample(const std::filesystem::path& campaign_root, const SampleRecord& record);

Image<float> semantic_to_raster(const Image<int32_t>& semantic);
Image<float> vec_component_raster(const Image<Vec3>& field, int component);

const std::vector<std::string>& sample_raster_names();

} // namespace synthrm
