#include "synthrm/io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace synthrm {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    return f;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path.string());
    return f;
}

void byteswap4(char* p) {
    std::swap(p[0], p[3]);
    std::swap(p[1], p[2]);
}

void write_json_file(const fs::path& path, const ordered_json& j) {
    auto f = open_out(path);
    f << j.dump(2) << "\n";
}

ordered_json read_json_file(const fs::path& path) {
    auto f = open_in(path);
    return ordered_json::parse(f);
}

} // namespace

void write_raster(const fs::path& path, const Image<float>& values) {
    auto f = open_out(path);
    f << "Pf\n" << values.width << " " << values.height << "\n-1.0\n";
    // Bottom-to-top rows, raw little-endian floats.
    for (int y = values.height - 1; y >= 0; --y)
        f.write(reinterpret_cast<const char*>(&values.at(0, y)),
                (std::streamsize)values.width * sizeof(float));
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

Image<float> read_raster(const fs::path& path) {
    auto f = open_in(path);
    std::string magic;
    int w = 0, h = 0;
    double scale = 0;
    f >> magic >> w >> h >> scale;
    if (magic != "Pf") throw std::runtime_error("PFM: bad magic in " + path.string());
    if (w <= 0 || h <= 0) throw std::runtime_error("PFM: bad dimensions in " + path.string());
    if (scale == 0) throw std::runtime_error("PFM: zero scale in " + path.string());
    f.get(); // single whitespace after the scale line

    Image<float> out(w, h);
    std::vector<char> row((size_t)w * sizeof(float));
    const bool swap = scale > 0; // big-endian payload on a little-endian host
    for (int y = h - 1; y >= 0; --y) {
        f.read(row.data(), (std::streamsize)row.size());
        if (!f) throw std::runtime_error("PFM: truncated payload in " + path.string());
        if (swap)
            for (int x = 0; x < w; ++x) byteswap4(row.data() + (size_t)x * 4);
        std::memcpy(&out.at(0, y), row.data(), row.size());
    }
    return out;
}

void write_ppm(const fs::path& path, const Image<Rgb>& image) {
    auto f = open_out(path);
    f << "P6\n" << image.width << " " << image.height << "\n255\n";
    for (const Rgb& p : image.data) {
        auto q = [](float v) {
            return (unsigned char)std::clamp((int)std::lround(v * 255.0f), 0, 255);
        };
        unsigned char rgb[3] = {q(p.r), q(p.g), q(p.b)};
        f.write(reinterpret_cast<const char*>(rgb), 3);
    }
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

Image<Rgb> read_ppm(const fs::path& path) {
    auto f = open_in(path);
    std::string magic;
    int w, h, maxval;
    f >> magic >> w >> h >> maxval;
    if (magic != "P6" || maxval != 255) throw std::runtime_error("PPM: unsupported " + path.string());
    f.get();
    Image<Rgb> out(w, h);
    for (Rgb& p : out.data) {
        unsigned char rgb[3];
        f.read(reinterpret_cast<char*>(rgb), 3);
        p = {rgb[0] / 255.0f, rgb[1] / 255.0f, rgb[2] / 255.0f};
    }
    if (!f) throw std::runtime_error("PPM: truncated " + path.string());
    return out;
}

void write_vas_ply(const fs::path& path, const VasMesh& mesh,
                   const std::vector<double>& face_gain_db) {
    if (face_gain_db.size() != mesh.faces.size())
        throw std::invalid_argument("write_vas_ply: face property count mismatch");

    // Compact valid grid vertices.
    std::vector<int> remap((size_t)mesh.width * mesh.height, -1);
    std::vector<Vec3> verts;
    for (int y = 0; y < mesh.height; ++y)
        for (int x = 0; x < mesh.width; ++x)
            if (mesh.valid.at(x, y)) {
                remap[(size_t)y * mesh.width + x] = (int)verts.size();
                verts.push_back(mesh.vertices.at(x, y));
            }

    auto f = open_out(path);
    f << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << verts.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "element face " << mesh.faces.size() << "\n"
      << "property list uchar int vertex_indices\n"
      << "property float path_gain_db\n"
      << "end_header\n";
    for (const Vec3& v : verts) {
        float xyz[3] = {(float)v.x, (float)v.y, (float)v.z};
        f.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
    }
    for (size_t i = 0; i < mesh.faces.size(); ++i) {
        unsigned char count = 3;
        f.write(reinterpret_cast<const char*>(&count), 1);
        int32_t idx[3];
        for (int k = 0; k < 3; ++k) {
            idx[k] = remap[mesh.faces[i][k]];
            if (idx[k] < 0) throw std::runtime_error("write_vas_ply: face references invalid vertex");
        }
        f.write(reinterpret_cast<const char*>(idx), sizeof(idx));
        float g = (float)face_gain_db[i];
        f.write(reinterpret_cast<const char*>(&g), sizeof(g));
    }
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

PlyData read_vas_ply(const fs::path& path) {
    auto f = open_in(path);
    std::string line;
    size_t n_vert = 0, n_face = 0;
    bool header_done = false;
    while (std::getline(f, line)) {
        std::istringstream ss(line);
        std::string tok;
        ss >> tok;
        if (tok == "element") {
            std::string what;
            size_t count;
            ss >> what >> count;
            if (what == "vertex") n_vert = count;
            else if (what == "face") n_face = count;
        } else if (tok == "end_header") {
            header_done = true;
            break;
        } else if (tok == "format") {
            std::string fmt;
            ss >> fmt;
            if (fmt != "binary_little_endian")
                throw std::runtime_error("PLY: unsupported format in " + path.string());
        }
    }
    if (!header_done) throw std::runtime_error("PLY: missing end_header in " + path.string());

    PlyData out;
    out.vertices.resize(n_vert);
    for (auto& v : out.vertices) {
        float xyz[3];
        f.read(reinterpret_cast<char*>(xyz), sizeof(xyz));
        v = {xyz[0], xyz[1], xyz[2]};
    }
    out.faces.resize(n_face);
    out.face_gain_db.resize(n_face);
    for (size_t i = 0; i < n_face; ++i) {
        unsigned char count;
        f.read(reinterpret_cast<char*>(&count), 1);
        if (count != 3) throw std::runtime_error("PLY: non-triangle face in " + path.string());
        int32_t idx[3];
        f.read(reinterpret_cast<char*>(idx), sizeof(idx));
        out.faces[i] = {idx[0], idx[1], idx[2]};
        f.read(reinterpret_cast<char*>(&out.face_gain_db[i]), sizeof(float));
    }
    if (!f) throw std::runtime_error("PLY: truncated payload in " + path.string());
    return out;
}

void write_scene_obj(const fs::path& obj_path, const Scene& scene) {
    auto f = open_out(obj_path);
    f << "# synthrm scene export\n";
    f.precision(9);
    // One group per semantic class; vertices deduplicated per triangle only.
    for (int cls = 0; cls <= 3; ++cls) {
        bool any = false;
        for (const auto& t : scene.triangles)
            if ((int)t.semantic == cls) { any = true; break; }
        if (!any) continue;
        f << "g " << semantic_name((SemanticClass)cls) << "\n";
        for (const auto& t : scene.triangles) {
            if ((int)t.semantic != cls) continue;
            f << "v " << t.v0.x << " " << t.v0.y << " " << t.v0.z << "\n"
              << "v " << t.v1.x << " " << t.v1.y << " " << t.v1.z << "\n"
              << "v " << t.v2.x << " " << t.v2.y << " " << t.v2.z << "\n"
              << "f -3 -2 -1\n";
        }
    }
    if (!f) throw std::runtime_error("write failed: " + obj_path.string());
}

void write_materials_json(const fs::path& path) {
    ordered_json j = ordered_json::array();
    const auto& table = material_table();
    for (size_t i = 0; i < table.size(); ++i) {
        const Material& m = table[i];
        j.push_back({{"id", i},
                     {"name", m.name},
                     {"permittivity", {{"a", m.perm_a}, {"b", m.perm_b}}},
                     {"conductivity", {{"c", m.cond_c}, {"d", m.cond_d}}},
                     {"albedo", m.albedo},
                     {"roughness", m.roughness}});
    }
    write_json_file(path, j);
}

void write_footprints_json(const fs::path& path, const Scene& scene) {
    ordered_json j = ordered_json::array();
    for (const auto& fp : scene.footprints) {
        ordered_json pts = ordered_json::array();
        for (const auto& p : fp.points) pts.push_back({p.x, p.y});
        j.push_back({{"height", fp.height}, {"points", pts}});
    }
    write_json_file(path, j);
}

void write_camera_json(const fs::path& path, const CameraModel& camera) {
    ordered_json j;
    j["width"] = camera.width;
    j["height"] = camera.height;
    j["K"] = {camera.fx, 0.0, camera.cx, 0.0, camera.fy, camera.cy, 0.0, 0.0, 1.0};
    j["R"] = std::vector<double>(camera.R.m, camera.R.m + 9);
    j["t"] = {camera.t.x, camera.t.y, camera.t.z};
    write_json_file(path, j);
}

CameraModel read_camera_json(const fs::path& path) {
    ordered_json j = read_json_file(path);
    CameraModel cam;
    cam.width = j.at("width");
    cam.height = j.at("height");
    auto K = j.at("K");
    cam.fx = K[0];
    cam.cx = K[2];
    cam.fy = K[4];
    cam.cy = K[5];
    auto R = j.at("R");
    for (int i = 0; i < 9; ++i) cam.R.m[i] = R[i];
    auto t = j.at("t");
    cam.t = {t[0], t[1], t[2]};
    return cam;
}

namespace {

const char* antenna_name(AntennaKind k) {
    switch (k) {
        case AntennaKind::SISO: return "SISO";
        case AntennaKind::MIMO4x4: return "MIMO4x4";
        case AntennaKind::MIMO8x4: return "MIMO8x4";
    }
    return "SISO";
}

} // namespace

void write_tx_json(const fs::path& path, const Vec3& tx, const RadioConfig& config) {
    ordered_json j;
    j["position"] = {tx.x, tx.y, tx.z};
    j["antenna"] = antenna_name(config.antenna.kind);
    j["boresight"] = {config.antenna.boresight.x, config.antenna.boresight.y,
                      config.antenna.boresight.z};
    j["frequency_hz"] = config.frequency;
    j["bandwidth_hz"] = config.bandwidth;
    j["tx_power_dbm"] = config.tx_power_dbm;
    j["temperature_k"] = config.temperature;
    write_json_file(path, j);
}

Image<float> semantic_to_raster(const Image<int32_t>& semantic) {
    Image<float> out(semantic.width, semantic.height);
    for (size_t i = 0; i < semantic.size(); ++i) out.data[i] = (float)semantic.data[i];
    return out;
}

Image<float> vec_component_raster(const Image<Vec3>& field, int component) {
    Image<float> out(field.width, field.height);
    for (size_t i = 0; i < field.size(); ++i) out.data[i] = (float)field.data[i][component];
    return out;
}

const std::vector<std::string>& sample_raster_names() {
    static const std::vector<std::string> names = {
        "depth.pfm", "normal_x.pfm", "normal_y.pfm", "normal_z.pfm",
        "albedo.pfm", "roughness.pfm", "semantic.pfm", "path_gain.pfm", "sinr.pfm"};
    return names;
}

SampleRecord export_sample(const fs::path& campaign_root, const std::string& sample_id,
                           const ViewBuffers& buffers, const CameraModel& camera,
                           const Vec3& tx, const RadioConfig& config, const VasMesh& vas,
                           const RadioMap& radio, const std::string& archetype,
                           uint64_t seed) {
    const fs::path dir = campaign_root / sample_id;
    fs::create_directories(dir);

    write_ppm(dir / "rgb.ppm", buffers.color);
    write_raster(dir / "depth.pfm", buffers.depth);
    write_raster(dir / "normal_x.pfm", vec_component_raster(buffers.normal, 0));
    write_raster(dir / "normal_y.pfm", vec_component_raster(buffers.normal, 1));
    write_raster(dir / "normal_z.pfm", vec_component_raster(buffers.normal, 2));
    write_raster(dir / "albedo.pfm", buffers.albedo);
    write_raster(dir / "roughness.pfm", buffers.roughness);
    write_raster(dir / "semantic.pfm", semantic_to_raster(buffers.semantic));
    write_raster(dir / "path_gain.pfm", radio.path_gain_db);
    write_raster(dir / "sinr.pfm", radio.sinr_db);
    write_camera_json(dir / "camera.json", camera);
    write_tx_json(dir / "tx.json", tx, config);

    std::vector<double> gain_db(radio.per_face_gain.size());
    for (size_t i = 0; i < gain_db.size(); ++i)
        gain_db[i] = radio.per_face_gain[i] > 0 ? db10(radio.per_face_gain[i])
                                                : -std::numeric_limits<double>::infinity();
    write_vas_ply(dir / "vas.ply", vas, gain_db);

    SampleRecord rec;
    rec.id = sample_id;
    rec.dir = sample_id;
    rec.archetype = archetype;
    rec.seed = seed;
    rec.width = camera.width;
    rec.height = camera.height;
    return rec;
}

void validate_sample(const fs::path& campaign_root, const SampleRecord& record) {
    const fs::path dir = campaign_root / record.dir;
    Image<Rgb> rgb = read_ppm(dir / "rgb.ppm");
    if (rgb.width != record.width || rgb.height != record.height)
        throw std::runtime_error(record.id + ": rgb dimension mismatch");

    Image<float> depth;
    for (const auto& name : sample_raster_names()) {
        Image<float> img = read_raster(dir / name);
        if (img.width != record.width || img.height != record.height)
            throw std::runtime_error(record.id + ": " + name + " dimension mismatch");
        if (name == "depth.pfm") depth = std::move(img);
        else if (name == "path_gain.pfm") {
            // Finite gain implies finite depth at the same pixel.
            for (size_t i = 0; i < img.size(); ++i)
                if (std::isfinite(img.data[i]) && !std::isfinite(depth.data[i]))
                    throw std::runtime_error(record.id + ": gain without depth at pixel " +
                                             std::to_string(i));
        }
    }

    CameraModel cam = read_camera_json(dir / "camera.json");
    cam.validate();

    PlyData ply = read_vas_ply(dir / "vas.ply");
    for (const auto& face : ply.faces)
        for (int k = 0; k < 3; ++k)
            if (face[k] < 0 || face[k] >= (int)ply.vertices.size())
                throw std::runtime_error(record.id + ": PLY face index out of range");
}

} // namespace synthrm
