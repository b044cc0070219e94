#include "synthrm/campaign.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "synthrm/rng.hpp"
#include "synthrm/vas.hpp"

namespace synthrm {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

const char* archetype_name(Archetype a) {
    switch (a) {
        case Archetype::Downtown: return "downtown";
        case Archetype::Mix: return "mix";
        case Archetype::Margin: return "margin";
    }
    return "mix";
}

Archetype archetype_from_name(const std::string& name) {
    if (name == "downtown") return Archetype::Downtown;
    if (name == "mix") return Archetype::Mix;
    if (name == "margin") return Archetype::Margin;
    throw std::invalid_argument("unknown archetype: " + name);
}

void CampaignConfig::validate() const {
    if (scenes.empty()) throw std::invalid_argument("campaign: no scenes configured");
    for (const auto& s : scenes) s.validate();
    if (views_per_scene < 1) throw std::invalid_argument("campaign: views_per_scene must be >= 1");
    if (tx_per_view < 1) throw std::invalid_argument("campaign: tx_per_view must be >= 1");
    if (width < 2 || height < 2) throw std::invalid_argument("campaign: resolution must be >= 2x2");
    if (fov_deg <= 0 || fov_deg >= 180) throw std::invalid_argument("campaign: fov out of range");
    if (community_resolution <= 0)
        throw std::invalid_argument("campaign: community_resolution must be > 0");
    radio.validate();
    if (out_dir.empty()) throw std::invalid_argument("campaign: out_dir not set");
}

namespace {

template <typename T>
T take(ordered_json& obj, const char* key, T fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    T v = it->template get<T>();
    obj.erase(it);
    return v;
}

void reject_unknown(const ordered_json& obj, const std::string& where) {
    if (!obj.empty())
        throw std::invalid_argument("campaign config: unknown key \"" + obj.begin().key() +
                                    "\" in " + where);
}

AntennaKind antenna_from_name(const std::string& name) {
    if (name == "SISO") return AntennaKind::SISO;
    if (name == "MIMO4x4") return AntennaKind::MIMO4x4;
    if (name == "MIMO8x4") return AntennaKind::MIMO8x4;
    throw std::invalid_argument("campaign config: unknown antenna kind " + name);
}

} // namespace

CampaignConfig load_campaign_config(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open campaign config: " + path.string());
    ordered_json j;
    try {
        j = ordered_json::parse(f);
    } catch (const std::exception& e) {
        throw std::invalid_argument("campaign config: " + std::string(e.what()));
    }
    if (!j.is_object()) throw std::invalid_argument("campaign config: root must be an object");

    CampaignConfig cfg;
    cfg.seed = take<uint64_t>(j, "seed", 0);
    cfg.width = take<int>(j, "width", 64);
    cfg.height = take<int>(j, "height", 64);
    cfg.fov_deg = take<double>(j, "fov_deg", 60.0);
    cfg.views_per_scene = take<int>(j, "views_per_scene", 4);
    cfg.tx_per_view = take<int>(j, "tx_per_view", 1);
    cfg.community_resolution = take<double>(j, "community_resolution", 1.0);
    cfg.out_dir = take<std::string>(j, "out_dir", "");

    std::string traj = take<std::string>(j, "trajectory", "orbit");
    if (traj == "orbit") cfg.trajectory = TrajectoryKind::OrbitUAV;
    else if (traj == "street") cfg.trajectory = TrajectoryKind::StreetVehicle;
    else throw std::invalid_argument("campaign config: unknown trajectory " + traj);

    if (auto it = j.find("scenes"); it != j.end()) {
        if (!it->is_array()) throw std::invalid_argument("campaign config: scenes must be an array");
        for (ordered_json s : *it) {
            std::string arche = take<std::string>(s, "archetype", "mix");
            double extent = take<double>(s, "grid_extent", 200.0);
            BlockSpec spec = BlockSpec::for_archetype(archetype_from_name(arche), extent, 0);
            spec.street_width = take<double>(s, "street_width", spec.street_width);
            spec.lot_size = take<double>(s, "lot_size", spec.lot_size);
            spec.height_min = take<double>(s, "height_min", spec.height_min);
            spec.height_max = take<double>(s, "height_max", spec.height_max);
            spec.density = take<double>(s, "density", spec.density);
            reject_unknown(s, "scenes[]");
            cfg.scenes.push_back(spec);
        }
        j.erase("scenes");
    }

    if (auto it = j.find("radio"); it != j.end()) {
        ordered_json r = *it;
        cfg.radio.frequency = take<double>(r, "frequency_hz", cfg.radio.frequency);
        cfg.radio.bandwidth = take<double>(r, "bandwidth_hz", cfg.radio.bandwidth);
        cfg.radio.tx_power_dbm = take<double>(r, "tx_power_dbm", cfg.radio.tx_power_dbm);
        cfg.radio.temperature = take<double>(r, "temperature_k", cfg.radio.temperature);
        cfg.radio.max_depth = take<int>(r, "max_depth", cfg.radio.max_depth);
        cfg.radio.specular_depth_cap =
            take<int>(r, "specular_depth_cap", cfg.radio.specular_depth_cap);
        cfg.radio.los = take<bool>(r, "los", cfg.radio.los);
        cfg.radio.specular_reflection =
            take<bool>(r, "specular_reflection", cfg.radio.specular_reflection);
        cfg.radio.refraction = take<bool>(r, "refraction", cfg.radio.refraction);
        cfg.radio.diffraction = take<bool>(r, "diffraction", cfg.radio.diffraction);
        cfg.radio.antenna.kind = antenna_from_name(take<std::string>(r, "antenna", "SISO"));
        if (auto b = r.find("boresight"); b != r.end()) {
            cfg.radio.antenna.boresight =
                normalize({(*b)[0].get<double>(), (*b)[1].get<double>(), (*b)[2].get<double>()});
            r.erase(b);
        }
        reject_unknown(r, "radio");
        j.erase("radio");
    }

    reject_unknown(j, "root");
    return cfg;
}

CampaignResult run_campaign(const CampaignConfig& config) {
    config.validate();
    fs::create_directories(config.out_dir);

    CampaignResult result;
    for (size_t scene_idx = 0; scene_idx < config.scenes.size(); ++scene_idx) {
        const uint64_t scene_seed = derive_seed(config.seed, scene_idx);
        BlockSpec spec = config.scenes[scene_idx];
        spec.seed = scene_seed;
        Scene scene = generate_city(spec);

        char scene_tag[32];
        std::snprintf(scene_tag, sizeof(scene_tag), "scene%03zu", scene_idx);
        const fs::path scene_dir = config.out_dir / scene_tag;
        fs::create_directories(scene_dir);
        write_scene_obj(scene_dir / "scene.obj", scene);
        write_materials_json(scene_dir / "materials.json");
        write_footprints_json(scene_dir / "footprints.json", scene);

        std::vector<CameraModel> cameras =
            sample_trajectory(scene, config.trajectory, config.views_per_scene,
                              derive_seed(scene_seed, 1), config.width, config.height,
                              config.fov_deg);
        std::vector<Vec3> tx_positions = sample_tx_positions(
            scene, config.views_per_scene * config.tx_per_view, derive_seed(scene_seed, 2));

        PathSolver solver(scene, config.radio);
        std::vector<ViewBuffers> views;
        std::vector<int> view_of_sample; // index into views per exported sample

        for (int view_idx = 0; view_idx < config.views_per_scene; ++view_idx) {
            const CameraModel& cam = cameras[view_idx];
            ViewBuffers buffers = render_view(scene, solver.occluder(), cam);
            VasMesh vas = reconstruct_vas(buffers.depth, cam);

            for (int tx_idx = 0; tx_idx < config.tx_per_view; ++tx_idx) {
                const Vec3& tx =
                    tx_positions[(size_t)view_idx * config.tx_per_view + tx_idx];
                char leaf[32];
                std::snprintf(leaf, sizeof(leaf), "view%02d_tx%02d", view_idx, tx_idx);
                const std::string id = std::string(scene_tag) + "/" + leaf;
                try {
                    RadioMap radio = compute_radio_map(scene, tx, cam, vas, config.radio);
                    SampleRecord rec =
                        export_sample(config.out_dir, id, buffers, cam, tx, config.radio, vas,
                                      radio, archetype_name(spec.archetype), scene_seed);
                    result.samples.push_back(rec);
                    view_of_sample.push_back(view_idx);
                } catch (const std::exception& e) {
                    result.failures.push_back(id + ": " + e.what());
                }
            }
            views.push_back(std::move(buffers));
        }

        SensingGraph graph = build_sensing_graph(views);
        graph.communities = detect_communities(graph, config.community_resolution);
        write_graph_report(scene_dir / "sensing_graph.json", graph);

        // Stamp the community of each sample's view.
        size_t first = result.samples.size() - view_of_sample.size();
        for (size_t k = 0; k < view_of_sample.size(); ++k)
            result.samples[first + k].community = graph.communities[view_of_sample[k]];
        result.graphs.push_back(std::move(graph));
    }

    write_manifest(config.out_dir, config, result);
    return result;
}

void write_manifest(const fs::path& out_dir, const CampaignConfig& config,
                    const CampaignResult& result) {
    ordered_json j;
    j["seed"] = config.seed;
    j["width"] = config.width;
    j["height"] = config.height;
    j["scene_count"] = config.scenes.size();
    j["views_per_scene"] = config.views_per_scene;
    j["tx_per_view"] = config.tx_per_view;

    ordered_json samples = ordered_json::array();
    for (const auto& rec : result.samples)
        samples.push_back({{"id", rec.id},
                           {"dir", rec.dir},
                           {"archetype", rec.archetype},
                           {"seed", rec.seed},
                           {"width", rec.width},
                           {"height", rec.height},
                           {"community", rec.community}});
    j["samples"] = samples;
    j["failures"] = result.failures;

    std::ofstream f(out_dir / "manifest.json", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write manifest.json");
    f << j.dump(2) << "\n";
}

void write_graph_report(const fs::path& path, const SensingGraph& graph) {
    ordered_json j;
    j["node_count"] = graph.node_count;
    ordered_json edges = ordered_json::array();
    for (const auto& e : graph.edges) edges.push_back({e.i, e.j, e.weight});
    j["edges"] = edges;
    j["communities"] = graph.communities;

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << j.dump(2) << "\n";
}

} // namespace synthrm
