#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "synthrm/analysis.hpp"
#include "synthrm/campaign.hpp"
#include "synthrm/io.hpp"
#include "synthrm/rng.hpp"
#include "synthrm/vas.hpp"

using namespace synthrm;
namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    uint64_t seed = 0;
    bool seed_set = false;
};

CampaignConfig load_config(const CommonArgs& args) {
    CampaignConfig cfg = load_campaign_config(args.config_path);
    if (args.seed_set) cfg.seed = args.seed;
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "campaign config file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", args.seed, "global seed (overrides config)")
        ->each([&args](const std::string&) { args.seed_set = true; });
}

Scene build_scene(const CampaignConfig& cfg, size_t idx) {
    BlockSpec spec = cfg.scenes[idx];
    spec.seed = derive_seed(cfg.seed, idx);
    return generate_city(spec);
}

fs::path scene_dir(const CampaignConfig& cfg, size_t idx) {
    char tag[32];
    std::snprintf(tag, sizeof(tag), "scene%03zu", idx);
    fs::path dir = cfg.out_dir / tag;
    fs::create_directories(dir);
    return dir;
}

int cmd_generate(const CommonArgs& args) {
    CampaignConfig cfg = load_config(args);
    cfg.validate();
    for (size_t i = 0; i < cfg.scenes.size(); ++i) {
        Scene scene = build_scene(cfg, i);
        fs::path dir = scene_dir(cfg, i);
        write_scene_obj(dir / "scene.obj", scene);
        write_materials_json(dir / "materials.json");
        write_footprints_json(dir / "footprints.json", scene);

        std::vector<Vec3> tx = sample_tx_positions(
            scene, cfg.views_per_scene * cfg.tx_per_view, derive_seed(derive_seed(cfg.seed, i), 2));
        ordered_json j = ordered_json::array();
        for (const Vec3& p : tx) j.push_back({p.x, p.y, p.z});
        std::ofstream f(dir / "tx_positions.json", std::ios::binary);
        f << j.dump(2) << "\n";
        std::cout << dir.string() << ": " << scene.triangles.size() << " triangles, "
                  << scene.footprints.size() << " buildings\n";
    }
    return kExitOk;
}

int cmd_render(const CommonArgs& args) {
    CampaignConfig cfg = load_config(args);
    cfg.validate();
    for (size_t i = 0; i < cfg.scenes.size(); ++i) {
        const uint64_t scene_seed = derive_seed(cfg.seed, i);
        Scene scene = build_scene(cfg, i);
        fs::path dir = scene_dir(cfg, i);
        auto cameras = sample_trajectory(scene, cfg.trajectory, cfg.views_per_scene,
                                         derive_seed(scene_seed, 1), cfg.width, cfg.height,
                                         cfg.fov_deg);
        for (int v = 0; v < cfg.views_per_scene; ++v) {
            ViewBuffers buf = render_view(scene, cameras[v]);
            char leaf[32];
            std::snprintf(leaf, sizeof(leaf), "view%02d", v);
            fs::path vdir = dir / leaf;
            fs::create_directories(vdir);
            write_ppm(vdir / "rgb.ppm", buf.color);
            write_raster(vdir / "depth.pfm", buf.depth);
            write_raster(vdir / "normal_x.pfm", vec_component_raster(buf.normal, 0));
            write_raster(vdir / "normal_y.pfm", vec_component_raster(buf.normal, 1));
            write_raster(vdir / "normal_z.pfm", vec_component_raster(buf.normal, 2));
            write_raster(vdir / "albedo.pfm", buf.albedo);
            write_raster(vdir / "roughness.pfm", buf.roughness);
            write_raster(vdir / "semantic.pfm", semantic_to_raster(buf.semantic));
            write_camera_json(vdir / "camera.json", cameras[v]);
        }
        std::cout << dir.string() << ": " << cfg.views_per_scene << " views rendered\n";
    }
    return kExitOk;
}

// simulate and campaign share the driver; campaign is the canonical name.
int run_pipeline(const CommonArgs& args) {
    CampaignConfig cfg = load_config(args);
    CampaignResult result = run_campaign(cfg);
    std::cout << "exported " << result.samples.size() << " samples";
    if (!result.failures.empty()) {
        std::cout << ", " << result.failures.size() << " failed:\n";
        for (const auto& f : result.failures) std::cout << "  " << f << "\n";
        return kExitPartial;
    }
    std::cout << "\n";
    return kExitOk;
}

int cmd_orchestrate(const CommonArgs& args) {
    CampaignConfig cfg = load_config(args);
    cfg.validate();
    for (size_t i = 0; i < cfg.scenes.size(); ++i) {
        const uint64_t scene_seed = derive_seed(cfg.seed, i);
        Scene scene = build_scene(cfg, i);
        auto cameras = sample_trajectory(scene, cfg.trajectory, cfg.views_per_scene,
                                         derive_seed(scene_seed, 1), cfg.width, cfg.height,
                                         cfg.fov_deg);
        std::vector<ViewBuffers> views;
        for (const auto& cam : cameras) views.push_back(render_view(scene, cam));
        SensingGraph graph = build_sensing_graph(views);
        graph.communities = detect_communities(graph, cfg.community_resolution);
        fs::path dir = scene_dir(cfg, i);
        write_graph_report(dir / "sensing_graph.json", graph);
        int n_comm = graph.communities.empty()
                         ? 0
                         : 1 + *std::max_element(graph.communities.begin(),
                                                 graph.communities.end());
        std::cout << dir.string() << ": " << graph.edges.size() << " edges, " << n_comm
                  << " communities\n";
    }
    return kExitOk;
}

void write_histogram_csv(const fs::path& path, const Histogram& h) {
    std::ofstream f(path, std::ios::binary);
    f << "bin_lo_db,bin_hi_db,count\n";
    for (size_t b = 0; b < h.counts.size(); ++b)
        f << h.bin_lo + b * h.bin_width << "," << h.bin_lo + (b + 1) * h.bin_width << ","
          << h.counts[b] << "\n";
}

int cmd_analyze(const std::string& data_dir) {
    const fs::path root = data_dir;
    std::ifstream mf(root / "manifest.json");
    if (!mf) {
        std::cerr << "no manifest.json in " << root.string() << "\n";
        return kExitConfig;
    }
    ordered_json manifest = ordered_json::parse(mf);

    struct Concept {
        const char* name;
        std::vector<int> classes;
        std::vector<double> r;
    };
    std::vector<Concept> concepts = {
        {"roads", {(int)SemanticClass::Road}, {}},
        {"buildings", {(int)SemanticClass::BuildingWall, (int)SemanticClass::BuildingRoof}, {}},
        {"roofs", {(int)SemanticClass::BuildingRoof}, {}},
    };

    std::vector<Image<float>> gains;
    for (const auto& rec : manifest.at("samples")) {
        fs::path dir = root / rec.at("dir").get<std::string>();
        Image<float> gain = read_raster(dir / "path_gain.pfm");
        Image<float> sem = read_raster(dir / "semantic.pfm");
        Image<uint8_t> valid(gain.width, gain.height);
        for (size_t k = 0; k < gain.size(); ++k)
            valid.data[k] = std::isfinite(gain.data[k]) ? 1 : 0;
        for (auto& c : concepts) {
            Image<uint8_t> mask(sem.width, sem.height);
            for (size_t k = 0; k < sem.size(); ++k) {
                int cls = (int)sem.data[k];
                mask.data[k] = std::find(c.classes.begin(), c.classes.end(), cls) !=
                                       c.classes.end()
                                   ? 1
                                   : 0;
            }
            try {
                c.r.push_back(point_biserial(mask, gain, valid));
            } catch (const std::domain_error&) {
                // degenerate view for this concept; skip
            }
        }
        gains.push_back(std::move(gain));
    }
    if (gains.empty()) {
        std::cerr << "manifest lists no samples\n";
        return kExitConfig;
    }

    GainStats stats = gain_statistics(gains);
    ordered_json report;
    report["sample_count"] = gains.size();
    report["skipped_empty"] = stats.skipped_empty;
    report["bic_one"] = stats.bic_one;
    report["bic_two"] = stats.bic_two;
    report["bimodal"] = stats.bimodal();
    ordered_json per_sample = ordered_json::array();
    for (const auto& s : stats.per_sample)
        per_sample.push_back({{"mean_db", s.mean_db},
                              {"max_db", s.max_db},
                              {"std_db", s.std_db},
                              {"finite_pixels", s.finite_pixels}});
    report["per_sample"] = per_sample;
    for (const auto& c : concepts) {
        double mu = 0, var = 0;
        for (double r : c.r) mu += r;
        if (!c.r.empty()) mu /= c.r.size();
        for (double r : c.r) var += (r - mu) * (r - mu);
        if (!c.r.empty()) var /= c.r.size();
        report["point_biserial"][c.name] = {{"mean", mu},
                                            {"std", std::sqrt(var)},
                                            {"views", c.r.size()}};
    }

    fs::path out = root / "analysis";
    fs::create_directories(out);
    std::ofstream rf(out / "report.json", std::ios::binary);
    rf << report.dump(2) << "\n";
    write_histogram_csv(out / "mean_db_hist.csv", stats.mean_hist);
    write_histogram_csv(out / "max_db_hist.csv", stats.max_hist);
    write_histogram_csv(out / "std_db_hist.csv", stats.std_hist);
    std::cout << (out / "report.json").string() << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic urban radio-map dataset generator"};
    app.require_subcommand(1);

    CommonArgs gen_args, render_args, sim_args, camp_args, orch_args;
    std::string analyze_dir;

    add_common(app.add_subcommand("generate", "emit scene geometry and metadata"), gen_args);
    add_common(app.add_subcommand("render", "render optical buffers per view"), render_args);
    add_common(app.add_subcommand("simulate", "render, lift and radio-simulate all samples"),
               sim_args);
    add_common(app.add_subcommand("campaign", "full dataset campaign with manifest"), camp_args);
    add_common(app.add_subcommand("orchestrate", "sensing graph and perception communities"),
               orch_args);
    app.add_subcommand("analyze", "statistics over an exported campaign")
        ->add_option("--data", analyze_dir, "campaign output directory")
        ->required()
        ->check(CLI::ExistingDirectory);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("generate")) return cmd_generate(gen_args);
        if (app.got_subcommand("render")) return cmd_render(render_args);
        if (app.got_subcommand("simulate")) return run_pipeline(sim_args);
        if (app.got_subcommand("campaign")) return run_pipeline(camp_args);
        if (app.got_subcommand("orchestrate")) return cmd_orchestrate(orch_args);
        if (app.got_subcommand("analyze")) return cmd_analyze(analyze_dir);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPartial;
    }
    return kExitOk;
}
