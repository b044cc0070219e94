#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "synthrm/campaign.hpp"

using namespace synthrm;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const char* name) {
    fs::path p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

CampaignConfig tiny_config(const fs::path& out) {
    CampaignConfig cfg;
    cfg.scenes = {BlockSpec::for_archetype(Archetype::Mix, 120, 0)};
    cfg.views_per_scene = 2;
    cfg.tx_per_view = 1;
    cfg.width = 32;
    cfg.height = 32;
    cfg.out_dir = out;
    cfg.seed = 5;
    cfg.radio.specular_depth_cap = 1;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
}

} // namespace

TEST_CASE("config loader applies archetype defaults and rejects junk") {
    fs::path dir = fresh_dir("synthrm_cfg_test");
    fs::path cfgfile = dir / "c.json";
    {
        std::ofstream f(cfgfile);
        f << R"({"seed": 9, "out_dir": "x", "scenes": [{"archetype": "downtown"}]})";
    }
    CampaignConfig cfg = load_campaign_config(cfgfile);
    CHECK(cfg.seed == 9);
    REQUIRE(cfg.scenes.size() == 1);
    CHECK(cfg.scenes[0].density == doctest::Approx(0.85));
    CHECK(cfg.scenes[0].height_max == doctest::Approx(150));

    {
        std::ofstream f(cfgfile);
        f << R"({"out_dir": "x", "scenes": [], "bogus_key": 1})";
    }
    CHECK_THROWS_AS(load_campaign_config(cfgfile), std::invalid_argument);
    {
        std::ofstream f(cfgfile);
        f << R"(not json)";
    }
    CHECK_THROWS_AS(load_campaign_config(cfgfile), std::invalid_argument);
}

TEST_CASE("invalid campaign configs throw before any work") {
    CampaignConfig cfg = tiny_config("unused");
    cfg.views_per_scene = 0;
    CHECK_THROWS_AS(run_campaign(cfg), std::invalid_argument);
    cfg = tiny_config("");
    CHECK_THROWS_AS(run_campaign(cfg), std::invalid_argument);
    cfg = tiny_config("unused");
    cfg.radio.frequency = -1;
    CHECK_THROWS_AS(run_campaign(cfg), std::invalid_argument);
}

TEST_CASE("a tiny campaign exports a complete, self-consistent tree") {
    fs::path out = fresh_dir("synthrm_campaign_test");
    CampaignConfig cfg = tiny_config(out);
    cfg.scenes.push_back(BlockSpec::for_archetype(Archetype::Margin, 120, 0));
    CampaignResult res = run_campaign(cfg);

    CHECK(res.failures.empty());
    REQUIRE(res.samples.size() == 2 * 2 * 1); // scenes x views x tx
    REQUIRE(res.graphs.size() == 2);
    for (const auto& rec : res.samples) {
        CHECK(rec.community >= 0);
        CHECK_NOTHROW(validate_sample(out, rec));
    }
    CHECK(fs::exists(out / "manifest.json"));
    CHECK(fs::exists(out / "scene000" / "scene.obj"));
    CHECK(fs::exists(out / "scene001" / "sensing_graph.json"));

    nlohmann::json manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(manifest.at("samples").size() == 4);
    CHECK(manifest.at("failures").empty());

    // No machine-specific strings in metadata outputs.
    for (const char* f : {"manifest.json", "scene000/sensing_graph.json"}) {
        std::string text = slurp(out / f);
        CHECK(text.find(out.string()) == std::string::npos);
        CHECK(text.find("/tmp/") == std::string::npos);
    }
}

TEST_CASE("campaigns are byte-identical across runs") {
    fs::path out_a = fresh_dir("synthrm_det_a");
    fs::path out_b = fresh_dir("synthrm_det_b");
    run_campaign(tiny_config(out_a));
    run_campaign(tiny_config(out_b));

    std::vector<fs::path> rel;
    for (const auto& e : fs::recursive_directory_iterator(out_a))
        if (e.is_regular_file()) rel.push_back(fs::relative(e.path(), out_a));
    REQUIRE(!rel.empty());
    for (const auto& r : rel) {
        REQUIRE(fs::exists(out_b / r));
        CHECK(slurp(out_a / r) == slurp(out_b / r));
    }

    // And a different seed changes the data.
    fs::path out_c = fresh_dir("synthrm_det_c");
    CampaignConfig cfg = tiny_config(out_c);
    cfg.seed = 6;
    run_campaign(cfg);
    bool any_diff = false;
    for (const auto& r : rel)
        if (!fs::exists(out_c / r) || slurp(out_a / r) != slurp(out_c / r)) any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("finite path gain implies finite depth in exports") {
    fs::path out = fresh_dir("synthrm_gain_depth");
    CampaignConfig cfg = tiny_config(out);
    CampaignResult res = run_campaign(cfg);
    REQUIRE(!res.samples.empty());
    for (const auto& rec : res.samples) {
        Image<float> depth = read_raster(out / rec.dir / "depth.pfm");
        Image<float> gain = read_raster(out / rec.dir / "path_gain.pfm");
        for (size_t i = 0; i < gain.size(); ++i)
            if (std::isfinite(gain.data[i])) CHECK(std::isfinite(depth.data[i]));
    }
}
