#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "synthrm/graph.hpp"
#include "synthrm/io.hpp"
#include "synthrm/radio.hpp"
#include "synthrm/render.hpp"
#include "synthrm/scene.hpp"

namespace synthrm {

struct CampaignConfig {
    std::vector<BlockSpec> scenes;
    TrajectoryKind trajectory = TrajectoryKind::OrbitUAV;
    int views_per_scene = 4;
    int tx_per_view = 1;
    int width = 64, height = 64;
    double fov_deg = 60.0;
    double community_resolution = 1.0;
    RadioConfig radio;
    std::filesystem::path out_dir;
    uint64_t seed = 0;

    void validate() const; // throws std::invalid_argument
};

// JSON campaign file; unknown keys rejected. Throws std::invalid_argument
// on schema violations, std::runtime_error on I/O failures.
CampaignConfig load_campaign_config(const std::filesystem::path& path);

struct CampaignResult {
    std::vector<SampleRecord> samples;
    std::vector<std::string> failures; // "<sample id>: <reason>"
    std::vector<SensingGraph> graphs;  // one per scene, communities filled
};

// generate -> tx/trajectory -> render -> VAS -> simulate -> export, then
// per-scene community detection and a manifest.json at the root. Per-sample
// failures are recorded and skipped; throws only on config errors.
CampaignResult run_campaign(const CampaignConfig& config);

void write_manifest(const std::filesystem::path& out_dir, const CampaignConfig& config,
                    const CampaignResult& result);

void write_graph_report(const std::filesystem::path& path, const SensingGraph& graph);

const char* archetype_name(Archetype a);
Archetype archetype_from_name(const std::string& name);

} // namespace synthrm
