#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cnc/model.hpp"
#include "cnc/planner.hpp"

namespace cnc {

enum class ViewMode {
    Distributed,  // each router plans with the view built from CNC packets
    Oracle,       // planners read live state
};

/// Poisson bursts of bulk bytes injected in both directions of each listed
/// link. The burst rate per direction is utilization * bandwidth / (8 * burst).
struct BackgroundLoad {
    double utilization = 0.0;
    double burst_bytes = 12.5e6;
    std::vector<LinkId> links;
    double start_s = 0.0;
    std::optional<double> end_s;  // defaults to the end of request activity
};

/// Seeded request stream: Poisson arrivals over [start_s, end_s), ingress
/// uniform over `ingress`, task count uniform over [tasks_min, tasks_max].
struct WorkloadSpec {
    double rate_per_s = 0.0;
    double start_s = 0.0;
    double end_s = 0.0;
    ServiceId service;
    std::uint32_t tasks_min = 1;
    std::uint32_t tasks_max = 1;
    std::vector<RouterId> ingress;
    Level level = Level::Performance;
    std::optional<double> deadline_s;
    std::optional<double> usage_duration_s;
    std::optional<ResourceSpec> resources;
};

/// Bytes already waiting on one direction of a link at time zero.
struct InitialQueue {
    LinkId link;
    RouterId from;
    double bytes = 0.0;
};

struct SimSettings {
    Scheme scheme = Scheme::Cnc;
    ViewMode view_mode = ViewMode::Distributed;
    bool cnc_enabled = true;
    double cnc_period_s = 0.1;
    double cnc_packet_bytes = 1500.0;
    bool bootstrap_views = true;
    double default_deadline_s = 86'400.0;
    std::size_t split_k = 3;
    double sim_until_s = 0.0;  // periodic activity runs at least this long
    double max_time_s = 1e7;   // hard horizon
};

struct Scenario {
    Topology topology;
    std::vector<RawRequest> requests;
    std::optional<WorkloadSpec> workload;
    BackgroundLoad background;
    std::vector<InitialQueue> initial_queues;
    std::uint64_t rng_seed = 1;
    SimSettings settings;
};

/// Throws Error(InvalidScenario) on malformed JSON or schema violations.
/// Semantic checks are left to validate_scenario().
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);
std::string scenario_to_json(const Scenario& scenario);

/// Topology diagnostics plus request, workload and load checks.
std::vector<Diagnostic> validate_scenario(const Scenario& scenario);

std::string_view to_string(ViewMode mode);

}  // namespace cnc
