#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cnc/ids.hpp"

namespace cnc {

using Path = std::vector<RouterId>;

/// Bidirectional link. Each direction has its own FIFO queue at runtime; the
/// queue contents are not part of the static description.
struct Link {
    LinkId id;
    RouterId a;
    RouterId b;
    double bandwidth_bps = 1e9;
    double prop_delay_s = 0.0;
};

enum class TierKind { Weak = 0, Medium = 1, Strong = 2 };

std::string_view to_string(TierKind tier);
std::optional<TierKind> parse_tier(std::string_view text);

struct TierParams {
    double rate_wups = 1.0;     // work-units per second per replica
    double price_per_wu = 1.0;  // cost-units per work-unit

    bool operator==(const TierParams&) const = default;
};

class TierTable {
public:
    TierTable() = default;
    TierTable(TierParams weak, TierParams medium, TierParams strong) : params_{weak, medium, strong} {}

    /// 1/2/4 wu/s and 1/3/9 cost-units per wu.
    static TierTable defaults() { return {{1.0, 1.0}, {2.0, 3.0}, {4.0, 9.0}}; }

    const TierParams& operator[](TierKind tier) const { return params_[static_cast<std::size_t>(tier)]; }
    TierParams& operator[](TierKind tier) { return params_[static_cast<std::size_t>(tier)]; }

    bool operator==(const TierTable&) const = default;

private:
    std::array<TierParams, 3> params_ = {TierParams{1.0, 1.0}, TierParams{2.0, 3.0}, TierParams{4.0, 9.0}};
};

/// CPU/GPU/memory capacities requested by a resource-level client.
struct ResourceSpec {
    double cpu = 0.0;
    double gpu = 0.0;
    double memory_gb = 0.0;

    bool operator==(const ResourceSpec&) const = default;
    bool covers(const ResourceSpec& wanted) const {
        return cpu >= wanted.cpu && gpu >= wanted.gpu && memory_gb >= wanted.memory_gb;
    }
};

struct ServiceDescriptor {
    ServiceId id;
    std::string name;
    double input_bytes_per_task = 1.0;
    double output_bytes_per_task = 1.0;
    double work_wu_per_task = 1.0;
    // Set for the pseudo-services that stand in for resource classes.
    std::optional<ResourceSpec> resource_class;
};

struct Cnode {
    CnodeId id;
    RouterId attached_router;
    TierKind tier = TierKind::Weak;
    std::map<ServiceId, int> deployments;      // replica counts, each >= 1
    std::map<ServiceId, double> backlog_wu;    // backlog at time zero
};

/// Static part of a scenario: routers, links, compute nodes and the service
/// catalog. Plain data; see validate_topology() and Graph for checked access.
struct Topology {
    std::vector<RouterId> routers;
    std::vector<Link> links;
    std::vector<Cnode> cnodes;
    TierTable tiers = TierTable::defaults();
    std::vector<ServiceDescriptor> services;
};

struct Diagnostic {
    std::string code;     // stable short tag, e.g. "disconnected"
    std::string message;  // human readable detail
};

/// One diagnostic per violated invariant; empty means the topology is usable.
std::vector<Diagnostic> validate_topology(const Topology& topology);

// ---------------------------------------------------------------------------
// Requests

enum class Level { Resource, Function, Performance };

std::string_view to_string(Level level);
std::optional<Level> parse_level(std::string_view text);

struct RawRequest {
    RequestId id;
    Level level = Level::Performance;
    std::optional<ServiceId> service;
    std::optional<ResourceSpec> resources;
    std::uint32_t task_count = 1;
    std::optional<double> deadline_s;        // Performance
    std::optional<double> usage_duration_s;  // Resource
    RouterId ingress;
    double submit_time_s = 0.0;
};

struct RegularizedRequest {
    RequestId id;
    ServiceId service;  // resource specs are resolved to their pseudo-service
    double deadline_s = 0.0;
    std::uint32_t task_count = 1;
    RouterId ingress;
    double submit_time_s = 0.0;

    bool operator==(const RegularizedRequest&) const = default;
};

// ---------------------------------------------------------------------------
// Plans

/// Half-open task index range [begin, end).
struct TaskRange {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;

    std::uint32_t size() const { return end - begin; }
    bool operator==(const TaskRange&) const = default;
};

struct CandidateSchedule {
    CnodeId cnode;
    Path forward_path;
    Path return_path;
    double predicted_wait_s = 0.0;
    double predicted_exec_s = 0.0;
    double predicted_fwd_s = 0.0;
    double predicted_ret_s = 0.0;
    double cost = 0.0;

    double predicted_response_s() const {
        return predicted_fwd_s + predicted_wait_s + predicted_exec_s + predicted_ret_s;
    }
    bool operator==(const CandidateSchedule&) const = default;
};

struct Assignment {
    TaskRange tasks;
    CandidateSchedule schedule;

    bool operator==(const Assignment&) const = default;
};

enum class Verdict { Feasible, Infeasible };

struct RoutingPlan {
    std::vector<Assignment> assignments;
    double predicted_response_s = std::numeric_limits<double>::infinity();
    double predicted_cost = 0.0;
    Verdict verdict = Verdict::Infeasible;

    bool feasible() const { return verdict == Verdict::Feasible; }
    bool operator==(const RoutingPlan&) const = default;
};

// ---------------------------------------------------------------------------
// Bills

enum class Outcome { Completed, RejectedInfeasible, DeadlineMissed };

std::string_view to_string(Outcome outcome);

struct BillRecord {
    RequestId request;
    double metered_wu = 0.0;
    double cost = 0.0;
    Outcome outcome = Outcome::RejectedInfeasible;

    bool operator==(const BillRecord&) const = default;
};

}  // namespace cnc
