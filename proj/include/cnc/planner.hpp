#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cnc/graph.hpp"
#include "cnc/view.hpp"

namespace cnc {

enum class Scheme { Cnc, ComputingFirst };

std::string_view to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view text);

/// Relative difference below which two plan costs are treated as a tie.
inline constexpr double kCostTieRel = 1e-9;

struct PlannerConfig {
    // Largest number of cnodes a request may be split across.
    std::size_t split_k = 3;
};

struct ExecutionEstimate {
    double wait_s = 0.0;
    double exec_s = 0.0;
};

/// wait = backlog / (rate * replicas), exec = work / (rate * replicas), all
/// read from the view. Throws Error(UnknownCnode) if the view has no report
/// for the cnode and Error(ServiceNotDeployed) if the service is absent.
ExecutionEstimate estimate_execution(const Graph& graph, const ViewState& view, CnodeId cnode, ServiceId service,
                                     double work_wu);

/// Sum over hops of prop + (view queue + payload) * 8 / bandwidth. Paths with
/// fewer than two routers cost nothing. Throws Error(NonAdjacentHop).
double estimate_path(const Graph& graph, const ViewState& view, const Path& path, double payload_bytes);

/// Same as estimate_path with every queue taken as empty.
double estimate_path_idle(const Graph& graph, const Path& path, double payload_bytes);

/// Least estimate_path route from src to dst. Ties go to fewer hops, then to
/// the lexicographically smallest router-id sequence. src == dst yields an
/// empty path. Throws Error(Unreachable) or Error(UnknownRouter).
Path shortest_latency_path(const Graph& graph, const ViewState& view, RouterId src, RouterId dst,
                           double payload_bytes);

/// Fewest hops, ties to the lexicographically smallest sequence.
Path min_hop_path(const Graph& graph, RouterId src, RouterId dst);

/// Largest-remainder apportionment of `tasks` over `weights`; earlier
/// entries win ties on the remainder.
std::vector<std::uint32_t> apportion(std::uint32_t tasks, std::span<const double> weights);

/// Cost-minimal plan meeting the deadline under the view. Considers every
/// cnode hosting the service on its own and, for k = 2..split_k, the k
/// cheapest hosts sharing the tasks in proportion to their effective rates.
/// Split parts are routed independently; their estimates then include the
/// wait behind other parts of the same plan on shared links.
/// Ties (costs within kCostTieRel): smaller predicted response, fewer assignments, smaller cnode ids.
/// Returns an Infeasible plan (no assignments, cost 0) when nothing fits.
/// Throws Error(NoSuchService) when no known cnode hosts the service.
RoutingPlan plan(const Graph& graph, const ViewState& view, const RegularizedRequest& request,
                 const PlannerConfig& config = {});

/// Computing-first baseline: minimum-hop paths and transmission estimated as
/// if every queue were empty; execution estimates and selection as in plan().
RoutingPlan plan_computing_first(const Graph& graph, const ViewState& view, const RegularizedRequest& request,
                                 const PlannerConfig& config = {});

RoutingPlan plan_with(Scheme scheme, const Graph& graph, const ViewState& view, const RegularizedRequest& request,
                      const PlannerConfig& config = {});

}  // namespace cnc
