#pragma once

#include <map>
#include <optional>
#include <vector>

#include "cnc/graph.hpp"

namespace cnc {

/// Deployment and backlog status of one cnode as seen by a planner.
struct CnodeStatus {
    std::map<ServiceId, int> deployments;
    std::map<ServiceId, double> backlog_wu;

    bool operator==(const CnodeStatus&) const = default;
};

/// Flat snapshot a planner works from: queued bytes per directed link and the
/// status of every cnode the view knows about. Produced either from a router's
/// GlobalView or directly from live simulator state.
struct ViewState {
    std::vector<double> queued_bytes;                // indexed by DirLinkIndex
    std::vector<std::optional<CnodeStatus>> cnodes;  // indexed by cnode index; nullopt = unknown

    /// Idle network, every cnode known with its configured deployments and
    /// initial backlog.
    static ViewState initial(const Graph& graph);
};

}  // namespace cnc
