#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cnc/model.hpp"

namespace cnc {

/// Directed half of a link. Index 2*i is a->b of links[i], 2*i+1 is b->a.
using DirLinkIndex = std::size_t;

/// Indexed, validated form of a Topology. Routers, links, cnodes and services
/// get dense indices in increasing id order so that per-entity runtime state
/// can live in flat vectors.
class Graph {
public:
    struct Arc {
        std::size_t to;      // router index
        DirLinkIndex dlink;
    };

    /// Throws Error(InvalidScenario) listing every diagnostic when the
    /// topology does not validate.
    explicit Graph(Topology topology);

    const Topology& topology() const { return topo_; }
    const TierTable& tiers() const { return topo_.tiers; }

    std::size_t router_count() const { return topo_.routers.size(); }
    RouterId router_id(std::size_t index) const { return topo_.routers[index]; }
    std::size_t router_index(RouterId id) const;
    bool has_router(RouterId id) const;

    /// Outgoing arcs, sorted by neighbour router id.
    std::span<const Arc> arcs(std::size_t router) const { return adjacency_[router]; }
    std::optional<DirLinkIndex> dlink_between(std::size_t from, std::size_t to) const;

    std::size_t dlink_count() const { return 2 * topo_.links.size(); }
    const Link& link_of(DirLinkIndex d) const { return topo_.links[d / 2]; }
    std::size_t dlink_tail(DirLinkIndex d) const { return ends_[d].first; }
    std::size_t dlink_head(DirLinkIndex d) const { return ends_[d].second; }
    /// Directed index for `link` leaving router `from`.
    DirLinkIndex dlink_from(LinkId link, RouterId from) const;
    std::size_t link_index(LinkId id) const;

    std::size_t cnode_count() const { return topo_.cnodes.size(); }
    const Cnode& cnode(std::size_t index) const { return topo_.cnodes[index]; }
    std::size_t cnode_index(CnodeId id) const;
    std::size_t cnode_router(std::size_t cnode_index) const { return cnode_router_[cnode_index]; }
    /// Cnode indices attached to a router, in id order.
    std::span<const std::size_t> cnodes_at(std::size_t router) const { return attached_[router]; }

    const ServiceDescriptor& service(ServiceId id) const;
    bool has_service(ServiceId id) const;

    /// Checks that consecutive routers are adjacent; returns the directed link
    /// of each hop or throws Error(NonAdjacentHop).
    std::vector<DirLinkIndex> hops_of(const Path& path) const;

private:
    Topology topo_;
    std::vector<std::vector<Arc>> adjacency_;
    std::vector<std::pair<std::size_t, std::size_t>> ends_;
    std::vector<std::size_t> cnode_router_;
    std::vector<std::vector<std::size_t>> attached_;
};

}  // namespace cnc
