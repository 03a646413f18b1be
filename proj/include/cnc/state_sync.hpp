#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "cnc/kernel.hpp"
#include "cnc/view.hpp"

namespace cnc {

/// Status a router floods to every other router: the queues of its outgoing
/// links and the deployments/backlogs of the cnodes attached to it.
struct CncStatePacket {
    RouterId origin;
    std::uint64_t seq = 0;
    double sampled_at_s = 0.0;
    std::map<LinkId, double> link_reports;  // queue of the origin -> neighbour direction
    std::map<CnodeId, CnodeStatus> cnode_reports;

    bool operator==(const CncStatePacket&) const = default;
};

/// Snapshot of `router`'s local state at kernel.now() stamped with `seq`.
CncStatePacket perceive(const Kernel& kernel, RouterId router, std::uint64_t seq);

struct DirectoryEntry {
    CnodeId cnode;
    int replicas = 0;
    double backlog_wu = 0.0;

    bool operator==(const DirectoryEntry&) const = default;
};

using ServiceDirectory = std::map<ServiceId, std::vector<DirectoryEntry>>;

/// A router's picture of the whole system, assembled from CNC packets. Keeps
/// exactly one packet per origin: the one with the highest seq seen.
class GlobalView {
public:
    /// Stores the packet if its seq is newer than the stored one for that
    /// origin. Returns whether the view changed.
    bool apply(std::shared_ptr<const CncStatePacket> packet);
    bool apply(const CncStatePacket& packet) { return apply(std::make_shared<const CncStatePacket>(packet)); }

    /// now - sampled_at of the stored entry. Throws Error(UnknownOrigin).
    double staleness(RouterId origin, double now) const;
    std::optional<std::uint64_t> seq_of(RouterId origin) const;
    std::size_t size() const { return entries_.size(); }
    const CncStatePacket* entry(RouterId origin) const;

    ServiceDirectory service_directory() const;
    ViewState materialize(const Graph& graph) const;

    bool operator==(const GlobalView& other) const;

private:
    std::map<RouterId, std::shared_ptr<const CncStatePacket>> entries_;
};

struct FloodStats {
    std::uint64_t originated = 0;
    std::uint64_t forward_actions = 0;  // origin sends plus relays
    std::uint64_t receptions = 0;
    std::uint64_t accepted = 0;
    std::uint64_t duplicates = 0;
};

/// Periodic link-state style flooding of CncStatePackets over the kernel's
/// links. Every router keeps its own GlobalView; a router relays a given
/// (origin, seq) only when it updates its view, and never back over the link
/// it arrived on. CNC packets share link queues with data traffic.
class CncDissemination {
public:
    CncDissemination(Kernel& kernel, double packet_bytes);

    GlobalView& view(RouterId router) { return views_[kernel_->graph().router_index(router)]; }
    const GlobalView& view(RouterId router) const { return views_[kernel_->graph().router_index(router)]; }
    std::uint64_t last_seq(RouterId router) const { return seqs_[kernel_->graph().router_index(router)]; }
    const FloodStats& stats() const { return stats_; }

    /// Applies a fresh snapshot of every router to every view without
    /// sending anything (seq 0).
    void bootstrap();
    /// Perceives `origin` now, applies it locally and floods it.
    void originate(RouterId origin);
    /// Floods an already built packet from its origin.
    void broadcast(std::shared_ptr<const CncStatePacket> packet);
    /// Schedules ticks at k * period_s, k = 1, 2, ... Each tick every router
    /// originates one packet. Ticking continues while k * period_s <= until_s
    /// or `keep_going()` returns true.
    void start(double period_s, double until_s, std::function<bool()> keep_going = {});

    /// Called for every packet accepted into a view (router, packet).
    std::function<void(RouterId, const CncStatePacket&)> on_accept;

private:
    void send(std::size_t from, std::size_t to, std::shared_ptr<const CncStatePacket> packet);
    void receive(std::size_t at, std::size_t from, std::shared_ptr<const CncStatePacket> packet);
    void relay(std::size_t at, std::optional<std::size_t> except, const std::shared_ptr<const CncStatePacket>& packet);
    void schedule_tick(std::uint64_t k);

    Kernel* kernel_;
    double packet_bytes_;
    double period_s_ = 0.0;
    double until_s_ = 0.0;
    std::function<bool()> keep_going_;
    std::vector<GlobalView> views_;
    std::vector<std::uint64_t> seqs_;
    FloodStats stats_;
};

}  // namespace cnc
