#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string_view>
#include <vector>

#include "cnc/graph.hpp"
#include "cnc/view.hpp"

namespace cnc {

/// prop_delay + (queued + size) * 8 / bandwidth. Time for a packet of
/// `size_bytes` to cross `link` when `queued_bytes` are ahead of it.
double link_transfer_time(double size_bytes, const Link& link, double queued_bytes);

enum class EventKind { PacketArrival, ExecutionComplete, CncBroadcastTick, RequestSubmit, BackgroundBurst };

std::string_view to_string(EventKind kind);

/// Kind plus up to three entity ids; what the ids mean depends on the kind
/// (see docs/trace_format.md).
struct EventTag {
    EventKind kind = EventKind::PacketArrival;
    std::array<std::int64_t, 3> ids = {-1, -1, -1};
};

struct TraceRecord {
    double time_s = 0.0;
    std::uint64_t seq = 0;
    EventTag tag;
};

enum class PacketKind { Cnc = 0, Request = 1, Result = 2 };

struct Packet {
    PacketKind kind = PacketKind::Request;
    double size_bytes = 0.0;
    Path path;            // routers still to visit, first entry is the current router
    std::int64_t context = -1;  // owner id recorded in the trace (request id, origin router)
    std::uint64_t id = 0;       // assigned by the kernel
};

/// FIFO transmitter for one direction of a link. Accepted bytes drain at line
/// rate; queued() is the amount not yet serialized.
class LinkQueue {
public:
    explicit LinkQueue(const Link* link = nullptr) : link_(link) {}

    double queued(double now) const;
    /// Accepts `bytes` at `now` and returns the time until they have fully
    /// arrived at the far end.
    double enqueue(double now, double bytes);

    double bytes_enqueued() const { return enqueued_; }
    double bytes_serialized(double now) const { return enqueued_ - queued(now); }
    const Link& link() const { return *link_; }

private:
    const Link* link_;
    double busy_until_ = 0.0;
    double enqueued_ = 0.0;
};

/// FIFO of one service on one cnode, served at tier rate times replica count.
class ServiceQueue {
public:
    ServiceQueue() = default;
    ServiceQueue(double effective_rate, double initial_backlog_wu)
        : rate_(effective_rate), busy_until_(initial_backlog_wu / effective_rate), admitted_(initial_backlog_wu) {}

    double effective_rate() const { return rate_; }
    double backlog(double now) const;
    /// Admits work and returns its completion time.
    double admit(double now, double work_wu);

    double work_admitted() const { return admitted_; }
    double work_completed(double now) const { return admitted_ - backlog(now); }

private:
    double rate_ = 1.0;
    double busy_until_ = 0.0;
    double admitted_ = 0.0;
};

/// Single-threaded discrete-event kernel. Events fire in (time, seq) order,
/// seq being assigned at insertion. Owns the live link and compute queues.
class Kernel {
public:
    using Action = std::function<void()>;
    using DeliveryHandler = std::function<void(const Packet&)>;

    explicit Kernel(const Graph& graph);

    Kernel(const Kernel&) = delete;
    Kernel& operator=(const Kernel&) = delete;

    const Graph& graph() const { return *graph_; }
    double now() const { return now_; }

    std::uint64_t schedule(double at, EventTag tag, Action action);
    bool empty() const { return heap_.empty(); }
    double next_time() const;
    /// Fires one event; false when the queue is empty.
    bool step();
    /// Fires events until the queue drains. Throws Error(HorizonExceeded) if
    /// a pending event lies beyond `max_time_s`.
    void run(double max_time_s);

    /// Store-and-forward transmission along packet.path starting at `from`.
    /// `on_delivered` runs when the last router is reached. Throws
    /// Error(NonAdjacentHop) if the path is not a walk.
    void transmit(Packet packet, RouterId from, DeliveryHandler on_delivered);
    /// Adds background bytes to a directed link queue.
    void inject(DirLinkIndex dlink, double bytes);

    /// Queues work on a cnode's service FIFO; returns the completion time.
    /// Throws Error(ServiceNotDeployed).
    double execute(std::size_t cnode, ServiceId service, double work_wu, std::int64_t context, Action on_complete);

    double queued_bytes(DirLinkIndex dlink) const { return links_[dlink].queued(now_); }
    const LinkQueue& link_queue(DirLinkIndex dlink) const { return links_[dlink]; }
    double backlog_wu(std::size_t cnode, ServiceId service) const;
    const ServiceQueue* service_queue(std::size_t cnode, ServiceId service) const;

    /// Live state in planner form.
    ViewState snapshot() const;
    CnodeStatus cnode_status(std::size_t cnode) const;

    void enable_trace(bool on) { tracing_ = on; }
    const std::vector<TraceRecord>& trace() const { return trace_; }
    std::uint64_t events_processed() const { return processed_; }

private:
    struct Event {
        double time;
        std::uint64_t seq;
        EventTag tag;
        Action action;
    };
    struct Later {
        bool operator()(const Event& x, const Event& y) const {
            return x.time > y.time || (x.time == y.time && x.seq > y.seq);
        }
    };

    void forward(std::shared_ptr<Packet> packet, std::shared_ptr<const std::vector<DirLinkIndex>> hops,
                 std::size_t hop, std::shared_ptr<DeliveryHandler> on_delivered);

    const Graph* graph_;
    double now_ = 0.0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t next_packet_ = 0;
    std::uint64_t processed_ = 0;
    std::vector<Event> heap_;
    std::vector<LinkQueue> links_;
    std::vector<std::map<ServiceId, ServiceQueue>> compute_;
    bool tracing_ = false;
    std::vector<TraceRecord> trace_;
};

}  // namespace cnc
