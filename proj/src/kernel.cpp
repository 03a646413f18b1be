#include "cnc/kernel.hpp"

#include <algorithm>
#include <sstream>

#include "cnc/error.hpp"

namespace cnc {

double link_transfer_time(double size_bytes, const Link& link, double queued_bytes) {
    return link.prop_delay_s + (queued_bytes + size_bytes) * 8.0 / link.bandwidth_bps;
}

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::PacketArrival: return "PacketArrival";
        case EventKind::ExecutionComplete: return "ExecutionComplete";
        case EventKind::CncBroadcastTick: return "CncBroadcastTick";
        case EventKind::RequestSubmit: return "RequestSubmit";
        case EventKind::BackgroundBurst: return "BackgroundBurst";
    }
    return "?";
}

double LinkQueue::queued(double now) const {
    if (busy_until_ <= now) return 0.0;
    return (busy_until_ - now) * link_->bandwidth_bps / 8.0;
}

double LinkQueue::enqueue(double now, double bytes) {
    const double t = link_transfer_time(bytes, *link_, queued(now));
    busy_until_ = std::max(now, busy_until_) + bytes * 8.0 / link_->bandwidth_bps;
    enqueued_ += bytes;
    return t;
}

double ServiceQueue::backlog(double now) const {
    if (busy_until_ <= now) return 0.0;
    return (busy_until_ - now) * rate_;
}

double ServiceQueue::admit(double now, double work_wu) {
    const double done = now + (backlog(now) + work_wu) / rate_;
    busy_until_ = done;
    admitted_ += work_wu;
    return done;
}

Kernel::Kernel(const Graph& graph) : graph_(&graph) {
    links_.reserve(graph.dlink_count());
    for (DirLinkIndex d = 0; d < graph.dlink_count(); ++d) links_.emplace_back(&graph.link_of(d));
    compute_.resize(graph.cnode_count());
    for (std::size_t c = 0; c < graph.cnode_count(); ++c) {
        const auto& node = graph.cnode(c);
        const double rate = graph.tiers()[node.tier].rate_wups;
        for (const auto& [svc, replicas] : node.deployments) {
            auto it = node.backlog_wu.find(svc);
            const double initial = it == node.backlog_wu.end() ? 0.0 : it->second;
            compute_[c].emplace(svc, ServiceQueue(rate * replicas, initial));
        }
    }
}

std::uint64_t Kernel::schedule(double at, EventTag tag, Action action) {
    if (at < now_) {
        std::ostringstream os;
        os << "event scheduled in the past (" << at << " < " << now_ << ")";
        throw std::logic_error(os.str());
    }
    const auto seq = next_seq_++;
    heap_.push_back(Event{at, seq, tag, std::move(action)});
    std::push_heap(heap_.begin(), heap_.end(), Later{});
    return seq;
}

double Kernel::next_time() const {
    return heap_.empty() ? now_ : heap_.front().time;
}

bool Kernel::step() {
    if (heap_.empty()) return false;
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    Event ev = std::move(heap_.back());
    heap_.pop_back();
    now_ = ev.time;
    ++processed_;
    if (tracing_) trace_.push_back({ev.time, ev.seq, ev.tag});
    ev.action();
    return true;
}

void Kernel::run(double max_time_s) {
    while (!heap_.empty()) {
        if (heap_.front().time > max_time_s) {
            std::ostringstream os;
            os << "pending event at t=" << heap_.front().time << " beyond horizon " << max_time_s;
            throw Error(ErrorCode::HorizonExceeded, os.str());
        }
        step();
    }
}

void Kernel::transmit(Packet packet, RouterId from, DeliveryHandler on_delivered) {
    if (packet.path.empty() || packet.path.front() != from)
        throw Error(ErrorCode::NonAdjacentHop, "packet path must start at the sending router");
    auto hops = std::make_shared<const std::vector<DirLinkIndex>>(graph_->hops_of(packet.path));
    packet.id = next_packet_++;
    auto shared = std::make_shared<Packet>(std::move(packet));
    auto handler = std::make_shared<DeliveryHandler>(std::move(on_delivered));
    if (hops->empty()) {
        // Already at the destination.
        EventTag tag{EventKind::PacketArrival,
                     {static_cast<std::int64_t>(shared->id), from.value, static_cast<std::int64_t>(shared->kind)}};
        schedule(now_, tag, [shared, handler] { (*handler)(*shared); });
        return;
    }
    forward(std::move(shared), std::move(hops), 0, std::move(handler));
}

void Kernel::forward(std::shared_ptr<Packet> packet, std::shared_ptr<const std::vector<DirLinkIndex>> hops,
                     std::size_t hop, std::shared_ptr<DeliveryHandler> on_delivered) {
    const DirLinkIndex d = (*hops)[hop];
    const double t = links_[d].enqueue(now_, packet->size_bytes);
    const auto head = graph_->router_id(graph_->dlink_head(d));
    EventTag tag{EventKind::PacketArrival,
                 {static_cast<std::int64_t>(packet->id), head.value, static_cast<std::int64_t>(packet->kind)}};
    schedule(now_ + t, tag, [this, packet, hops, hop, on_delivered] {
        packet->path.erase(packet->path.begin());
        if (hop + 1 < hops->size())
            forward(packet, hops, hop + 1, on_delivered);
        else
            (*on_delivered)(*packet);
    });
}

void Kernel::inject(DirLinkIndex dlink, double bytes) {
    links_.at(dlink).enqueue(now_, bytes);
}

double Kernel::execute(std::size_t cnode, ServiceId service, double work_wu, std::int64_t context,
                       Action on_complete) {
    auto& queues = compute_.at(cnode);
    auto it = queues.find(service);
    if (it == queues.end()) {
        std::ostringstream os;
        os << "service " << service << " is not deployed on cnode " << graph_->cnode(cnode).id;
        throw Error(ErrorCode::ServiceNotDeployed, os.str());
    }
    const double done = it->second.admit(now_, work_wu);
    EventTag tag{EventKind::ExecutionComplete, {graph_->cnode(cnode).id.value, service.value, context}};
    schedule(done, tag, std::move(on_complete));
    return done;
}

const ServiceQueue* Kernel::service_queue(std::size_t cnode, ServiceId service) const {
    const auto& queues = compute_.at(cnode);
    auto it = queues.find(service);
    return it == queues.end() ? nullptr : &it->second;
}

double Kernel::backlog_wu(std::size_t cnode, ServiceId service) const {
    const auto* q = service_queue(cnode, service);
    if (!q) {
        std::ostringstream os;
        os << "service " << service << " is not deployed on cnode " << graph_->cnode(cnode).id;
        throw Error(ErrorCode::ServiceNotDeployed, os.str());
    }
    return q->backlog(now_);
}

CnodeStatus Kernel::cnode_status(std::size_t cnode) const {
    CnodeStatus status;
    status.deployments = graph_->cnode(cnode).deployments;
    for (const auto& [svc, q] : compute_[cnode]) status.backlog_wu[svc] = q.backlog(now_);
    return status;
}

ViewState Kernel::snapshot() const {
    ViewState v;
    v.queued_bytes.resize(links_.size());
    for (std::size_t d = 0; d < links_.size(); ++d) v.queued_bytes[d] = links_[d].queued(now_);
    v.cnodes.reserve(compute_.size());
    for (std::size_t c = 0; c < compute_.size(); ++c) v.cnodes.emplace_back(cnode_status(c));
    return v;
}

ViewState ViewState::initial(const Graph& graph) {
    ViewState v;
    v.queued_bytes.assign(graph.dlink_count(), 0.0);
    for (std::size_t c = 0; c < graph.cnode_count(); ++c) {
        CnodeStatus s;
        s.deployments = graph.cnode(c).deployments;
        for (const auto& [svc, replicas] : s.deployments) {
            auto it = graph.cnode(c).backlog_wu.find(svc);
            s.backlog_wu[svc] = it == graph.cnode(c).backlog_wu.end() ? 0.0 : it->second;
        }
        v.cnodes.emplace_back(std::move(s));
    }
    return v;
}

}  // namespace cnc
