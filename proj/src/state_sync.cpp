#include "cnc/state_sync.hpp"

#include <algorithm>
#include <sstream>

#include "cnc/error.hpp"

namespace cnc {

CncStatePacket perceive(const Kernel& kernel, RouterId router, std::uint64_t seq) {
    const auto& g = kernel.graph();
    const auto r = g.router_index(router);
    CncStatePacket p;
    p.origin = router;
    p.seq = seq;
    p.sampled_at_s = kernel.now();
    for (const auto& arc : g.arcs(r)) p.link_reports[g.link_of(arc.dlink).id] = kernel.queued_bytes(arc.dlink);
    for (auto c : g.cnodes_at(r)) p.cnode_reports[g.cnode(c).id] = kernel.cnode_status(c);
    return p;
}

bool GlobalView::apply(std::shared_ptr<const CncStatePacket> packet) {
    auto [it, inserted] = entries_.try_emplace(packet->origin, packet);
    if (inserted) return true;
    if (packet->seq <= it->second->seq) return false;
    it->second = std::move(packet);
    return true;
}

const CncStatePacket* GlobalView::entry(RouterId origin) const {
    auto it = entries_.find(origin);
    return it == entries_.end() ? nullptr : it->second.get();
}

double GlobalView::staleness(RouterId origin, double now) const {
    const auto* e = entry(origin);
    if (!e) {
        std::ostringstream os;
        os << "no status from router " << origin;
        throw Error(ErrorCode::UnknownOrigin, os.str());
    }
    return now - e->sampled_at_s;
}

std::optional<std::uint64_t> GlobalView::seq_of(RouterId origin) const {
    const auto* e = entry(origin);
    if (!e) return std::nullopt;
    return e->seq;
}

ServiceDirectory GlobalView::service_directory() const {
    ServiceDirectory dir;
    for (const auto& [origin, packet] : entries_) {
        for (const auto& [cnode, status] : packet->cnode_reports) {
            for (const auto& [svc, replicas] : status.deployments) {
                auto b = status.backlog_wu.find(svc);
                dir[svc].push_back({cnode, replicas, b == status.backlog_wu.end() ? 0.0 : b->second});
            }
        }
    }
    for (auto& [svc, entries] : dir)
        std::sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) { return x.cnode < y.cnode; });
    return dir;
}

ViewState GlobalView::materialize(const Graph& graph) const {
    ViewState v;
    v.queued_bytes.assign(graph.dlink_count(), 0.0);
    v.cnodes.resize(graph.cnode_count());
    for (const auto& [origin, packet] : entries_) {
        for (const auto& [link, bytes] : packet->link_reports) v.queued_bytes[graph.dlink_from(link, origin)] = bytes;
        for (const auto& [cnode, status] : packet->cnode_reports) v.cnodes[graph.cnode_index(cnode)] = status;
    }
    return v;
}

bool GlobalView::operator==(const GlobalView& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    auto a = entries_.begin();
    auto b = other.entries_.begin();
    for (; a != entries_.end(); ++a, ++b) {
        if (a->first != b->first || !(*a->second == *b->second)) return false;
    }
    return true;
}

CncDissemination::CncDissemination(Kernel& kernel, double packet_bytes)
    : kernel_(&kernel), packet_bytes_(packet_bytes),
      views_(kernel.graph().router_count()), seqs_(kernel.graph().router_count(), 0) {}

void CncDissemination::bootstrap() {
    const auto& g = kernel_->graph();
    for (std::size_t r = 0; r < g.router_count(); ++r) {
        auto packet = std::make_shared<const CncStatePacket>(perceive(*kernel_, g.router_id(r), 0));
        for (auto& view : views_) view.apply(packet);
    }
}

void CncDissemination::originate(RouterId origin) {
    const auto r = kernel_->graph().router_index(origin);
    broadcast(std::make_shared<const CncStatePacket>(perceive(*kernel_, origin, ++seqs_[r])));
}

void CncDissemination::broadcast(std::shared_ptr<const CncStatePacket> packet) {
    const auto r = kernel_->graph().router_index(packet->origin);
    ++stats_.originated;
    if (views_[r].apply(packet) && on_accept) on_accept(packet->origin, *packet);
    relay(r, std::nullopt, packet);
}

void CncDissemination::relay(std::size_t at, std::optional<std::size_t> except,
                             const std::shared_ptr<const CncStatePacket>& packet) {
    ++stats_.forward_actions;
    for (const auto& arc : kernel_->graph().arcs(at)) {
        if (except && arc.to == *except) continue;
        send(at, arc.to, packet);
    }
}

void CncDissemination::send(std::size_t from, std::size_t to, std::shared_ptr<const CncStatePacket> packet) {
    const auto& g = kernel_->graph();
    Packet p;
    p.kind = PacketKind::Cnc;
    p.size_bytes = packet_bytes_;
    p.path = {g.router_id(from), g.router_id(to)};
    p.context = packet->origin.value;
    kernel_->transmit(std::move(p), g.router_id(from),
                      [this, to, from, packet](const Packet&) { receive(to, from, packet); });
}

void CncDissemination::receive(std::size_t at, std::size_t from, std::shared_ptr<const CncStatePacket> packet) {
    ++stats_.receptions;
    if (!views_[at].apply(packet)) {
        ++stats_.duplicates;
        return;
    }
    ++stats_.accepted;
    if (on_accept) on_accept(kernel_->graph().router_id(at), *packet);
    relay(at, from, packet);
}

void CncDissemination::start(double period_s, double until_s, std::function<bool()> keep_going) {
    if (!(period_s > 0.0)) throw std::invalid_argument("CNC period must be positive");
    period_s_ = period_s;
    until_s_ = until_s;
    keep_going_ = std::move(keep_going);
    schedule_tick(1);
}

void CncDissemination::schedule_tick(std::uint64_t k) {
    const double at = static_cast<double>(k) * period_s_;
    const bool within = at <= until_s_ * (1.0 + 1e-12);
    if (!within && !(keep_going_ && keep_going_())) return;
    kernel_->schedule(at, {EventKind::CncBroadcastTick, {static_cast<std::int64_t>(k), -1, -1}}, [this, k] {
        const auto& g = kernel_->graph();
        for (std::size_t r = 0; r < g.router_count(); ++r) originate(g.router_id(r));
        schedule_tick(k + 1);
    });
}

}  // namespace cnc
