#include "cnc/graph.hpp"

#include <algorithm>
#include <sstream>

#include "cnc/error.hpp"

namespace cnc {

namespace {

template <class T, class Key>
std::size_t index_in(const std::vector<T>& sorted, Key key, ErrorCode code, std::string_view what) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), key,
                               [](const T& item, Key k) { return item.id < k; });
    if (it == sorted.end() || it->id != key) {
        std::ostringstream os;
        os << "unknown " << what << " " << key;
        throw Error(code, os.str());
    }
    return static_cast<std::size_t>(it - sorted.begin());
}

}  // namespace

Graph::Graph(Topology topology) : topo_(std::move(topology)) {
    if (auto diags = validate_topology(topo_); !diags.empty()) {
        std::ostringstream os;
        for (std::size_t i = 0; i < diags.size(); ++i) os << (i ? "; " : "") << diags[i].code << ": " << diags[i].message;
        throw Error(ErrorCode::InvalidScenario, os.str());
    }
    std::sort(topo_.routers.begin(), topo_.routers.end());
    std::sort(topo_.links.begin(), topo_.links.end(), [](const Link& x, const Link& y) { return x.id < y.id; });
    std::sort(topo_.cnodes.begin(), topo_.cnodes.end(), [](const Cnode& x, const Cnode& y) { return x.id < y.id; });
    std::sort(topo_.services.begin(), topo_.services.end(),
              [](const ServiceDescriptor& x, const ServiceDescriptor& y) { return x.id < y.id; });

    adjacency_.resize(topo_.routers.size());
    ends_.resize(2 * topo_.links.size());
    for (std::size_t i = 0; i < topo_.links.size(); ++i) {
        const auto& l = topo_.links[i];
        const auto a = router_index(l.a);
        const auto b = router_index(l.b);
        ends_[2 * i] = {a, b};
        ends_[2 * i + 1] = {b, a};
        adjacency_[a].push_back({b, 2 * i});
        adjacency_[b].push_back({a, 2 * i + 1});
    }
    for (auto& arcs : adjacency_)
        std::sort(arcs.begin(), arcs.end(), [](const Arc& x, const Arc& y) { return x.to < y.to; });

    attached_.resize(topo_.routers.size());
    for (std::size_t i = 0; i < topo_.cnodes.size(); ++i) {
        const auto r = router_index(topo_.cnodes[i].attached_router);
        cnode_router_.push_back(r);
        attached_[r].push_back(i);
    }
}

std::size_t Graph::router_index(RouterId id) const {
    auto it = std::lower_bound(topo_.routers.begin(), topo_.routers.end(), id);
    if (it == topo_.routers.end() || *it != id) {
        std::ostringstream os;
        os << "unknown router " << id;
        throw Error(ErrorCode::UnknownRouter, os.str());
    }
    return static_cast<std::size_t>(it - topo_.routers.begin());
}

bool Graph::has_router(RouterId id) const {
    return std::binary_search(topo_.routers.begin(), topo_.routers.end(), id);
}

std::optional<DirLinkIndex> Graph::dlink_between(std::size_t from, std::size_t to) const {
    const auto& arcs = adjacency_[from];
    auto it = std::lower_bound(arcs.begin(), arcs.end(), to, [](const Arc& a, std::size_t t) { return a.to < t; });
    if (it == arcs.end() || it->to != to) return std::nullopt;
    return it->dlink;
}

DirLinkIndex Graph::dlink_from(LinkId link, RouterId from) const {
    const auto i = link_index(link);
    const auto f = router_index(from);
    if (ends_[2 * i].first == f) return 2 * i;
    if (ends_[2 * i + 1].first == f) return 2 * i + 1;
    std::ostringstream os;
    os << "link " << link << " is not adjacent to router " << from;
    throw Error(ErrorCode::NonAdjacentHop, os.str());
}

std::size_t Graph::link_index(LinkId id) const {
    return index_in(topo_.links, id, ErrorCode::InvalidScenario, "link");
}

std::size_t Graph::cnode_index(CnodeId id) const {
    return index_in(topo_.cnodes, id, ErrorCode::UnknownCnode, "cnode");
}

const ServiceDescriptor& Graph::service(ServiceId id) const {
    return topo_.services[index_in(topo_.services, id, ErrorCode::UnknownService, "service")];
}

bool Graph::has_service(ServiceId id) const {
    auto it = std::lower_bound(topo_.services.begin(), topo_.services.end(), id,
                               [](const ServiceDescriptor& s, ServiceId k) { return s.id < k; });
    return it != topo_.services.end() && it->id == id;
}

std::vector<DirLinkIndex> Graph::hops_of(const Path& path) const {
    std::vector<DirLinkIndex> hops;
    if (path.size() < 2) return hops;
    hops.reserve(path.size() - 1);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const auto from = router_index(path[i]);
        const auto to = router_index(path[i + 1]);
        auto d = dlink_between(from, to);
        if (!d) {
            std::ostringstream os;
            os << "routers " << path[i] << " and " << path[i + 1] << " are not adjacent";
            throw Error(ErrorCode::NonAdjacentHop, os.str());
        }
        hops.push_back(*d);
    }
    return hops;
}

}  // namespace cnc
