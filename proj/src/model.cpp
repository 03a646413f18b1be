#include "cnc/model.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "cnc/error.hpp"

namespace cnc {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidScenario: return "InvalidScenario";
        case ErrorCode::UnknownRouter: return "UnknownRouter";
        case ErrorCode::UnknownCnode: return "UnknownCnode";
        case ErrorCode::UnknownService: return "UnknownService";
        case ErrorCode::UnknownOrigin: return "UnknownOrigin";
        case ErrorCode::NonAdjacentHop: return "NonAdjacentHop";
        case ErrorCode::ServiceNotDeployed: return "ServiceNotDeployed";
        case ErrorCode::Unreachable: return "Unreachable";
        case ErrorCode::NoSuchService: return "NoSuchService";
        case ErrorCode::MissingDeadline: return "MissingDeadline";
        case ErrorCode::MissingSpec: return "MissingSpec";
        case ErrorCode::MissingService: return "MissingService";
        case ErrorCode::InfeasiblePlan: return "InfeasiblePlan";
        case ErrorCode::DuplicateRange: return "DuplicateRange";
        case ErrorCode::GapDetected: return "GapDetected";
        case ErrorCode::IncompleteResult: return "IncompleteResult";
        case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    }
    return "Unknown";
}

std::string_view to_string(TierKind tier) {
    switch (tier) {
        case TierKind::Weak: return "weak";
        case TierKind::Medium: return "medium";
        case TierKind::Strong: return "strong";
    }
    return "?";
}

std::optional<TierKind> parse_tier(std::string_view text) {
    if (text == "weak") return TierKind::Weak;
    if (text == "medium") return TierKind::Medium;
    if (text == "strong") return TierKind::Strong;
    return std::nullopt;
}

std::string_view to_string(Level level) {
    switch (level) {
        case Level::Resource: return "resource";
        case Level::Function: return "function";
        case Level::Performance: return "performance";
    }
    return "?";
}

std::optional<Level> parse_level(std::string_view text) {
    if (text == "resource") return Level::Resource;
    if (text == "function") return Level::Function;
    if (text == "performance") return Level::Performance;
    return std::nullopt;
}

std::string_view to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::Completed: return "completed";
        case Outcome::RejectedInfeasible: return "rejected";
        case Outcome::DeadlineMissed: return "missed";
    }
    return "?";
}

namespace {

template <class T, class F>
void check_unique(const std::vector<T>& items, F id_of, std::string_view what, std::vector<Diagnostic>& out) {
    std::set<std::uint32_t> seen;
    for (const auto& item : items) {
        const auto v = id_of(item).value;
        if (!seen.insert(v).second) {
            std::ostringstream os;
            os << what << " id " << v << " appears more than once";
            out.push_back({"duplicate-id", os.str()});
        }
    }
}

}  // namespace

std::vector<Diagnostic> validate_topology(const Topology& t) {
    std::vector<Diagnostic> out;
    auto fail = [&](std::string code, auto&&... parts) {
        std::ostringstream os;
        (os << ... << parts);
        out.push_back({std::move(code), os.str()});
    };

    if (t.routers.empty()) fail("empty", "scenario has no routers");

    check_unique(t.routers, [](RouterId r) { return r; }, "router", out);
    check_unique(t.links, [](const Link& l) { return l.id; }, "link", out);
    check_unique(t.cnodes, [](const Cnode& c) { return c.id; }, "cnode", out);
    check_unique(t.services, [](const ServiceDescriptor& s) { return s.id; }, "service", out);

    const std::set<RouterId> routers(t.routers.begin(), t.routers.end());
    std::set<ServiceId> services;
    for (const auto& s : t.services) services.insert(s.id);

    // Union-find over router ids for connectivity.
    std::map<RouterId, RouterId> parent;
    for (auto r : routers) parent[r] = r;
    auto find = [&](RouterId r) {
        while (parent[r] != r) {
            parent[r] = parent[parent[r]];
            r = parent[r];
        }
        return r;
    };

    std::set<std::pair<RouterId, RouterId>> pairs;
    for (const auto& l : t.links) {
        if (!(l.bandwidth_bps > 0.0)) fail("non-positive-bandwidth", "link ", l.id, " has bandwidth ", l.bandwidth_bps);
        if (!(l.prop_delay_s >= 0.0)) fail("negative-prop-delay", "link ", l.id, " has propagation delay ", l.prop_delay_s);
        const bool known = routers.count(l.a) && routers.count(l.b);
        if (!known) {
            fail("unknown-endpoint", "link ", l.id, " references an unknown router");
            continue;
        }
        if (l.a == l.b) {
            fail("self-loop", "link ", l.id, " connects router ", l.a, " to itself");
            continue;
        }
        auto key = std::minmax(l.a, l.b);
        if (!pairs.insert({key.first, key.second}).second)
            fail("parallel-link", "more than one link between routers ", key.first, " and ", key.second);
        parent[find(l.a)] = find(l.b);
    }
    if (!routers.empty()) {
        const auto root = find(*routers.begin());
        for (auto r : routers) {
            if (find(r) != root) {
                fail("disconnected", "router ", r, " is not reachable from router ", *routers.begin());
                break;
            }
        }
    }

    const TierKind kinds[] = {TierKind::Weak, TierKind::Medium, TierKind::Strong};
    for (auto k : kinds) {
        if (!(t.tiers[k].rate_wups > 0.0) || !(t.tiers[k].price_per_wu > 0.0))
            fail("invalid-tier", "tier ", to_string(k), " needs a positive rate and price");
    }
    if (!(t.tiers[TierKind::Weak].rate_wups < t.tiers[TierKind::Medium].rate_wups &&
          t.tiers[TierKind::Medium].rate_wups < t.tiers[TierKind::Strong].rate_wups))
        fail("non-monotone-tiers", "tier rates must strictly increase from weak to strong");
    if (!(t.tiers[TierKind::Weak].price_per_wu < t.tiers[TierKind::Medium].price_per_wu &&
          t.tiers[TierKind::Medium].price_per_wu < t.tiers[TierKind::Strong].price_per_wu))
        fail("non-monotone-tiers", "tier prices must strictly increase from weak to strong");

    for (const auto& s : t.services) {
        if (!(s.input_bytes_per_task > 0.0 && s.output_bytes_per_task > 0.0 && s.work_wu_per_task > 0.0))
            fail("invalid-service", "service ", s.id, " needs positive input, output and work per task");
    }

    for (const auto& c : t.cnodes) {
        if (!routers.count(c.attached_router))
            fail("dangling-attachment", "cnode ", c.id, " attaches to unknown router ", c.attached_router);
        for (const auto& [svc, replicas] : c.deployments) {
            if (!services.count(svc)) fail("unknown-service", "cnode ", c.id, " deploys unknown service ", svc);
            if (replicas < 1) fail("invalid-replicas", "cnode ", c.id, " has ", replicas, " replicas of service ", svc);
        }
        for (const auto& [svc, wu] : c.backlog_wu) {
            if (!(wu >= 0.0)) fail("negative-backlog", "cnode ", c.id, " has negative backlog for service ", svc);
            if (!c.deployments.count(svc))
                fail("backlog-without-deployment", "cnode ", c.id, " has backlog for undeployed service ", svc);
        }
    }
    return out;
}

}  // namespace cnc
