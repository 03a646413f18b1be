#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cnc/model.hpp"
#include "cnc/scenario.hpp"
#include "cnc/view.hpp"

namespace cnc::fixtures {

inline Link link(std::uint32_t id, std::uint32_t a, std::uint32_t b, double prop = 0.0, double bw = 1e9) {
    return Link{LinkId(id), RouterId(a), RouterId(b), bw, prop};
}

inline ServiceDescriptor service(std::uint32_t id, double in, double out, double work) {
    ServiceDescriptor s;
    s.id = ServiceId(id);
    s.name = "svc" + std::to_string(id);
    s.input_bytes_per_task = in;
    s.output_bytes_per_task = out;
    s.work_wu_per_task = work;
    return s;
}

inline Cnode cnode(std::uint32_t id, std::uint32_t router, TierKind tier, std::map<ServiceId, int> deployments,
                   std::map<ServiceId, double> backlog = {}) {
    return Cnode{CnodeId(id), RouterId(router), tier, std::move(deployments), std::move(backlog)};
}

/// 0-1, 0-2, 1-3, 2-3 with every link 1 Gbps and no propagation delay.
inline Topology diamond() {
    Topology t;
    for (std::uint32_t r = 0; r < 4; ++r) t.routers.emplace_back(r);
    t.links = {link(0, 0, 1), link(1, 0, 2), link(2, 1, 3), link(3, 2, 3)};
    return t;
}

inline RegularizedRequest request(std::uint32_t id, std::uint32_t service, std::uint32_t tasks, double deadline,
                                  std::uint32_t ingress, double submit = 0.0) {
    return RegularizedRequest{RequestId(id), ServiceId(service), deadline, tasks, RouterId(ingress), submit};
}

inline RawRequest raw_request(std::uint32_t id, std::uint32_t service, std::uint32_t tasks, double deadline,
                              std::uint32_t ingress, double submit = 0.0) {
    RawRequest r;
    r.id = RequestId(id);
    r.level = Level::Performance;
    r.service = ServiceId(service);
    r.task_count = tasks;
    r.deadline_s = deadline;
    r.ingress = RouterId(ingress);
    r.submit_time_s = submit;
    return r;
}

/// Scenario with no background load and no CNC traffic, planners reading
/// live state. Suitable for checking predictions against the simulation.
inline Scenario quiet_scenario(Topology t, std::vector<RawRequest> requests) {
    Scenario s;
    s.topology = std::move(t);
    s.requests = std::move(requests);
    s.settings.cnc_enabled = false;
    s.settings.view_mode = ViewMode::Oracle;
    return s;
}

/// Random connected topology with up to `max_routers` routers and up to
/// `max_cnodes` cnodes, one service, random link queues in `view`.
struct RandomCase {
    Topology topology;
    ViewState view;
    RegularizedRequest request;
};

inline RandomCase random_case(std::mt19937_64& rng, std::size_t max_routers = 5, std::size_t max_cnodes = 4) {
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    auto real = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    RandomCase c;
    auto& t = c.topology;
    const auto n = pick(1, max_routers);
    for (std::uint32_t r = 0; r < n; ++r) t.routers.emplace_back(r);
    const double bws[] = {1e8, 2.5e8, 1e9};
    std::set<std::pair<std::uint32_t, std::uint32_t>> used;
    std::uint32_t next_link = 0;
    auto add = [&](std::uint32_t a, std::uint32_t b) {
        if (a == b || used.count({std::min(a, b), std::max(a, b)})) return;
        used.insert({std::min(a, b), std::max(a, b)});
        t.links.push_back(link(next_link++, a, b, real(0.0, 0.005), bws[pick(0, 2)]));
    };
    for (std::uint32_t r = 1; r < n; ++r) add(r, static_cast<std::uint32_t>(pick(0, r - 1)));
    const auto extra = pick(0, n * (n - 1) / 2);
    for (std::size_t e = 0; e < extra; ++e) add(static_cast<std::uint32_t>(pick(0, n - 1)), static_cast<std::uint32_t>(pick(0, n - 1)));

    t.services.push_back(service(0, real(1e5, 2e7), real(1e4, 2e6), real(0.5, 4.0)));
    const auto m = pick(1, max_cnodes);
    for (std::uint32_t i = 0; i < m; ++i) {
        std::map<ServiceId, int> dep;
        std::map<ServiceId, double> backlog;
        if (pick(0, 4) != 0) {
            dep[ServiceId(0)] = static_cast<int>(pick(1, 3));
            if (pick(0, 1)) backlog[ServiceId(0)] = real(0.0, 20.0);
        }
        t.cnodes.push_back(cnode(i, static_cast<std::uint32_t>(pick(0, n - 1)), static_cast<TierKind>(pick(0, 2)), dep, backlog));
    }
    if (pick(0, 1)) {
        const double r1 = real(0.5, 2.0), r2 = r1 + real(0.1, 3.0), r3 = r2 + real(0.1, 4.0);
        const double p1 = real(0.5, 2.0), p2 = p1 + real(0.1, 3.0), p3 = p2 + real(0.1, 9.0);
        t.tiers = TierTable({r1, p1}, {r2, p2}, {r3, p3});
    }

    c.view.queued_bytes.resize(2 * t.links.size());
    for (auto& q : c.view.queued_bytes) q = pick(0, 2) == 0 ? 0.0 : real(0.0, 5e7);
    for (const auto& node : t.cnodes) {
        CnodeStatus s;
        s.deployments = node.deployments;
        s.backlog_wu = node.backlog_wu;
        c.view.cnodes.emplace_back(std::move(s));
    }
    c.request = request(0, 0, static_cast<std::uint32_t>(pick(1, 8)), real(0.2, 40.0),
                        static_cast<std::uint32_t>(pick(0, n - 1)));
    return c;
}

}  // namespace cnc::fixtures
