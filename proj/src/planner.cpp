#include "cnc/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <sstream>
#include <tuple>

#include "cnc/error.hpp"
#include "cnc/kernel.hpp"

namespace cnc {

std::string_view to_string(Scheme scheme) {
    return scheme == Scheme::Cnc ? "cnc" : "computing_first";
}

std::optional<Scheme> parse_scheme(std::string_view text) {
    if (text == "cnc") return Scheme::Cnc;
    if (text == "computing_first") return Scheme::ComputingFirst;
    return std::nullopt;
}

ExecutionEstimate estimate_execution(const Graph& graph, const ViewState& view, CnodeId cnode, ServiceId service,
                                     double work_wu) {
    const auto c = graph.cnode_index(cnode);
    if (c >= view.cnodes.size() || !view.cnodes[c]) {
        std::ostringstream os;
        os << "view has no report for cnode " << cnode;
        throw Error(ErrorCode::UnknownCnode, os.str());
    }
    const auto& status = *view.cnodes[c];
    auto dep = status.deployments.find(service);
    if (dep == status.deployments.end() || dep->second < 1) {
        std::ostringstream os;
        os << "service " << service << " is not deployed on cnode " << cnode;
        throw Error(ErrorCode::ServiceNotDeployed, os.str());
    }
    const double rate = graph.tiers()[graph.cnode(c).tier].rate_wups * dep->second;
    auto b = status.backlog_wu.find(service);
    const double backlog = b == status.backlog_wu.end() ? 0.0 : b->second;
    return {backlog / rate, work_wu / rate};
}

double estimate_path(const Graph& graph, const ViewState& view, const Path& path, double payload_bytes) {
    double total = 0.0;
    for (auto d : graph.hops_of(path)) total += link_transfer_time(payload_bytes, graph.link_of(d), view.queued_bytes[d]);
    return total;
}

double estimate_path_idle(const Graph& graph, const Path& path, double payload_bytes) {
    double total = 0.0;
    for (auto d : graph.hops_of(path)) total += link_transfer_time(payload_bytes, graph.link_of(d), 0.0);
    return total;
}

namespace {

/// Label-setting search over (cost, hops, router sequence). Router indices
/// follow id order, so comparing index sequences compares id sequences.
struct Label {
    double cost = 0.0;
    std::uint32_t hops = 0;
    std::vector<std::size_t> path;

    bool operator<(const Label& o) const {
        if (cost != o.cost) return cost < o.cost;
        if (hops != o.hops) return hops < o.hops;
        return path < o.path;
    }
};

template <class Weight>
std::vector<std::optional<Label>> search_from(const Graph& graph, std::size_t src, Weight weight) {
    const auto n = graph.router_count();
    std::vector<std::optional<Label>> best(n);
    std::vector<bool> settled(n, false);
    best[src] = Label{0.0, 0, {src}};
    for (;;) {
        std::optional<std::size_t> u;
        for (std::size_t v = 0; v < n; ++v) {
            if (settled[v] || !best[v]) continue;
            if (!u || *best[v] < *best[*u]) u = v;
        }
        if (!u) break;
        settled[*u] = true;
        for (const auto& arc : graph.arcs(*u)) {
            if (settled[arc.to]) continue;
            Label next{best[*u]->cost + weight(arc.dlink), best[*u]->hops + 1, best[*u]->path};
            next.path.push_back(arc.to);
            if (!best[arc.to] || next < *best[arc.to]) best[arc.to] = std::move(next);
        }
    }
    return best;
}

Path to_path(const Graph& graph, const Label& label) {
    if (label.path.size() < 2) return {};
    Path p;
    p.reserve(label.path.size());
    for (auto r : label.path) p.push_back(graph.router_id(r));
    return p;
}

[[noreturn]] void unreachable(RouterId src, RouterId dst) {
    std::ostringstream os;
    os << "router " << dst << " is unreachable from router " << src;
    throw Error(ErrorCode::Unreachable, os.str());
}

/// Route and transmission estimate policy of a scheme, with per-(source,
/// payload) caching of search trees.
class PathModel {
public:
    PathModel(Scheme scheme, const Graph& graph, const ViewState& view)
        : scheme_(scheme), graph_(graph), view_(view) {}

    std::optional<Path> route(std::size_t src, std::size_t dst, double payload_bytes) {
        const auto& tree = tree_for(src, payload_bytes);
        if (!tree[dst]) return std::nullopt;
        return to_path(graph_, *tree[dst]);
    }

    /// One hop under the scheme's queue model.
    double hop_time(DirLinkIndex d, double payload_bytes) const {
        return link_transfer_time(payload_bytes, graph_.link_of(d), scheme_ == Scheme::Cnc ? view_.queued_bytes[d] : 0.0);
    }

    double estimate(const Path& path, double payload_bytes) const {
        return scheme_ == Scheme::Cnc ? estimate_path(graph_, view_, path, payload_bytes)
                                      : estimate_path_idle(graph_, path, payload_bytes);
    }

private:
    const std::vector<std::optional<Label>>& tree_for(std::size_t src, double payload_bytes) {
        // Computing-first trees don't depend on the payload.
        const double key_bytes = scheme_ == Scheme::Cnc ? payload_bytes : 0.0;
        auto key = std::make_pair(src, key_bytes);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        std::vector<std::optional<Label>> tree;
        if (scheme_ == Scheme::Cnc) {
            tree = search_from(graph_, src, [&](DirLinkIndex d) {
                return link_transfer_time(payload_bytes, graph_.link_of(d), view_.queued_bytes[d]);
            });
        } else {
            tree = search_from(graph_, src, [](DirLinkIndex) { return 1.0; });
        }
        return cache_.emplace(key, std::move(tree)).first->second;
    }

    Scheme scheme_;
    const Graph& graph_;
    const ViewState& view_;
    std::map<std::pair<std::size_t, double>, std::vector<std::optional<Label>>> cache_;
};

struct Host {
    std::size_t index;  // cnode index
    CnodeId id;
    double price;
    double rate;  // effective
};

std::optional<CandidateSchedule> schedule_on(PathModel& paths, const Graph& graph, const ViewState& view,
                                             const ServiceDescriptor& svc, std::size_t ingress, const Host& host,
                                             std::uint32_t tasks) {
    const auto attach = graph.cnode_router(host.index);
    const double in_bytes = tasks * svc.input_bytes_per_task;
    const double out_bytes = tasks * svc.output_bytes_per_task;
    const double work = tasks * svc.work_wu_per_task;
    auto fwd = paths.route(ingress, attach, in_bytes);
    auto ret = paths.route(attach, ingress, out_bytes);
    if (!fwd || !ret) return std::nullopt;
    const auto exec = estimate_execution(graph, view, host.id, svc.id, work);
    CandidateSchedule s;
    s.cnode = host.id;
    s.predicted_fwd_s = paths.estimate(*fwd, in_bytes);
    s.predicted_ret_s = paths.estimate(*ret, out_bytes);
    s.predicted_wait_s = exec.wait_s;
    s.predicted_exec_s = exec.exec_s;
    s.cost = work * host.price;
    s.forward_path = std::move(*fwd);
    s.return_path = std::move(*ret);
    return s;
}

/// Split parts leave the ingress together and may share links. Replays the
/// plan's own packets in event order, each hop costing its estimate plus the
/// wait behind earlier parts still serializing on the same link, and rewrites
/// the forward and return estimates of every part. Parts that share nothing
/// keep their plain estimates.
void add_self_contention(const PathModel& paths, const Graph& graph, const ServiceDescriptor& svc,
                         std::vector<Assignment>& parts) {
    struct Leg {
        std::vector<DirLinkIndex> hops;
        double bytes = 0.0;
    };
    struct Ev {
        double t;
        std::uint64_t seq;
        std::size_t part;
        int stage;  // 0 forward hop done, 1 execution done, 2 return hop done
        std::size_t hop;
        bool operator>(const Ev& o) const { return std::tie(t, seq) > std::tie(o.t, o.seq); }
    };
    std::vector<Leg> fwd, ret;
    for (const auto& a : parts) {
        fwd.push_back({graph.hops_of(a.schedule.forward_path), a.tasks.size() * svc.input_bytes_per_task});
        ret.push_back({graph.hops_of(a.schedule.return_path), a.tasks.size() * svc.output_bytes_per_task});
    }
    std::vector<double> busy(graph.dlink_count(), 0.0);
    std::vector<double> done(parts.size(), 0.0);
    std::priority_queue<Ev, std::vector<Ev>, std::greater<>> events;
    std::uint64_t seq = 0;
    auto enter = [&](const Leg& leg, std::size_t part, int stage, std::size_t hop, double t) {
        if (leg.hops.empty()) {
            events.push({t, seq++, part, stage, 0});
            return;
        }
        const auto d = leg.hops[hop];
        const double ser = leg.bytes * 8.0 / graph.link_of(d).bandwidth_bps;
        const double wait = std::max(0.0, busy[d] - t);
        busy[d] = std::max(t, busy[d]) + ser;
        events.push({t + (paths.hop_time(d, leg.bytes) + wait), seq++, part, stage, hop});
    };
    for (std::size_t i = 0; i < parts.size(); ++i) enter(fwd[i], i, 0, 0, 0.0);
    while (!events.empty()) {
        const Ev ev = events.top();
        events.pop();
        auto& s = parts[ev.part].schedule;
        const auto& leg = ev.stage == 0 ? fwd[ev.part] : ret[ev.part];
        if (ev.stage != 1 && ev.hop + 1 < leg.hops.size()) {
            enter(leg, ev.part, ev.stage, ev.hop + 1, ev.t);
        } else if (ev.stage == 0) {
            s.predicted_fwd_s = ev.t;
            events.push({ev.t + (s.predicted_wait_s + s.predicted_exec_s), seq++, ev.part, 1, 0});
        } else if (ev.stage == 1) {
            done[ev.part] = ev.t;
            enter(ret[ev.part], ev.part, 2, 0, ev.t);
        } else {
            s.predicted_ret_s = ev.t - done[ev.part];
        }
    }
}

RoutingPlan make_option(std::vector<Assignment> assignments) {
    RoutingPlan p;
    p.predicted_response_s = 0.0;
    p.predicted_cost = 0.0;
    for (const auto& a : assignments) {
        p.predicted_response_s = std::max(p.predicted_response_s, a.schedule.predicted_response_s());
        p.predicted_cost += a.schedule.cost;
    }
    p.assignments = std::move(assignments);
    return p;
}

bool better(const RoutingPlan& x, const RoutingPlan& y) {
    auto ids = [](const RoutingPlan& p) {
        std::vector<CnodeId> v;
        for (const auto& a : p.assignments) v.push_back(a.schedule.cnode);
        return v;
    };
    // Costs that differ only by summation order count as equal.
    const double scale = std::max({1.0, std::abs(x.predicted_cost), std::abs(y.predicted_cost)});
    if (std::abs(x.predicted_cost - y.predicted_cost) > kCostTieRel * scale) return x.predicted_cost < y.predicted_cost;
    return std::tuple(x.predicted_response_s, x.assignments.size(), ids(x)) <
           std::tuple(y.predicted_response_s, y.assignments.size(), ids(y));
}

RoutingPlan plan_impl(Scheme scheme, const Graph& graph, const ViewState& view, const RegularizedRequest& request,
                      const PlannerConfig& config) {
    const auto& svc = graph.service(request.service);
    const auto ingress = graph.router_index(request.ingress);

    std::vector<Host> hosts;
    for (std::size_t c = 0; c < graph.cnode_count(); ++c) {
        if (c >= view.cnodes.size() || !view.cnodes[c]) continue;
        auto dep = view.cnodes[c]->deployments.find(svc.id);
        if (dep == view.cnodes[c]->deployments.end() || dep->second < 1) continue;
        const auto& tier = graph.tiers()[graph.cnode(c).tier];
        hosts.push_back({c, graph.cnode(c).id, tier.price_per_wu, tier.rate_wups * dep->second});
    }
    if (hosts.empty()) {
        std::ostringstream os;
        os << "no known cnode hosts service " << svc.id;
        throw Error(ErrorCode::NoSuchService, os.str());
    }

    PathModel paths(scheme, graph, view);
    std::optional<RoutingPlan> best;
    double fastest = std::numeric_limits<double>::infinity();
    auto consider = [&](RoutingPlan option) {
        fastest = std::min(fastest, option.predicted_response_s);
        if (!(option.predicted_response_s <= request.deadline_s)) return;
        option.verdict = Verdict::Feasible;
        if (!best || better(option, *best)) best = std::move(option);
    };

    const TaskRange all{0, request.task_count};
    for (const auto& h : hosts) {
        auto s = schedule_on(paths, graph, view, svc, ingress, h, request.task_count);
        if (s) consider(make_option({Assignment{all, std::move(*s)}}));
    }

    std::vector<Host> cheapest = hosts;
    std::stable_sort(cheapest.begin(), cheapest.end(), [](const Host& x, const Host& y) {
        return std::tie(x.price, x.id) < std::tie(y.price, y.id);
    });
    const auto kmax = std::min(config.split_k, cheapest.size());
    for (std::size_t k = 2; k <= kmax; ++k) {
        std::vector<double> weights;
        for (std::size_t i = 0; i < k; ++i) weights.push_back(cheapest[i].rate);
        const auto shares = apportion(request.task_count, weights);
        std::vector<Assignment> parts;
        std::uint32_t next = 0;
        bool ok = true;
        for (std::size_t i = 0; i < k && ok; ++i) {
            if (shares[i] == 0) continue;
            auto s = schedule_on(paths, graph, view, svc, ingress, cheapest[i], shares[i]);
            if (!s) {
                ok = false;
                break;
            }
            parts.push_back({TaskRange{next, next + shares[i]}, std::move(*s)});
            next += shares[i];
        }
        if (ok && parts.size() >= 2) {
            add_self_contention(paths, graph, svc, parts);
            consider(make_option(std::move(parts)));
        }
    }

    if (best) return *best;
    RoutingPlan infeasible;
    infeasible.verdict = Verdict::Infeasible;
    infeasible.predicted_cost = 0.0;
    infeasible.predicted_response_s = fastest;
    return infeasible;
}

}  // namespace

Path shortest_latency_path(const Graph& graph, const ViewState& view, RouterId src, RouterId dst,
                           double payload_bytes) {
    const auto s = graph.router_index(src);
    const auto d = graph.router_index(dst);
    if (s == d) return {};
    auto tree = search_from(graph, s, [&](DirLinkIndex l) {
        return link_transfer_time(payload_bytes, graph.link_of(l), view.queued_bytes[l]);
    });
    if (!tree[d]) unreachable(src, dst);
    return to_path(graph, *tree[d]);
}

Path min_hop_path(const Graph& graph, RouterId src, RouterId dst) {
    const auto s = graph.router_index(src);
    const auto d = graph.router_index(dst);
    if (s == d) return {};
    auto tree = search_from(graph, s, [](DirLinkIndex) { return 1.0; });
    if (!tree[d]) unreachable(src, dst);
    return to_path(graph, *tree[d]);
}

std::vector<std::uint32_t> apportion(std::uint32_t tasks, std::span<const double> weights) {
    std::vector<std::uint32_t> out(weights.size(), 0);
    if (weights.empty()) return out;
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::uint32_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double exact = tasks * weights[i] / total;
        out[i] = static_cast<std::uint32_t>(std::floor(exact));
        assigned += out[i];
        remainders.emplace_back(exact - out[i], i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    for (std::size_t j = 0; assigned < tasks; ++j, ++assigned) ++out[remainders[j % remainders.size()].second];
    return out;
}

RoutingPlan plan(const Graph& graph, const ViewState& view, const RegularizedRequest& request,
                 const PlannerConfig& config) {
    return plan_impl(Scheme::Cnc, graph, view, request, config);
}

RoutingPlan plan_computing_first(const Graph& graph, const ViewState& view, const RegularizedRequest& request,
                                 const PlannerConfig& config) {
    return plan_impl(Scheme::ComputingFirst, graph, view, request, config);
}

RoutingPlan plan_with(Scheme scheme, const Graph& graph, const ViewState& view, const RegularizedRequest& request,
                      const PlannerConfig& config) {
    return plan_impl(scheme, graph, view, request, config);
}

}  // namespace cnc
