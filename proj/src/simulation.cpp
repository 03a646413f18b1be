#include "cnc/simulation.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>

#include "cnc/error.hpp"
#include "cnc/planner.hpp"
#include "cnc/rng.hpp"
#include "cnc/splitter.hpp"
#include "cnc/workload.hpp"

namespace cnc {

std::vector<RawRequest> scenario_requests(const Scenario& scenario) {
    std::vector<RawRequest> all = scenario.requests;
    if (scenario.workload) {
        std::uint32_t next = 0;
        for (const auto& r : all) next = std::max(next, r.id.value + 1);
        auto generated = generate_workload(*scenario.workload, scenario.rng_seed, RequestId(next));
        all.insert(all.end(), generated.begin(), generated.end());
    }
    std::stable_sort(all.begin(), all.end(), [](const RawRequest& x, const RawRequest& y) {
        return x.submit_time_s < y.submit_time_s || (x.submit_time_s == y.submit_time_s && x.id < y.id);
    });
    return all;
}

namespace {

constexpr std::uint64_t kBackgroundStreamBase = 1000;

class Run {
public:
    Run(const Scenario& scenario, const RunOptions& options)
        : scenario_(scenario), options_(options), graph_(scenario.topology), kernel_(graph_),
          sync_(kernel_, scenario.settings.cnc_packet_bytes) {
        kernel_.enable_trace(options.trace);
    }

    RunResult execute() {
        const auto& cfg = scenario_.settings;
        for (const auto& q : scenario_.initial_queues) kernel_.inject(graph_.dlink_from(q.link, q.from), q.bytes);

        for (std::size_t c = 0; c < graph_.cnode_count(); ++c)
            for (const auto& [svc, wu] : graph_.cnode(c).backlog_wu) result_.initial_backlog_wu += wu;

        for (auto& raw : scenario_requests(scenario_)) {
            RequestRecord rec;
            rec.request = regularize(raw, graph_.topology().services, cfg.default_deadline_s);
            rec.raw = std::move(raw);
            result_.requests.push_back(std::move(rec));
        }
        result_.metrics.submitted = result_.requests.size();
        open_ = result_.requests.size();
        mergers_.resize(result_.requests.size());
        executions_.resize(result_.requests.size());

        if (cfg.view_mode == ViewMode::Distributed && cfg.bootstrap_views) sync_.bootstrap();
        if (cfg.cnc_enabled) sync_.start(cfg.cnc_period_s, cfg.sim_until_s, [this] { return open_ > 0; });
        start_background();

        for (std::size_t i = 0; i < result_.requests.size(); ++i) {
            const auto& r = result_.requests[i].raw;
            kernel_.schedule(r.submit_time_s, {EventKind::RequestSubmit, {r.id.value, r.ingress.value, -1}},
                             [this, i] { submit(i); });
        }

        if (options_.observer) {
            while (!kernel_.empty()) {
                if (kernel_.next_time() > cfg.max_time_s) kernel_.run(cfg.max_time_s);  // throws
                kernel_.step();
                options_.observer(kernel_);
            }
        } else {
            kernel_.run(cfg.max_time_s);
        }

        auto& m = result_.metrics;
        m.events = kernel_.events_processed();
        m.end_time_s = kernel_.now();
        m.flood = sync_.stats();
        m.cnc_bytes = static_cast<double>(m.flood.receptions) * cfg.cnc_packet_bytes;
        for (std::size_t c = 0; c < graph_.cnode_count(); ++c) {
            for (const auto& [svc, n] : graph_.cnode(c).deployments) {
                const auto* q = kernel_.service_queue(c, svc);
                result_.admitted_work_wu += q->work_admitted();
                result_.completed_work_wu += q->work_completed(kernel_.now());
            }
        }
        result_.trace = kernel_.trace();
        return std::move(result_);
    }

private:
    bool active_at(double t) const { return open_ > 0 || t <= scenario_.settings.sim_until_s; }

    void start_background() {
        const auto& b = scenario_.background;
        if (!(b.utilization > 0.0)) return;
        for (auto link : b.links) {
            const auto& l = graph_.link_of(2 * graph_.link_index(link));
            for (auto from : {l.a, l.b}) {
                const auto d = graph_.dlink_from(link, from);
                const double rate = b.utilization * l.bandwidth_bps / (8.0 * b.burst_bytes);
                auto rng = std::make_shared<std::mt19937_64>(make_stream(scenario_.rng_seed, kBackgroundStreamBase + d));
                schedule_burst(d, rate, rng, b.start_s + exponential(*rng, rate));
            }
        }
    }

    void schedule_burst(DirLinkIndex d, double rate, std::shared_ptr<std::mt19937_64> rng, double at) {
        const auto& b = scenario_.background;
        if (b.end_s ? at >= *b.end_s : !active_at(at)) return;
        const auto& l = graph_.link_of(d);
        const auto from = graph_.router_id(graph_.dlink_tail(d));
        kernel_.schedule(at, {EventKind::BackgroundBurst, {l.id.value, from.value, -1}}, [this, d, rate, rng] {
            kernel_.inject(d, scenario_.background.burst_bytes);
            result_.metrics.background_bytes += scenario_.background.burst_bytes;
            schedule_burst(d, rate, rng, kernel_.now() + exponential(*rng, rate));
        });
    }

    ViewState planning_view(RouterId ingress) const {
        if (scenario_.settings.view_mode == ViewMode::Oracle) return kernel_.snapshot();
        return sync_.view(ingress).materialize(graph_);
    }

    void submit(std::size_t i) {
        auto& rec = result_.requests[i];
        const auto& cfg = scenario_.settings;
        try {
            rec.plan = plan_with(cfg.scheme, graph_, planning_view(rec.request.ingress), rec.request,
                                 PlannerConfig{cfg.split_k});
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoSuchService) throw;
            rec.plan = RoutingPlan{};
            rec.reject_reason = "no-such-service";
            reject(i);
            return;
        }
        if (!rec.plan.feasible()) {
            rec.reject_reason = "deadline";
            reject(i);
            return;
        }

        const auto& svc = graph_.service(rec.request.service);
        mergers_[i] = std::make_unique<Merger>(rec.request.task_count);
        executions_[i].request = rec.request.id;
        for (const auto& a : rec.plan.assignments)
            executions_[i].assignments.push_back({a.schedule.cnode, graph_.cnode(graph_.cnode_index(a.schedule.cnode)).tier, 0.0});

        for (auto& tp : split(rec.request, svc, rec.plan)) {
            Packet p;
            p.kind = PacketKind::Request;
            p.size_bytes = tp.size_bytes;
            p.path = tp.path.empty() ? Path{rec.request.ingress} : tp.path;
            p.context = rec.request.id.value;
            result_.metrics.request_bytes += p.size_bytes * static_cast<double>(p.path.size() - 1);
            const auto a = tp.assignment;
            kernel_.transmit(std::move(p), rec.request.ingress, [this, i, a](const Packet&) { arrive(i, a); });
        }
    }

    void arrive(std::size_t i, std::size_t a) {
        const auto& rec = result_.requests[i];
        const auto& asg = rec.plan.assignments[a];
        const auto& svc = graph_.service(rec.request.service);
        const double work = asg.tasks.size() * svc.work_wu_per_task;
        const auto c = graph_.cnode_index(asg.schedule.cnode);
        kernel_.execute(c, svc.id, work, rec.request.id.value, [this, i, a, work] { executed(i, a, work); });
    }

    void executed(std::size_t i, std::size_t a, double work) {
        const auto& rec = result_.requests[i];
        const auto& asg = rec.plan.assignments[a];
        executions_[i].assignments[a].executed_wu = work;
        const auto& svc = graph_.service(rec.request.service);
        const auto attach = graph_.router_id(graph_.cnode_router(graph_.cnode_index(asg.schedule.cnode)));
        Packet p;
        p.kind = PacketKind::Result;
        p.size_bytes = asg.tasks.size() * svc.output_bytes_per_task;
        p.path = asg.schedule.return_path.empty() ? Path{attach} : asg.schedule.return_path;
        p.context = rec.request.id.value;
        result_.metrics.result_bytes += p.size_bytes * static_cast<double>(p.path.size() - 1);
        kernel_.transmit(std::move(p), attach, [this, i, a](const Packet&) { returned(i, a); });
    }

    void returned(std::size_t i, std::size_t a) {
        auto& rec = result_.requests[i];
        const auto& svc = graph_.service(rec.request.service);
        auto& merger = *mergers_[i];
        merger.add(make_fragment(rec.plan.assignments[a].tasks, svc));
        if (!merger.complete()) return;

        const double now = kernel_.now();
        rec.finish_time_s = now;
        rec.response_s = now - rec.raw.submit_time_s;
        rec.response = restore(merger.finalize(now), rec.raw);
        const bool on_time = *rec.response_s <= rec.request.deadline_s + kDeadlineSlackS;
        rec.outcome = on_time ? Outcome::Completed : Outcome::DeadlineMissed;
        executions_[i].outcome = rec.outcome;
        finish(i);
        ++(on_time ? result_.metrics.completed : result_.metrics.missed);
    }

    void reject(std::size_t i) {
        auto& rec = result_.requests[i];
        rec.outcome = Outcome::RejectedInfeasible;
        executions_[i].request = rec.request.id;
        executions_[i].outcome = Outcome::RejectedInfeasible;
        finish(i);
        ++result_.metrics.rejected;
    }

    void finish(std::size_t i) {
        auto& rec = result_.requests[i];
        rec.bill = price(meter(executions_[i]), graph_.tiers());
        result_.ledger.append(rec.bill);
        mergers_[i].reset();
        --open_;
    }

    const Scenario& scenario_;
    const RunOptions& options_;
    Graph graph_;
    Kernel kernel_;
    CncDissemination sync_;
    RunResult result_;
    std::size_t open_ = 0;
    std::vector<std::unique_ptr<Merger>> mergers_;
    std::vector<ExecutionRecord> executions_;
};

}  // namespace

RunResult run(const Scenario& scenario, const RunOptions& options) {
    if (auto diags = validate_scenario(scenario); !diags.empty()) {
        std::string msg;
        for (const auto& d : diags) msg += (msg.empty() ? "" : "; ") + d.code + ": " + d.message;
        throw Error(ErrorCode::InvalidScenario, msg);
    }
    Run r(scenario, options);
    return r.execute();
}

std::string format_trace(const std::vector<TraceRecord>& trace) {
    static const char* const kPacketTypes[] = {"cnc", "request", "result"};
    std::string out;
    char buf[160];
    for (const auto& rec : trace) {
        const auto& ids = rec.tag.ids;
        int n = 0;
        switch (rec.tag.kind) {
            case EventKind::PacketArrival:
                n = std::snprintf(buf, sizeof buf, "%.9f\tPacketArrival\tpacket=%lld\trouter=%lld\ttype=%s\n",
                                  rec.time_s, static_cast<long long>(ids[0]), static_cast<long long>(ids[1]),
                                  kPacketTypes[std::clamp<std::int64_t>(ids[2], 0, 2)]);
                break;
            case EventKind::ExecutionComplete:
                n = std::snprintf(buf, sizeof buf, "%.9f\tExecutionComplete\tcnode=%lld\tservice=%lld\trequest=%lld\n",
                                  rec.time_s, static_cast<long long>(ids[0]), static_cast<long long>(ids[1]),
                                  static_cast<long long>(ids[2]));
                break;
            case EventKind::CncBroadcastTick:
                n = std::snprintf(buf, sizeof buf, "%.9f\tCncBroadcastTick\ttick=%lld\n", rec.time_s,
                                  static_cast<long long>(ids[0]));
                break;
            case EventKind::RequestSubmit:
                n = std::snprintf(buf, sizeof buf, "%.9f\tRequestSubmit\trequest=%lld\tingress=%lld\n", rec.time_s,
                                  static_cast<long long>(ids[0]), static_cast<long long>(ids[1]));
                break;
            case EventKind::BackgroundBurst:
                n = std::snprintf(buf, sizeof buf, "%.9f\tBackgroundBurst\tlink=%lld\tfrom=%lld\n", rec.time_s,
                                  static_cast<long long>(ids[0]), static_cast<long long>(ids[1]));
                break;
        }
        out.append(buf, static_cast<std::size_t>(n));
    }
    return out;
}

}  // namespace cnc
