#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "cnc/error.hpp"
#include "cnc/simulation.hpp"
#include "fixtures.hpp"

using namespace cnc;
namespace fx = cnc::fixtures;

namespace {

Topology two_tier() {
    auto t = fx::diamond();
    t.services = {fx::service(0, 8e6, 1e5, 2)};
    t.cnodes = {fx::cnode(0, 3, TierKind::Weak, {{ServiceId(0), 1}}),
                fx::cnode(1, 3, TierKind::Strong, {{ServiceId(0), 1}})};
    return t;
}

/// One request on an idle random network: no background, no initial queues
/// or backlog, planners reading live state.
Scenario idle_single(std::mt19937_64& rng) {
    for (;;) {
        auto c = fx::random_case(rng);
        for (auto& n : c.topology.cnodes) n.backlog_wu.clear();
        bool hosted = false;
        for (auto& n : c.topology.cnodes) hosted |= !n.deployments.empty();
        if (!hosted) continue;
        auto raw = fx::raw_request(0, 0, c.request.task_count, c.request.deadline_s, c.request.ingress.value,
                                   std::uniform_real_distribution<double>(0.0, 5.0)(rng));
        return fx::quiet_scenario(c.topology, {raw});
    }
}

}  // namespace

TEST_CASE("a single request completes when predicted") {
    auto s = fx::quiet_scenario(two_tier(), {fx::raw_request(0, 0, 1, 10, 0, 1.5)});
    auto r = run(s);
    REQUIRE(r.requests.size() == 1);
    const auto& rec = r.requests[0];
    CHECK(rec.outcome == Outcome::Completed);
    REQUIRE(rec.response_s);
    CHECK(std::abs(*rec.response_s - rec.plan.predicted_response_s) <= 1e-9);
    CHECK(*rec.response_s == doctest::Approx(2.1296));
    CHECK(*rec.finish_time_s == doctest::Approx(1.5 + 2.1296));
    CHECK(rec.bill.cost == 2.0);
    CHECK(rec.bill.metered_wu == 2.0);
    REQUIRE(rec.response);
    CHECK(rec.response->payload.size() == 1);
    CHECK(r.metrics.completed == 1);
    CHECK(r.metrics.request_bytes == 2 * 8e6);
    CHECK(r.metrics.result_bytes == 2 * 1e5);
}

TEST_CASE("split requests complete when predicted") {
    for (std::uint32_t tasks : {4u, 5u}) {
        auto s = fx::quiet_scenario(two_tier(), {fx::raw_request(0, 0, tasks, 3.0, 0)});
        auto r = run(s);
        const auto& rec = r.requests[0];
        REQUIRE(rec.plan.assignments.size() == 2);
        REQUIRE(rec.outcome == Outcome::Completed);
        CHECK(std::abs(*rec.response_s - rec.plan.predicted_response_s) <= 1e-9);
        CHECK(rec.bill.cost == rec.plan.predicted_cost);
        REQUIRE(rec.response);
        for (std::uint32_t i = 0; i < tasks; ++i) CHECK(rec.response->payload[i].task_index == i);
    }
}

TEST_CASE("predictions hold on idle random networks") {
    std::mt19937_64 rng(31);
    int completed = 0;
    for (int round = 0; round < 200; ++round) {
        auto s = idle_single(rng);
        auto r = run(s);
        const auto& rec = r.requests[0];
        if (rec.outcome == Outcome::RejectedInfeasible) continue;
        CHECK(rec.outcome == Outcome::Completed);
        CHECK(std::abs(*rec.response_s - rec.plan.predicted_response_s) <= 1e-9);
        ++completed;
    }
    CHECK(completed > 50);
}

TEST_CASE("rejected requests bill nothing") {
    auto t = two_tier();
    t.services.push_back(fx::service(1, 1, 1, 1));
    auto s = fx::quiet_scenario(t, {fx::raw_request(0, 0, 1, 0.5, 0), fx::raw_request(1, 1, 1, 10, 0)});
    auto r = run(s);
    CHECK(r.metrics.rejected == 2);
    for (const auto& rec : r.requests) {
        CHECK(rec.outcome == Outcome::RejectedInfeasible);
        CHECK(rec.bill.cost == 0.0);
        CHECK(rec.bill.metered_wu == 0.0);
        CHECK_FALSE(rec.response_s);
    }
    CHECK(r.requests[0].reject_reason == "deadline");
    CHECK(r.requests[1].reject_reason == "no-such-service");
    CHECK(r.ledger.total_cost() == 0.0);
}

TEST_CASE("stale views can miss deadlines and those requests are billed") {
    // Views are built once at start and never refreshed, so the second
    // request is planned as if the weak node were idle.
    auto t = two_tier();
    t.cnodes.pop_back();
    Scenario s = fx::quiet_scenario(t, {fx::raw_request(0, 0, 1, 2.2, 0, 0.0), fx::raw_request(1, 0, 1, 2.2, 0, 0.5)});
    s.settings.view_mode = ViewMode::Distributed;
    auto r = run(s);
    CHECK(r.requests[0].outcome == Outcome::Completed);
    CHECK(r.requests[1].outcome == Outcome::DeadlineMissed);
    CHECK(r.requests[1].bill.cost == 2.0);
    CHECK(r.metrics.missed == 1);
    CHECK(r.ledger.total_cost() == 4.0);
    CHECK(r.ledger.successful_cost() == 2.0);

    // With live state the second request is rejected instead.
    s.settings.view_mode = ViewMode::Oracle;
    auto live = run(s);
    CHECK(live.requests[1].outcome == Outcome::RejectedInfeasible);
    CHECK(live.requests[1].bill.cost == 0.0);
}

TEST_CASE("resource and function requests run through regularization") {
    auto t = two_tier();
    t.services[0].resource_class = ResourceSpec{4, 0, 8};
    RawRequest res;
    res.id = RequestId(0);
    res.level = Level::Resource;
    res.resources = ResourceSpec{2, 0, 2};
    res.usage_duration_s = 30.0;
    res.task_count = 2;
    res.ingress = RouterId(1);
    RawRequest fn = res;
    fn.id = RequestId(1);
    fn.level = Level::Function;
    fn.resources.reset();
    fn.usage_duration_s.reset();
    fn.service = ServiceId(0);
    auto r = run(fx::quiet_scenario(t, {res, fn}));
    CHECK(r.requests[0].request.deadline_s == 30.0);
    CHECK(r.requests[1].request.deadline_s == 86400.0);
    for (const auto& rec : r.requests) CHECK(rec.outcome == Outcome::Completed);
    REQUIRE(r.requests[0].response);
    CHECK(r.requests[0].response->resources == res.resources);
}

TEST_CASE("runs are deterministic") {
    auto s = load_scenario(CNC_SOURCE_DIR "/scenarios/canonical.json");
    s.workload->end_s = 60.0;
    auto a = run(s, {true, {}});
    auto b = run(s, {true, {}});
    CHECK(format_trace(a.trace) == format_trace(b.trace));
    CHECK(a.ledger.bills() == b.ledger.bills());
    CHECK(a.metrics.events == b.metrics.events);
    CHECK_FALSE(a.trace.empty());
    s.rng_seed = 2;
    auto c = run(s, {true, {}});
    CHECK(format_trace(a.trace) != format_trace(c.trace));
}

TEST_CASE("conservation laws hold throughout a congested run") {
    auto s = load_scenario(CNC_SOURCE_DIR "/scenarios/canonical.json");
    s.workload->end_s = 30.0;
    s.topology.cnodes[0].backlog_wu[ServiceId(0)] = 5.0;
    std::size_t checks = 0;
    bool ok = true;
    auto observer = [&](const Kernel& k) {
        const auto& g = k.graph();
        for (DirLinkIndex d = 0; d < g.dlink_count(); ++d) {
            const auto& q = k.link_queue(d);
            const double lhs = q.bytes_enqueued();
            const double rhs = q.bytes_serialized(k.now()) + k.queued_bytes(d);
            ok &= std::abs(lhs - rhs) <= 1e-6 * std::max(1.0, lhs);
            ok &= k.queued_bytes(d) >= 0.0;
        }
        for (std::size_t c = 0; c < g.cnode_count(); ++c) {
            for (const auto& [svc, n] : g.cnode(c).deployments) {
                const auto* q = k.service_queue(c, svc);
                ok &= std::abs(q->work_admitted() - q->work_completed(k.now()) - q->backlog(k.now())) <= 1e-9;
                ok &= q->backlog(k.now()) >= 0.0;
            }
        }
        ++checks;
    };
    auto r = run(s, {false, observer});
    CHECK(ok);
    CHECK(checks == r.metrics.events);
    CHECK(r.completed_work_wu == doctest::Approx(r.admitted_work_wu));
    CHECK(r.initial_backlog_wu == 5.0);
    // Metered work is exactly the work admitted for requests.
    CHECK(r.ledger.total_metered_wu() == doctest::Approx(r.admitted_work_wu - r.initial_backlog_wu));
    std::size_t outcomes = r.metrics.completed + r.metrics.rejected + r.metrics.missed;
    CHECK(outcomes == r.metrics.submitted);
    for (const auto& rec : r.requests) {
        if (rec.plan.feasible()) CHECK(rec.plan.predicted_response_s <= rec.request.deadline_s);
        if (rec.outcome == Outcome::RejectedInfeasible) CHECK(rec.bill.cost == 0.0);
    }
}

TEST_CASE("run errors") {
    auto s = fx::quiet_scenario(two_tier(), {fx::raw_request(0, 0, 1, 10, 0, 5.0)});
    s.settings.max_time_s = 1.0;
    try {
        run(s);
        FAIL("expected HorizonExceeded");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::HorizonExceeded);
    }
    auto bad = fx::quiet_scenario(two_tier(), {fx::raw_request(0, 0, 1, 10, 9)});
    try {
        run(bad);
        FAIL("expected InvalidScenario");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidScenario);
    }
}

TEST_CASE("an empty scenario finishes at time zero") {
    auto r = run(fx::quiet_scenario(two_tier(), {}));
    CHECK(r.metrics.submitted == 0);
    CHECK(r.metrics.events == 0);
    CHECK(r.ledger.bills().empty());
}

TEST_CASE("scenario_requests merges explicit and generated requests") {
    auto s = fx::quiet_scenario(two_tier(), {fx::raw_request(4, 0, 1, 10, 0, 3.0)});
    WorkloadSpec w;
    w.rate_per_s = 2.0;
    w.end_s = 10.0;
    w.service = ServiceId(0);
    w.ingress = {RouterId(0)};
    w.deadline_s = 5.0;
    s.workload = w;
    auto all = scenario_requests(s);
    REQUIRE(all.size() > 2);
    for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].submit_time_s <= all[i].submit_time_s);
    std::set<std::uint32_t> ids;
    for (const auto& r : all) {
        ids.insert(r.id.value);
        if (r.id.value != 4) CHECK(r.id.value >= 5);
    }
    CHECK(ids.size() == all.size());
}
