#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cnc/kernel.hpp"
#include "cnc/regularizer.hpp"
#include "cnc/scenario.hpp"
#include "cnc/state_sync.hpp"
#include "cnc/trading.hpp"

namespace cnc {

/// Responses within this much of the deadline count as on time; it only
/// absorbs floating-point accumulation differences.
inline constexpr double kDeadlineSlackS = 1e-9;

struct RequestRecord {
    RawRequest raw;
    RegularizedRequest request;
    RoutingPlan plan;
    Outcome outcome = Outcome::RejectedInfeasible;
    std::string reject_reason;                 // "deadline" or "no-such-service" for rejected requests
    std::optional<double> finish_time_s;       // merged result back at the ingress
    std::optional<double> response_s;          // finish - submit
    std::optional<ClientResponse> response;
    BillRecord bill;
};

struct RunMetrics {
    std::size_t submitted = 0;
    std::size_t completed = 0;
    std::size_t rejected = 0;
    std::size_t missed = 0;
    double request_bytes = 0.0;     // bytes x hops
    double result_bytes = 0.0;
    double cnc_bytes = 0.0;
    double background_bytes = 0.0;
    std::uint64_t events = 0;
    double end_time_s = 0.0;
    FloodStats flood;
};

struct RunResult {
    std::vector<RequestRecord> requests;  // in submit order
    Ledger ledger;
    RunMetrics metrics;
    std::vector<TraceRecord> trace;
    double initial_backlog_wu = 0.0;
    double completed_work_wu = 0.0;  // drained from all cnode queues
    double admitted_work_wu = 0.0;
};

struct RunOptions {
    bool trace = false;
    /// Called after every processed event.
    std::function<void(const Kernel&)> observer;
};

/// Runs a scenario to completion. Identical scenarios (including rng_seed)
/// produce identical results and traces. Throws Error(InvalidScenario) for a
/// scenario that does not validate and Error(HorizonExceeded) when activity
/// outlasts settings.max_time_s.
RunResult run(const Scenario& scenario, const RunOptions& options = {});

/// All requests of a run: explicit ones followed by the generated workload,
/// sorted by (submit time, id).
std::vector<RawRequest> scenario_requests(const Scenario& scenario);

/// Line-delimited trace: time, event kind, then key=value entity ids.
std::string format_trace(const std::vector<TraceRecord>& trace);

}  // namespace cnc
