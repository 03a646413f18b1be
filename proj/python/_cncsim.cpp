#include <optional>
#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cnc/error.hpp"
#include "cnc/harness.hpp"
#include "cnc/planner.hpp"
#include "cnc/scenario.hpp"
#include "cnc/simulation.hpp"

namespace py = pybind11;

namespace {

cnc::Scenario scenario_with(const std::string& text, const std::optional<std::string>& scheme,
                            const std::optional<std::uint64_t>& seed) {
    auto s = cnc::parse_scenario(text);
    if (scheme) {
        auto parsed = cnc::parse_scheme(*scheme);
        if (!parsed) throw cnc::Error(cnc::ErrorCode::InvalidScenario, "unknown scheme '" + *scheme + "'");
        s.settings.scheme = *parsed;
    }
    if (seed) s.rng_seed = *seed;
    return s;
}

py::list path_list(const cnc::Path& p) {
    py::list out;
    for (auto r : p) out.append(r.value);
    return out;
}

py::dict plan_dict(const cnc::RoutingPlan& plan) {
    py::dict d;
    d["feasible"] = plan.feasible();
    d["cost"] = plan.predicted_cost;
    d["predicted_response_s"] = plan.predicted_response_s;
    py::list parts;
    for (const auto& a : plan.assignments) {
        py::dict p;
        p["cnode"] = a.schedule.cnode.value;
        p["tasks"] = py::make_tuple(a.tasks.begin, a.tasks.end);
        p["forward_path"] = path_list(a.schedule.forward_path);
        p["return_path"] = path_list(a.schedule.return_path);
        p["fwd_s"] = a.schedule.predicted_fwd_s;
        p["wait_s"] = a.schedule.predicted_wait_s;
        p["exec_s"] = a.schedule.predicted_exec_s;
        p["ret_s"] = a.schedule.predicted_ret_s;
        p["cost"] = a.schedule.cost;
        parts.append(p);
    }
    d["assignments"] = parts;
    return d;
}

py::dict run_scenario(const std::string& text, std::optional<std::string> scheme, std::optional<std::uint64_t> seed,
                      bool trace) {
    const auto s = scenario_with(text, scheme, seed);
    cnc::RunResult r;
    {
        py::gil_scoped_release release;
        r = cnc::run(s, {trace, {}});
    }
    const auto& m = r.metrics;
    py::dict metrics;
    metrics["submitted"] = m.submitted;
    metrics["completed"] = m.completed;
    metrics["rejected"] = m.rejected;
    metrics["missed"] = m.missed;
    metrics["request_bytes"] = m.request_bytes;
    metrics["result_bytes"] = m.result_bytes;
    metrics["cnc_bytes"] = m.cnc_bytes;
    metrics["background_bytes"] = m.background_bytes;
    metrics["events"] = m.events;
    metrics["end_time_s"] = m.end_time_s;
    metrics["total_cost"] = r.ledger.total_cost();
    metrics["successful_cost"] = r.ledger.successful_cost();

    py::list requests;
    for (const auto& rec : r.requests) {
        py::dict d;
        d["id"] = rec.request.id.value;
        d["submit_s"] = rec.raw.submit_time_s;
        d["deadline_s"] = rec.request.deadline_s;
        d["tasks"] = rec.request.task_count;
        d["ingress"] = rec.request.ingress.value;
        d["outcome"] = std::string(cnc::to_string(rec.outcome));
        d["reject_reason"] = rec.reject_reason;
        d["response_s"] = rec.response_s ? py::cast(*rec.response_s) : py::none();
        d["cost"] = rec.bill.cost;
        d["metered_wu"] = rec.bill.metered_wu;
        d["plan"] = plan_dict(rec.plan);
        requests.append(d);
    }
    py::dict out;
    out["metrics"] = metrics;
    out["requests"] = requests;
    if (trace) out["trace"] = cnc::format_trace(r.trace);
    return out;
}

py::dict plan_request(const std::string& text, std::uint32_t request_id, std::optional<std::string> scheme) {
    const auto s = scenario_with(text, scheme, std::nullopt);
    for (const auto& raw : cnc::scenario_requests(s)) {
        if (raw.id.value != request_id) continue;
        const cnc::Graph g(s.topology);
        const auto req = cnc::regularize(raw, s.topology.services, s.settings.default_deadline_s);
        return plan_dict(cnc::plan_with(s.settings.scheme, g, cnc::ViewState::initial(g), req,
                                        cnc::PlannerConfig{s.settings.split_k}));
    }
    throw py::key_error("no request with id " + std::to_string(request_id));
}

std::string sweep_scenario(const std::string& scenario_text, const std::string& sweep_text, unsigned jobs) {
    const auto s = cnc::parse_scenario(scenario_text);
    const auto sweep = cnc::parse_sweep(sweep_text);
    if (auto d = cnc::validate_sweep(sweep); !d.empty())
        throw cnc::Error(cnc::ErrorCode::InvalidScenario, d.front().code + ": " + d.front().message);
    py::gil_scoped_release release;
    return cnc::sweep_csv(cnc::run_sweep(s, sweep, {jobs, false}).rows);
}

}  // namespace

PYBIND11_MODULE(_cncsim, m) {
    m.doc() = "Compute and network convergence routing simulator";

    static py::exception<cnc::Error> error(m, "CncError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const cnc::Error& e) {
            py::set_error(error, e.what());
        }
    });

    m.attr("CSV_HEADER") = std::string(cnc::kSweepCsvHeader);

    m.def(
        "validate",
        [](const std::string& text) {
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& d : cnc::validate_scenario(cnc::parse_scenario(text))) out.emplace_back(d.code, d.message);
            return out;
        },
        py::arg("scenario_json"), "Diagnostics (code, message) for a scenario; empty when it is usable.");
    m.def("normalize", [](const std::string& text) { return cnc::scenario_to_json(cnc::parse_scenario(text)); },
          py::arg("scenario_json"), "Scenario JSON with every default filled in.");
    m.def("run", &run_scenario, py::arg("scenario_json"), py::arg("scheme") = py::none(),
          py::arg("seed") = py::none(), py::arg("trace") = false,
          "Simulate a scenario; returns metrics, per-request records and optionally the event trace.");
    m.def("plan", &plan_request, py::arg("scenario_json"), py::arg("request_id"), py::arg("scheme") = py::none(),
          "Plan one request of the scenario against the idle initial state.");
    m.def("sweep", &sweep_scenario, py::arg("scenario_json"), py::arg("sweep_json"), py::arg("jobs") = 1,
          "Run a sweep grid and return the results CSV.");
}
