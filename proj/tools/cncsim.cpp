// cncsim: command line front end for the simulator.
//
//   cncsim validate <scenario.json>
//   cncsim run <scenario.json> [--scheme cnc|computing_first] [--seed N] [--requests]
//   cncsim sweep <scenario.json> <sweep.json> --out results.csv [--jobs N]
//   cncsim trace <scenario.json> --events out.log [--scheme ..] [--seed N]
//
// CNCSIM_LOG=quiet|info|debug controls stderr chatter (default info).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "cnc/error.hpp"
#include "cnc/harness.hpp"
#include "cnc/scenario.hpp"
#include "cnc/simulation.hpp"

namespace {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
    const char* env = std::getenv("CNCSIM_LOG");
    if (!env) return LogLevel::Info;
    const std::string v(env);
    if (v == "quiet" || v == "0" || v == "error") return LogLevel::Quiet;
    if (v == "debug" || v == "2") return LogLevel::Debug;
    return LogLevel::Info;
}

template <class... Args>
void log(LogLevel level, const char* fmt, Args... args) {
    if (static_cast<int>(level) > static_cast<int>(log_level())) return;
    std::fprintf(stderr, "cncsim: ");
    std::fprintf(stderr, fmt, args...);
    std::fputc('\n', stderr);
}

int report_diagnostics(const std::vector<cnc::Diagnostic>& diags, const std::string& what) {
    if (diags.empty()) {
        std::printf("%s: ok\n", what.c_str());
        return 0;
    }
    for (const auto& d : diags) std::printf("%s: %s: %s\n", what.c_str(), d.code.c_str(), d.message.c_str());
    return 1;
}

cnc::Scenario load_with_overrides(const std::string& path, const std::optional<std::string>& scheme,
                                  const std::optional<std::uint64_t>& seed) {
    auto s = cnc::load_scenario(path);
    if (scheme) {
        auto parsed = cnc::parse_scheme(*scheme);
        if (!parsed) throw cnc::Error(cnc::ErrorCode::InvalidScenario, "unknown scheme '" + *scheme + "'");
        s.settings.scheme = *parsed;
    }
    if (seed) s.rng_seed = *seed;
    return s;
}

void print_summary(const cnc::RunResult& r, bool per_request) {
    const auto& m = r.metrics;
    std::printf("submitted %zu completed %zu rejected %zu missed %zu\n", m.submitted, m.completed, m.rejected,
                m.missed);
    std::printf("total_cost %.6f successful_cost %.6f metered_wu %.6f\n", r.ledger.total_cost(),
                r.ledger.successful_cost(), r.ledger.total_metered_wu());
    std::printf("request_bytes %.0f result_bytes %.0f cnc_bytes %.0f background_bytes %.0f\n", m.request_bytes,
                m.result_bytes, m.cnc_bytes, m.background_bytes);
    std::printf("events %llu end_time_s %.9f\n", static_cast<unsigned long long>(m.events), m.end_time_s);
    if (!per_request) return;
    std::printf("id\tsubmit_s\tdeadline_s\ttasks\toutcome\tpredicted_s\tresponse_s\tcost\tcnodes\n");
    for (const auto& rec : r.requests) {
        std::string cnodes;
        for (const auto& a : rec.plan.assignments)
            cnodes += (cnodes.empty() ? "" : ",") + std::to_string(a.schedule.cnode.value);
        std::printf("%u\t%.6f\t%.6f\t%u\t%s\t%.9f\t%s\t%.6f\t%s\n", rec.request.id.value, rec.raw.submit_time_s,
                    rec.request.deadline_s, rec.request.task_count, std::string(cnc::to_string(rec.outcome)).c_str(),
                    rec.plan.predicted_response_s,
                    rec.response_s ? std::to_string(*rec.response_s).c_str() : "-", rec.bill.cost,
                    cnodes.empty() ? "-" : cnodes.c_str());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compute and network convergence routing simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string sweep_path;
    std::string out_path;
    std::string events_path;
    std::optional<std::string> scheme;
    std::optional<std::uint64_t> seed;
    bool per_request = false;
    unsigned jobs = 1;

    auto* validate = app.add_subcommand("validate", "Check a scenario file");
    validate->add_option("scenario", scenario_path, "Scenario JSON")->required();
    validate->add_option("--sweep", sweep_path, "Also check a sweep file");

    auto* run = app.add_subcommand("run", "Simulate one scenario and print a summary");
    run->add_option("scenario", scenario_path, "Scenario JSON")->required();
    run->add_option("--scheme", scheme, "cnc or computing_first");
    run->add_option("--seed", seed, "RNG seed override");
    run->add_flag("--requests", per_request, "Print one line per request");

    auto* sweep = app.add_subcommand("sweep", "Run a deadline/load/scheme/seed grid and write CSV");
    sweep->add_option("scenario", scenario_path, "Scenario JSON")->required();
    sweep->add_option("sweep", sweep_path, "Sweep JSON")->required();
    sweep->add_option("--out", out_path, "Output CSV (stdout if omitted)");
    sweep->add_option("--jobs", jobs, "Cells simulated in parallel (0 = hardware threads)");

    auto* trace = app.add_subcommand("trace", "Simulate and write the event trace");
    trace->add_option("scenario", scenario_path, "Scenario JSON")->required();
    trace->add_option("--events", events_path, "Trace output file")->required();
    trace->add_option("--scheme", scheme, "cnc or computing_first");
    trace->add_option("--seed", seed, "RNG seed override");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) {
            auto s = cnc::load_scenario(scenario_path);
            int rc = report_diagnostics(cnc::validate_scenario(s), scenario_path);
            if (!sweep_path.empty()) rc |= report_diagnostics(cnc::validate_sweep(cnc::load_sweep(sweep_path)), sweep_path);
            return rc;
        }
        if (*run) {
            auto s = load_with_overrides(scenario_path, scheme, seed);
            log(LogLevel::Debug, "running %s with scheme %s seed %llu", scenario_path.c_str(),
                std::string(cnc::to_string(s.settings.scheme)).c_str(), static_cast<unsigned long long>(s.rng_seed));
            print_summary(cnc::run(s), per_request);
            return 0;
        }
        if (*sweep) {
            auto s = cnc::load_scenario(scenario_path);
            auto spec = cnc::load_sweep(sweep_path);
            if (auto d = cnc::validate_sweep(spec); !d.empty()) return report_diagnostics(d, sweep_path);
            if (auto d = cnc::validate_scenario(s); !d.empty()) return report_diagnostics(d, scenario_path);
            if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
            const auto cells = spec.schemes.size() * spec.loads.size() * spec.deadlines.size() * spec.seeds.size();
            log(LogLevel::Info, "sweeping %zu cells with %u job(s)", cells, jobs);
            const auto t0 = std::chrono::steady_clock::now();
            auto result = cnc::run_sweep(s, spec, {jobs, false});
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const auto csv = cnc::sweep_csv(result.rows);
            if (out_path.empty()) {
                std::fwrite(csv.data(), 1, csv.size(), stdout);
            } else {
                std::ofstream out(out_path, std::ios::binary);
                if (!out) {
                    std::fprintf(stderr, "cncsim: cannot write %s\n", out_path.c_str());
                    return 2;
                }
                out << csv;
            }
            log(LogLevel::Info, "done in %.1f s", secs);
            for (const auto& row : result.rows)
                if (row.status != "ok")
                    log(LogLevel::Info, "cell %s/%s/%g/seed %llu: %s", std::string(cnc::to_string(row.scheme)).c_str(),
                        row.load.c_str(), row.deadline_s, static_cast<unsigned long long>(row.seed), row.status.c_str());
            return 0;
        }
        if (*trace) {
            auto s = load_with_overrides(scenario_path, scheme, seed);
            auto result = cnc::run(s, {true, {}});
            std::ofstream out(events_path, std::ios::binary);
            if (!out) {
                std::fprintf(stderr, "cncsim: cannot write %s\n", events_path.c_str());
                return 2;
            }
            out << cnc::format_trace(result.trace);
            log(LogLevel::Info, "%zu events written to %s", result.trace.size(), events_path.c_str());
            return 0;
        }
    } catch (const cnc::Error& e) {
        std::fprintf(stderr, "cncsim: %s\n", e.what());
        return 1;
    }
    return 0;
}
