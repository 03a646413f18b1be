#include "cnc/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "cnc/error.hpp"

namespace cnc {

using nlohmann::json;

SweepSpec parse_sweep(std::string_view json_text) {
    SweepSpec s;
    try {
        const auto doc = json::parse(json_text);
        for (const auto& d : doc.at("deadlines")) s.deadlines.push_back(d.get<double>());
        const auto& loads = doc.at("loads");
        if (loads.is_array()) {
            for (const auto& l : loads) s.loads.push_back({l.at("name").get<std::string>(), l.at("utilization").get<double>()});
        } else {
            for (const auto& [name, util] : loads.items()) s.loads.push_back({name, util.get<double>()});
        }
        for (const auto& name : doc.at("schemes")) {
            auto scheme = parse_scheme(name.get<std::string>());
            if (!scheme) throw Error(ErrorCode::InvalidScenario, "unknown scheme '" + name.get<std::string>() + "'");
            s.schemes.push_back(*scheme);
        }
        for (const auto& seed : doc.at("seeds")) s.seeds.push_back(seed.get<std::uint64_t>());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidScenario, std::string("sweep file: ") + e.what());
    }
    return s;
}

SweepSpec load_sweep(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidScenario, "cannot open sweep file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_sweep(buf.str());
}

std::vector<Diagnostic> validate_sweep(const SweepSpec& s) {
    std::vector<Diagnostic> out;
    if (s.deadlines.empty()) out.push_back({"empty-sweep", "no deadlines"});
    if (s.loads.empty()) out.push_back({"empty-sweep", "no load levels"});
    if (s.schemes.empty()) out.push_back({"empty-sweep", "no schemes"});
    if (s.seeds.empty()) out.push_back({"empty-sweep", "no seeds"});
    for (double d : s.deadlines)
        if (!(d > 0.0)) out.push_back({"invalid-deadline", "deadlines must be positive"});
    for (const auto& l : s.loads)
        if (!(l.utilization >= 0.0 && l.utilization < 1.0))
            out.push_back({"invalid-load", "load '" + l.name + "' must have utilization in [0, 1)"});
    if (std::set<std::uint64_t>(s.seeds.begin(), s.seeds.end()).size() != s.seeds.size())
        out.push_back({"duplicate-seed", "seeds must be distinct"});
    return out;
}

Scenario cell_scenario(const Scenario& base, Scheme scheme, const LoadLevel& load, double deadline_s,
                       std::uint64_t seed) {
    Scenario s = base;
    s.settings.scheme = scheme;
    s.background.utilization = load.utilization;
    s.rng_seed = seed;
    if (s.workload) {
        if (s.workload->level == Level::Resource)
            s.workload->usage_duration_s = deadline_s;
        else
            s.workload->deadline_s = deadline_s;
    }
    return s;
}

SweepRow summarize(const RunResult& result, Scheme scheme, const std::string& load, double deadline_s,
                   std::uint64_t seed) {
    SweepRow row;
    row.scheme = scheme;
    row.load = load;
    row.deadline_s = deadline_s;
    row.seed = seed;
    const auto& m = result.metrics;
    row.submitted = m.submitted;
    row.completed = m.completed;
    row.rejected = m.rejected;
    row.missed = m.missed;
    double completed_cost = 0.0;
    double all_cost = 0.0;
    for (const auto& rec : result.requests) {
        all_cost += rec.outcome == Outcome::RejectedInfeasible ? 0.0 : rec.bill.cost;
        if (rec.outcome == Outcome::Completed) completed_cost += rec.bill.cost;
    }
    row.success_ratio = m.submitted ? static_cast<double>(m.completed) / m.submitted : 0.0;
    row.mean_cost_completed = m.completed ? completed_cost / m.completed : 0.0;
    row.mean_cost_submitted = m.submitted ? all_cost / m.submitted : 0.0;
    return row;
}

SweepResult run_sweep(const Scenario& base, const SweepSpec& sweep, const SweepOptions& options) {
    struct Cell {
        Scheme scheme;
        const LoadLevel* load;
        double deadline;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (auto scheme : sweep.schemes)
        for (const auto& load : sweep.loads)
            for (double d : sweep.deadlines)
                for (auto seed : sweep.seeds) cells.push_back({scheme, &load, d, seed});

    SweepResult out;
    out.rows.resize(cells.size());
    if (options.keep_runs) out.runs.resize(cells.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            const auto& c = cells[i];
            try {
                auto result = run(cell_scenario(base, c.scheme, *c.load, c.deadline, c.seed));
                out.rows[i] = summarize(result, c.scheme, c.load->name, c.deadline, c.seed);
                if (options.keep_runs) out.runs[i] = std::move(result);
            } catch (const Error& e) {
                SweepRow row;
                row.scheme = c.scheme;
                row.load = c.load->name;
                row.deadline_s = c.deadline;
                row.seed = c.seed;
                row.status = "error:" + std::string(to_string(e.code()));
                out.rows[i] = std::move(row);
            }
        }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(cells.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return out;
}

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string short_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string row_prefix(const SweepRow& r, const std::string& seed) {
    return std::string(to_string(r.scheme)) + "," + r.load + "," + short_num(r.deadline_s) + "," + seed + ",";
}

}  // namespace

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out(kSweepCsvHeader);
    out += '\n';
    std::size_t i = 0;
    while (i < rows.size()) {
        std::size_t j = i;
        while (j < rows.size() && rows[j].scheme == rows[i].scheme && rows[j].load == rows[i].load &&
               rows[j].deadline_s == rows[i].deadline_s)
            ++j;
        for (std::size_t k = i; k < j; ++k) {
            const auto& r = rows[k];
            out += row_prefix(r, std::to_string(r.seed)) + std::to_string(r.submitted) + "," +
                   std::to_string(r.completed) + "," + std::to_string(r.rejected) + "," + std::to_string(r.missed) +
                   "," + num(r.success_ratio) + "," + num(r.mean_cost_completed) + "," + num(r.mean_cost_submitted) + "," +
                   r.status + "\n";
        }
        // Aggregates over the cell's successful seeds.
        std::vector<const SweepRow*> ok;
        for (std::size_t k = i; k < j; ++k)
            if (rows[k].status == "ok") ok.push_back(&rows[k]);
        auto stat = [&](auto field) {
            double mean = 0.0;
            for (auto* r : ok) mean += field(*r);
            mean = ok.empty() ? 0.0 : mean / ok.size();
            double var = 0.0;
            for (auto* r : ok) var += (field(*r) - mean) * (field(*r) - mean);
            const double sd = ok.size() > 1 ? std::sqrt(var / (ok.size() - 1)) : 0.0;
            return std::pair{mean, sd};
        };
        const auto submitted = stat([](const SweepRow& r) { return double(r.submitted); });
        const auto completed = stat([](const SweepRow& r) { return double(r.completed); });
        const auto rejected = stat([](const SweepRow& r) { return double(r.rejected); });
        const auto missed = stat([](const SweepRow& r) { return double(r.missed); });
        const auto ratio = stat([](const SweepRow& r) { return r.success_ratio; });
        const auto cost = stat([](const SweepRow& r) { return r.mean_cost_completed; });
        const auto submitted_cost = stat([](const SweepRow& r) { return r.mean_cost_submitted; });
        const std::string status = ok.size() == j - i ? "ok" : "partial";
        out += row_prefix(rows[i], "mean") + num(submitted.first) + "," + num(completed.first) + "," +
               num(rejected.first) + "," + num(missed.first) + "," + num(ratio.first) + "," + num(cost.first) + "," +
               num(submitted_cost.first) + "," + status + "\n";
        out += row_prefix(rows[i], "stdev") + num(submitted.second) + "," + num(completed.second) + "," +
               num(rejected.second) + "," + num(missed.second) + "," + num(ratio.second) + "," + num(cost.second) +
               "," + num(submitted_cost.second) + "," + status + "\n";
        i = j;
    }
    return out;
}

}  // namespace cnc
