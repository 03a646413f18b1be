// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance                       run everything
//   acceptance --only NAME ...       run selected criteria
//   acceptance --prepare --cache F   run the canonical sweep once and store it
//   acceptance --cache F ...         reuse a stored sweep when present
//
// Exit status is non-zero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cnc/error.hpp"
#include "cnc/harness.hpp"
#include "cnc/planner.hpp"
#include "cnc/simulation.hpp"
#include "cnc/state_sync.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace fx = cnc::fixtures;
namespace orc = cnc::oracle;
using nlohmann::json;

namespace {

constexpr double kPredictionTolS = 1e-9;
constexpr double kOracleBudgetS = 60.0;
constexpr double kSweepBudgetS = 300.0;
constexpr int kOracleCases = 500;
constexpr int kPredictionCases = 300;

const char* const kScenario = CNC_SOURCE_DIR "/scenarios/canonical.json";
const char* const kSweep = CNC_SOURCE_DIR "/scenarios/canonical_sweep.json";

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

// Per-request facts the sweep criteria need, kept small enough to cache.
struct RequestFacts {
    bool feasible = false;
    double predicted_s = 0.0;
    double deadline_s = 0.0;
    int outcome = 0;
    double cost = 0.0;
    double metered_wu = 0.0;
};

struct CellFacts {
    cnc::SweepRow row;
    std::vector<RequestFacts> requests;
};

struct CanonicalSweep {
    double elapsed_s = 0.0;
    std::string csv;
    std::vector<CellFacts> cells;
};

CanonicalSweep run_canonical(unsigned jobs) {
    const auto base = cnc::load_scenario(kScenario);
    const auto spec = cnc::load_sweep(kSweep);
    const auto t0 = std::chrono::steady_clock::now();
    auto result = cnc::run_sweep(base, spec, {jobs, true});
    CanonicalSweep out;
    out.elapsed_s = seconds_since(t0);
    out.csv = cnc::sweep_csv(result.rows);
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        CellFacts cell{result.rows[i], {}};
        for (const auto& rec : result.runs[i].requests)
            cell.requests.push_back({rec.plan.feasible(), rec.plan.predicted_response_s, rec.request.deadline_s,
                                     static_cast<int>(rec.outcome), rec.bill.cost, rec.bill.metered_wu});
        out.cells.push_back(std::move(cell));
    }
    return out;
}

json to_json(const CanonicalSweep& s) {
    json cells = json::array();
    for (const auto& c : s.cells) {
        json reqs = json::array();
        for (const auto& r : c.requests)
            reqs.push_back({r.feasible, r.predicted_s, r.deadline_s, r.outcome, r.cost, r.metered_wu});
        const auto& w = c.row;
        cells.push_back({{"scheme", std::string(cnc::to_string(w.scheme))},
                         {"load", w.load},
                         {"deadline_s", w.deadline_s},
                         {"seed", w.seed},
                         {"counts", {w.submitted, w.completed, w.rejected, w.missed}},
                         {"success_ratio", w.success_ratio},
                         {"mean_cost_completed", w.mean_cost_completed},
                         {"mean_cost_submitted", w.mean_cost_submitted},
                         {"status", w.status},
                         {"requests", reqs}});
    }
    return {{"elapsed_s", s.elapsed_s}, {"csv", s.csv}, {"cells", cells}};
}

CanonicalSweep from_json(const json& j) {
    CanonicalSweep s;
    s.elapsed_s = j.at("elapsed_s").get<double>();
    s.csv = j.at("csv").get<std::string>();
    for (const auto& c : j.at("cells")) {
        CellFacts cell;
        auto& w = cell.row;
        w.scheme = *cnc::parse_scheme(c.at("scheme").get<std::string>());
        w.load = c.at("load").get<std::string>();
        w.deadline_s = c.at("deadline_s").get<double>();
        w.seed = c.at("seed").get<std::uint64_t>();
        const auto& n = c.at("counts");
        w.submitted = n[0];
        w.completed = n[1];
        w.rejected = n[2];
        w.missed = n[3];
        w.success_ratio = c.at("success_ratio").get<double>();
        w.mean_cost_completed = c.at("mean_cost_completed").get<double>();
        w.mean_cost_submitted = c.at("mean_cost_submitted").get<double>();
        w.status = c.at("status").get<std::string>();
        for (const auto& r : c.at("requests"))
            cell.requests.push_back({r[0].get<bool>(), r[1].get<double>(), r[2].get<double>(), r[3].get<int>(),
                                     r[4].get<double>(), r[5].get<double>()});
        s.cells.push_back(std::move(cell));
    }
    return s;
}

class Context {
public:
    explicit Context(std::string cache) : cache_(std::move(cache)) {}

    const CanonicalSweep& canonical() {
        if (sweep_) return *sweep_;
        if (!cache_.empty() && std::filesystem::exists(cache_)) {
            std::ifstream in(cache_);
            sweep_ = from_json(json::parse(in));
        } else {
            std::fprintf(stderr, "acceptance: running the canonical sweep\n");
            sweep_ = run_canonical(1);
        }
        return *sweep_;
    }

    void prepare() {
        sweep_ = run_canonical(1);
        std::ofstream out(cache_);
        out << to_json(*sweep_).dump();
    }

private:
    std::string cache_;
    std::optional<CanonicalSweep> sweep_;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const cnc::SweepRow& find_row(const CanonicalSweep& s, cnc::Scheme scheme, const std::string& load, double d,
                              std::uint64_t seed) {
    for (const auto& c : s.cells)
        if (c.row.scheme == scheme && c.row.load == load && c.row.deadline_s == d && c.row.seed == seed) return c.row;
    throw std::runtime_error("missing sweep cell");
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence(Context&) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240611);
    int cases = 0, mismatches = 0, feasible = 0;
    std::string first;
    for (int i = 0; i < kOracleCases; ++i) {
        auto c = fx::random_case(rng, 5, 4);
        const cnc::Graph g(c.topology);
        for (std::size_t k : {std::size_t{1}, std::size_t{3}}) {
            for (auto scheme : {cnc::Scheme::Cnc, cnc::Scheme::ComputingFirst}) {
                ++cases;
                const auto v = orc::brute_force(c.topology, c.view, c.request, k, scheme == cnc::Scheme::ComputingFirst);
                bool ok;
                try {
                    const auto p = cnc::plan_with(scheme, g, c.view, c.request, cnc::PlannerConfig{k});
                    ok = !v.no_host && p.feasible() == v.feasible &&
                         (!v.feasible ||
                          std::abs(p.predicted_cost - v.cost) <= cnc::kCostTieRel * std::max(1.0, std::abs(v.cost)));
                    feasible += p.feasible();
                } catch (const cnc::Error& e) {
                    ok = v.no_host && e.code() == cnc::ErrorCode::NoSuchService;
                }
                if (!ok && mismatches++ == 0) first = fmt(" first at case %d split_k %zu %s", i, k,
                                                          std::string(cnc::to_string(scheme)).c_str());
            }
        }
    }
    const double secs = seconds_since(t0);
    return {mismatches == 0 && secs < kOracleBudgetS && kOracleCases >= 200,
            fmt("%d scenarios, %d plans (%d feasible), %d mismatches, %.1f s of %.0f s", kOracleCases, cases, feasible,
                mismatches, secs, kOracleBudgetS) +
                first};
}

Outcome prediction_consistency(Context&) {
    std::mt19937_64 rng(99);
    int checked = 0, off = 0, rejected = 0;
    double worst = 0.0;
    for (int i = 0; i < kPredictionCases; ++i) {
        auto c = fx::random_case(rng, 5, 4);
        for (auto& n : c.topology.cnodes) n.backlog_wu.clear();
        bool hosted = false;
        for (const auto& n : c.topology.cnodes) hosted |= !n.deployments.empty();
        if (!hosted) continue;
        // Alternate between live-state planning and a router view freshly
        // bootstrapped at submit time.
        const bool live = i % 2 == 0;
        const double submit = live ? std::uniform_real_distribution<double>(0.0, 10.0)(rng) : 0.0;
        auto s = fx::quiet_scenario(c.topology, {fx::raw_request(0, 0, c.request.task_count, c.request.deadline_s,
                                                                 c.request.ingress.value, submit)});
        if (!live) s.settings.view_mode = cnc::ViewMode::Distributed;
        s.settings.scheme = i % 4 < 2 ? cnc::Scheme::Cnc : cnc::Scheme::ComputingFirst;
        const auto r = cnc::run(s);
        const auto& rec = r.requests[0];
        if (!rec.plan.feasible()) {
            ++rejected;
            continue;
        }
        ++checked;
        const double err = std::abs(*rec.response_s - rec.plan.predicted_response_s);
        worst = std::max(worst, err);
        off += err > kPredictionTolS;
    }
    return {off == 0 && checked >= 100,
            fmt("%d single-request runs (%d rejected as infeasible), %d beyond %.0e s, worst %.3g s", checked,
                rejected, off, kPredictionTolS, worst)};
}

Outcome deadline_soundness(Context& ctx) {
    const auto& s = ctx.canonical();
    std::size_t plans = 0, violations = 0;
    for (const auto& c : s.cells)
        for (const auto& r : c.requests) {
            if (!r.feasible) continue;
            ++plans;
            violations += r.predicted_s > r.deadline_s;
        }
    return {violations == 0 && plans > 0,
            fmt("%zu feasible plans across %zu sweep cells, %zu with predicted response above the deadline", plans,
                s.cells.size(), violations)};
}

Outcome cost_monotonicity(Context& ctx) {
    const auto& s = ctx.canonical();
    const auto spec = cnc::load_sweep(kSweep);
    auto deadlines = spec.deadlines;
    std::sort(deadlines.begin(), deadlines.end());
    int comparisons = 0, violations = 0;
    std::string first;
    for (const auto& load : spec.loads)
        for (auto seed : spec.seeds)
            for (std::size_t i = 1; i < deadlines.size(); ++i) {
                const double tight = find_row(s, cnc::Scheme::Cnc, load.name, deadlines[i - 1], seed).mean_cost_submitted;
                const double loose = find_row(s, cnc::Scheme::Cnc, load.name, deadlines[i], seed).mean_cost_submitted;
                ++comparisons;
                if (loose > tight && violations++ == 0)
                    first = fmt("; first: %s seed %llu %g s -> %g s: %.4f -> %.4f", load.name.c_str(),
                                static_cast<unsigned long long>(seed), deadlines[i - 1], deadlines[i], tight, loose);
            }
    return {violations == 0, fmt("%d consecutive-deadline comparisons over %zu seeds, %d increases", comparisons,
                                 spec.seeds.size(), violations) +
                                 first};
}

Outcome scheme_ordering(Context& ctx) {
    const auto& s = ctx.canonical();
    const auto spec = cnc::load_sweep(kSweep);
    int heavy_n = 0, heavy_bad = 0, light_n = 0, light_bad = 0;
    double light_worst = 0.0;
    for (double d : spec.deadlines)
        for (auto seed : spec.seeds) {
            const auto& ch = find_row(s, cnc::Scheme::Cnc, "heavy", d, seed);
            const auto& fh = find_row(s, cnc::Scheme::ComputingFirst, "heavy", d, seed);
            ++heavy_n;
            heavy_bad += ch.success_ratio < fh.success_ratio;
            const auto& cl = find_row(s, cnc::Scheme::Cnc, "light", d, seed);
            const auto& fl = find_row(s, cnc::Scheme::ComputingFirst, "light", d, seed);
            ++light_n;
            if (cl.mean_cost_completed > fl.mean_cost_completed) {
                ++light_bad;
                light_worst = std::max(light_worst, cl.mean_cost_completed / fl.mean_cost_completed - 1.0);
            }
        }
    const bool fast = s.elapsed_s < kSweepBudgetS;
    return {heavy_bad == 0 && light_bad == 0 && fast,
            fmt("heavy success cnc >= computing_first: %d/%d violations; light completed cost cnc <= "
                "computing_first: %d/%d violations (largest excess %.2f%%); sweep %.1f s of %.0f s",
                heavy_bad, heavy_n, light_bad, light_n, 100.0 * light_worst, s.elapsed_s, kSweepBudgetS)};
}

Outcome infeasibility_billing(Context& ctx) {
    const auto& s = ctx.canonical();
    std::size_t rejected = 0, billed = 0, column_mismatch = 0;
    for (const auto& c : s.cells) {
        double counted = 0.0;
        for (const auto& r : c.requests) {
            if (r.outcome == static_cast<int>(cnc::Outcome::RejectedInfeasible)) {
                ++rejected;
                billed += r.cost != 0.0 || r.metered_wu != 0.0;
            } else {
                counted += r.cost;
            }
        }
        // The submitted-cost column counts every rejected request as 0.
        const double expected = c.requests.empty() ? 0.0 : counted / c.requests.size();
        column_mismatch += std::abs(expected - c.row.mean_cost_submitted) > 1e-9 * std::max(1.0, expected);
    }
    return {billed == 0 && column_mismatch == 0 && rejected > 0,
            fmt("%zu rejected requests, %zu billed non-zero, %zu cells whose cost column disagrees", rejected, billed,
                column_mismatch)};
}

Outcome determinism(Context& ctx) {
    const auto& first = ctx.canonical();
    const unsigned jobs = std::max(2u, std::thread::hardware_concurrency());
    const auto again = run_canonical(jobs);
    const bool same = again.csv == first.csv;
    // A second small grid run twice in-process.
    const auto base = cnc::load_scenario(kScenario);
    auto spec = cnc::load_sweep(kSweep);
    spec.deadlines = {8.0};
    const auto a = cnc::sweep_csv(cnc::run_sweep(base, spec, {1, false}).rows);
    const auto b = cnc::sweep_csv(cnc::run_sweep(base, spec, {1, false}).rows);
    return {same && a == b, fmt("canonical CSV %zu bytes, rerun with %u jobs %s; repeated single-deadline grid %s",
                                first.csv.size(), jobs, same ? "identical" : "DIFFERENT",
                                a == b ? "identical" : "DIFFERENT")};
}

Outcome state_sync_permutation(Context&) {
    std::mt19937_64 rng(7);
    auto packet = [&](std::uint32_t origin, std::uint64_t seq) {
        cnc::CncStatePacket p;
        p.origin = cnc::RouterId(origin);
        p.seq = seq;
        p.sampled_at_s = static_cast<double>(seq) * 0.1;
        p.link_reports[cnc::LinkId(origin)] = std::uniform_real_distribution<double>(0, 1e7)(rng);
        p.cnode_reports[cnc::CnodeId(origin)] =
            cnc::CnodeStatus{{{cnc::ServiceId(0), 1}}, {{cnc::ServiceId(0), std::uniform_real_distribution<double>(0, 9)(rng)}}};
        return std::make_shared<const cnc::CncStatePacket>(p);
    };
    int sets = 0, differing = 0;
    for (int round = 0; round < 2000; ++round) {
        std::vector<std::shared_ptr<const cnc::CncStatePacket>> ps;
        std::uniform_int_distribution<std::uint32_t> origin(0, round % 3);
        std::uniform_int_distribution<std::uint64_t> seq(0, 3);
        std::set<std::pair<std::uint32_t, std::uint64_t>> used;
        while (ps.size() < 3) {
            const auto o = origin(rng);
            const auto q = seq(rng);
            if (!used.insert({o, q}).second) continue;  // one packet per (origin, seq)
            ps.push_back(packet(o, q));
        }
        std::vector<int> order = {0, 1, 2};
        std::optional<cnc::GlobalView> reference;
        bool same = true;
        do {
            cnc::GlobalView v;
            for (int i : order) v.apply(ps[i]);
            if (!reference)
                reference = v;
            else
                same &= v == *reference;
        } while (std::next_permutation(order.begin(), order.end()));
        ++sets;
        differing += !same;
    }
    return {differing == 0, fmt("%d packet triples x 6 orders, %d with differing final views", sets, differing)};
}

struct Criterion {
    const char* name;
    std::function<Outcome(Context&)> check;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all = {
        {"oracle_equivalence", oracle_equivalence},
        {"deadline_soundness", deadline_soundness},
        {"prediction_consistency", prediction_consistency},
        {"cost_monotonicity", cost_monotonicity},
        {"scheme_ordering", scheme_ordering},
        {"infeasibility_billing", infeasibility_billing},
        {"determinism", determinism},
        {"state_sync_permutation", state_sync_permutation},
    };
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<std::string> only;
    std::string cache;
    bool prepare = false, list = false;
    app.add_option("--only", only, "Criteria to run (default: all)");
    app.add_option("--cache", cache, "Canonical sweep cache file");
    app.add_flag("--prepare", prepare, "Run the canonical sweep and write the cache");
    app.add_flag("--list", list, "List criterion names");
    CLI11_PARSE(app, argc, argv);

    if (list) {
        for (const auto& c : criteria()) std::printf("%s\n", c.name);
        return 0;
    }
    Context ctx(cache);
    try {
        if (prepare) {
            if (cache.empty()) {
                std::fprintf(stderr, "acceptance: --prepare needs --cache\n");
                return 2;
            }
            ctx.prepare();
            std::printf("canonical sweep cached in %s\n", cache.c_str());
            return 0;
        }
        for (const auto& name : only) {
            if (std::none_of(criteria().begin(), criteria().end(), [&](const Criterion& c) { return name == c.name; })) {
                std::fprintf(stderr, "acceptance: unknown criterion '%s'\n", name.c_str());
                return 2;
            }
        }
        bool all_pass = true;
        for (const auto& c : criteria()) {
            if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
            const auto r = c.check(ctx);
            all_pass &= r.pass;
            std::printf("%s %s: %s\n", r.pass ? "PASS" : "FAIL", c.name, r.detail.c_str());
            std::fflush(stdout);
        }
        return all_pass ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance: %s\n", e.what());
        return 2;
    }
}
