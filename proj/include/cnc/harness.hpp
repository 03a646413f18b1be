#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cnc/scenario.hpp"
#include "cnc/simulation.hpp"

namespace cnc {

struct LoadLevel {
    std::string name;
    double utilization = 0.0;
};

/// Grid of cells: every scheme x load x deadline x seed.
struct SweepSpec {
    std::vector<double> deadlines;
    std::vector<LoadLevel> loads;
    std::vector<Scheme> schemes;
    std::vector<std::uint64_t> seeds;
};

SweepSpec parse_sweep(std::string_view json_text);
SweepSpec load_sweep(const std::filesystem::path& path);
std::vector<Diagnostic> validate_sweep(const SweepSpec& sweep);

struct SweepRow {
    Scheme scheme = Scheme::Cnc;
    std::string load;
    double deadline_s = 0.0;
    std::uint64_t seed = 0;
    std::size_t submitted = 0;
    std::size_t completed = 0;
    std::size_t rejected = 0;
    std::size_t missed = 0;
    double success_ratio = 0.0;
    double mean_cost_completed = 0.0;  // over requests that met the deadline; 0 when there are none
    double mean_cost_submitted = 0.0;       // over all submitted requests, rejected ones counting 0
    std::string status = "ok";
};

struct SweepOptions {
    unsigned jobs = 1;
    bool keep_runs = false;
};

struct SweepResult {
    std::vector<SweepRow> rows;   // one per cell, ordered scheme, load, deadline, seed
    std::vector<RunResult> runs;  // parallel to rows when keep_runs is set
};

/// Scenario for one cell: the base scenario with the scheme, background
/// utilization, workload deadline (usage duration for resource workloads)
/// and seed replaced.
Scenario cell_scenario(const Scenario& base, Scheme scheme, const LoadLevel& load, double deadline_s,
                       std::uint64_t seed);

SweepRow summarize(const RunResult& result, Scheme scheme, const std::string& load, double deadline_s,
                   std::uint64_t seed);

/// Runs every cell, `jobs` at a time. Rows come back in cell order whatever
/// the parallelism. An engine error marks the cell's status instead of
/// aborting the sweep.
SweepResult run_sweep(const Scenario& base, const SweepSpec& sweep, const SweepOptions& options = {});

/// CSV with header
///   scheme,load,deadline_s,seed,submitted,completed,rejected,missed,
///   success_ratio,mean_cost_completed,mean_cost_fig5_convention,status
/// Per-seed rows of each (scheme, load, deadline) cell are followed by a
/// "mean" and a "stdev" row in the seed column.
std::string sweep_csv(const std::vector<SweepRow>& rows);

inline constexpr std::string_view kSweepCsvHeader =
    "scheme,load,deadline_s,seed,submitted,completed,rejected,missed,success_ratio,mean_cost_completed,"
    "mean_cost_fig5_convention,status";

}  // namespace cnc
