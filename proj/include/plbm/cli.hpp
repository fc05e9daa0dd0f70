#pragma once
// Command-line front end: run / compare / gen-geometry / check-topology.
// Exit codes: 0 success, 1 validation or runtime failure, 2 usage.

#include "plbm/engine.hpp"
#include "plbm/scenario.hpp"

#include <string>
#include <vector>

namespace plbm::iobench {

struct SnapshotDiff {
    std::string base;        // snapshot base path, relative to a run dir
    double max_abs_diff = 0; // over the full bounding box
};

struct CompareResult {
    engine::RunResult static_run;
    engine::RunResult progressive_run;
    std::vector<SnapshotDiff> diffs;
    double max_abs_diff = 0.0;
    std::string output_dir;
};

// Runs the scenario in both modes (static to <out>/static, progressive
// to <out>/progressive), diffs every snapshot pair, and writes the
// joined compare.csv and compare_summary.json under <out>.
CompareResult run_compare(const ScenarioConfig& cfg);

// The whole CLI; returns the process exit code.
int run_cli(int argc, const char* const* argv);

} // namespace plbm::iobench
