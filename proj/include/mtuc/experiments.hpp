#pragma once

#include <string>
#include <vector>

#include "mtuc/scenario.hpp"
#include "mtuc/trainer.hpp"

// Desk-scale experiment runner. Each experiment sweeps scenarios or training
// seeds, writes one CSV per figure plus a manifest, and never renders images.
// All cells run single-worker with fixed seeds, so a rerun with the same
// manifest reproduces the CSVs byte for byte.

namespace mtuc {

struct ExperimentSpec {
    std::string id;  // one of the ids listed by known_experiments()
    int seeds = 5;
    std::string out_dir = ".";
    bool full_scale = false;  // full-size sweeps instead of desk-scale ones
};

struct ExperimentOutcome {
    bool ok = true;
    std::vector<std::string> csv_files;
    std::string manifest_file;
    std::vector<std::string> failures;
};

const std::vector<std::string>& known_experiments();

ExperimentOutcome run_experiment(const ExperimentSpec& spec);

// One result cell. `sweep` carries the x-axis value where the experiment has
// one (number of AUVs, proportion index), otherwise 0.
struct ExpRow {
    std::string algo;
    int sweep = 0;
    uint64_t seed = 0;
    std::string scenario_hash;
    double profit = 0.0;
    double revenue = 0.0;
    double task_cost = 0.0;
    double movement_cost = 0.0;
    double penalty = 0.0;
    double extra = 0.0;  // experiment-specific (oracle profit, gap, ...)
};

// Computes an experiment's rows without touching the filesystem.
std::vector<ExpRow> experiment_rows(const std::string& id, int seeds, bool full_scale);

// --- benchmark scenario suite (shared by experiments and the acceptance
// tests; every member is deterministic in its arguments) ---

// Compact instance for oracle comparisons: 4 groups, 8 devices, 500 m area,
// still water, movement cost scaled so task decisions dominate.
Scenario tiny_benchmark_instance(int index);

// Generated desk scenario with the benchmark cost scaling applied.
Scenario desk_benchmark_scenario(uint64_t seed, int groups, int auvs, int total_devices,
                                 double extent_m, int vortices);

// Fixed 60-device layout: three two-group clusters around the station with
// strong swirls between them, so chaining clusters in one tour is expensive
// while one-cluster-per-AUV assignments stay cheap.
Scenario clustered_benchmark_scenario(int num_auvs);

// Training configuration used by every learned cell of the experiments.
TrainConfig benchmark_train_config(uint64_t seed, long max_env_steps);

}  // namespace mtuc
