#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mtuc/policy_net.hpp"
#include "mtuc/scenario.hpp"

// Asynchronous advantage actor-critic training loop. Workers run private
// environments, synchronize a private parameter snapshot from the global
// store before every rollout, and apply accumulated gradients back through a
// shared RMSProp state. Updates are exclusive per tensor; snapshots may mix
// tensor versions (tolerated staleness). With one worker the run is
// bit-reproducible for a fixed seed.

namespace mtuc {

struct TrainConfig {
    double discount = 0.99;
    int rollout_len = 0;  // steps per rollout; 0 means one full episode
    double entropy_weight = 0.01;
    int workers = 4;
    long max_env_steps = 100000;  // global environment-step budget
    uint64_t seed = 1;
    double learning_rate = 1e-3;
    double rms_momentum = 0.99;
    double rms_eps = 1e-8;
    // Adaptive schedule: start at adaptive_boost times the base rate and halve
    // whenever the moving-average profit over adaptive_window updates stops
    // improving by adaptive_rel_improve relative, never below the floor.
    bool adaptive_lr = false;
    int adaptive_window = 50;  // updates between stall checks
    double adaptive_rel_improve = 0.005;
    double adaptive_boost = 1.0;  // optional hot start before the decay
    double min_learning_rate = 1e-4;
    double reward_scale = 0.0;  // returns are divided by this; 0 calibrates
                                // from warmup episodes of the initial policy
    int hidden = 128;
    double explore_temp = 0.5;  // Gumbel noise scale on the allocation heads
    double fairness_penalty_per_s = 10.0;
};

struct CurvePoint {
    long update = 0;
    long global_step = 0;
    double mean_episode_profit = 0.0;
    double entropy = 0.0;
    double value_loss = 0.0;
    double learning_rate = 0.0;
};

struct TrainResult {
    PolicyValueNet net;
    std::vector<CurvePoint> curve;
    double reward_scale = 1.0;

    // Mean episode profit over the last fraction of updates.
    double tail_mean_profit(double tail_fraction = 0.2) const;
};

TrainResult train(const Scenario& scenario, const TrainConfig& cfg);

// Deterministic evaluation: runs one episode with greedy head modes and
// returns the economics profit of the assembled decisions (penalty mode).
double greedy_profit(const Scenario& scenario, const PolicyValueNet& net,
                     double fairness_penalty_per_s = 10.0);
DecisionSet greedy_decisions(const Scenario& scenario, const PolicyValueNet& net,
                             double fairness_penalty_per_s = 10.0);

std::string curve_csv(const std::vector<CurvePoint>& curve);

}  // namespace mtuc
