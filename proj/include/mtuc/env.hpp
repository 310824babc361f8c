#pragma once

#include <vector>

#include "mtuc/economics.hpp"
#include "mtuc/scenario.hpp"

// Episodic decision environment over a scenario. One episode is one service
// cycle: each step sends the active AUV (round-robin by index) to one not yet
// served group together with that group's offload/cache/allocation decisions.
// The episode ends after K steps, when every group has been served.
//
// Rewards decompose the profit objective per step; their episode sum equals
// the economics evaluation of the assembled decision set exactly (penalty
// mode), which is this module's core correctness property.

namespace mtuc {

struct EnvAction {
    int next_dg = -1;
    // Per device-slot of the chosen group; entries beyond its device count
    // are ignored. Fractions are absolute budget shares (sums at most 1).
    std::vector<uint8_t> offload;
    std::vector<uint8_t> cache;
    std::vector<double> bandwidth;
    std::vector<double> compute;
};

struct EnvOptions {
    double fairness_penalty_per_s = 10.0;
};

class Env {
  public:
    explicit Env(Scenario scenario, EnvOptions opt = {});

    // Feature layout, all entries normalized into [-1, 1]:
    //   [3M]  AUV positions (x, y, z)
    //   [M]   AUV cycle times so far
    //   [M]   active AUV one-hot
    //   [7K]  per group: served flag, centroid x, centroid y, device count,
    //         mean task bits, mean cycles/bit, mean device cpu
    //   [1]   remaining cache capacity fraction
    //   [1]   episode progress (groups served / K)
    int feature_size() const { return 5 * num_auvs() + 7 * num_groups() + 2; }
    int num_groups() const { return scenario_.num_groups(); }
    int num_auvs() const { return scenario_.num_auvs; }
    int max_devices() const { return max_devices_; }
    int device_count(int group) const { return device_counts_[static_cast<size_t>(group)]; }
    const std::vector<int>& device_counts() const { return device_counts_; }
    const Scenario& scenario() const { return scenario_; }
    const GroupLink& link(int group) const { return links_[static_cast<size_t>(group)]; }

    const std::vector<double>& reset(uint64_t seed);

    struct StepResult {
        double reward = 0.0;
        bool done = false;
    };

    // Applies the action after projecting the group's decisions feasible
    // (cache implies offload, budgets renormalized, dead offloads rolled back
    // to local, storage cap respected). Throws std::invalid_argument when
    // next_dg was already served.
    StepResult step(const EnvAction& action);

    const std::vector<double>& features() const { return features_; }
    std::vector<uint8_t> unserved() const;
    int active_auv() const { return static_cast<int>(steps_ % static_cast<size_t>(num_auvs())); }
    bool done() const { return steps_ == static_cast<size_t>(num_groups()); }

    // Decision set assembled over the episode so far.
    const DecisionSet& decisions() const { return decisions_; }
    double episode_profit() const { return episode_profit_; }

  private:
    void rebuild_features();
    double segment_energy(int from, int to) const;  // waypoint index: 0 anchor, 1+k hover k
    double segment_time(int from, int to) const;

    Scenario scenario_;
    EnvOptions opt_;
    int max_devices_ = 0;
    std::vector<int> device_counts_;
    std::vector<GroupLink> links_;
    std::vector<double> hover_power_;              // per group
    std::vector<std::vector<double>> seg_energy_;  // [from][to]
    std::vector<std::vector<double>> seg_time_;
    double pos_scale_ = 1.0;
    double time_scale_ = 1.0;
    double bits_scale_ = 1.0;
    double cycles_scale_ = 1.0;
    double cpu_scale_ = 1.0;

    std::vector<int> auv_at_;          // waypoint index per AUV
    std::vector<double> cycle_time_;   // per AUV
    std::vector<uint8_t> served_;
    double capacity_used_bits_ = 0.0;
    size_t steps_ = 0;
    double episode_profit_ = 0.0;
    DecisionSet decisions_;
    std::vector<double> features_;
};

}  // namespace mtuc
