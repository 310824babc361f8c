#pragma once

#include <span>
#include <string>
#include <vector>

#include "mtuc/env.hpp"
#include "mtuc/rng.hpp"

// Shared-trunk actor/critic network with analytic gradients. Two tanh layers
// feed a masked categorical head for the next group, per-device-slot
// Bernoulli heads for offload and cache bits, two simplex heads (softmax with
// an extra idle slot) for the bandwidth and compute budget shares, and a
// scalar value head. Parameters live in one flat vector partitioned into
// named tensors; the actor owns the trunk and policy heads, the critic the
// trunk and value head.

namespace mtuc {

struct NetConfig {
    int feature_dim = 0;
    int num_groups = 0;
    int max_devices = 0;
    int hidden = 128;
};

struct TensorInfo {
    std::string name;
    size_t offset = 0;
    size_t rows = 0;
    size_t cols = 0;  // 0 for bias vectors
    bool actor = false;
    bool critic = false;
    size_t size() const { return rows * std::max<size_t>(cols, 1); }
};

struct Heads {
    std::vector<double> dg_logits;       // K
    std::vector<double> offload_logits;  // N
    std::vector<double> cache_logits;    // N
    std::vector<double> bw_logits;       // N + 1, last entry is the idle share
    std::vector<double> comp_logits;     // N + 1
    double value = 0.0;
};

class PolicyValueNet {
  public:
    PolicyValueNet(NetConfig cfg, uint64_t seed);

    const NetConfig& config() const { return cfg_; }
    const std::vector<TensorInfo>& tensors() const { return tensors_; }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }
    size_t param_count() const { return params_.size(); }

    struct Trace {
        std::vector<double> input, h1, h2;
        Heads heads;
    };

    // Throws std::invalid_argument on a feature-length mismatch.
    Heads forward(std::span<const double> features) const;
    Trace forward_trace(std::span<const double> features) const;

    // Accumulates input-gradient contributions of dLoss/dlogits into grad
    // (flat, same layout as params). dvalue enters through the value head.
    void backward(const Trace& trace, const Heads& head_grads, bool into_actor_heads,
                  double dvalue, std::span<double> grad) const;

    void save_checkpoint(const std::string& path) const;
    static PolicyValueNet load_checkpoint(const std::string& path);

  private:
    NetConfig cfg_;
    std::vector<TensorInfo> tensors_;
    std::vector<double> params_;
};

// One environment step as consumed by the trainer. The stored action is the
// sampled one (before any in-environment projection); allocation weights keep
// the idle share in the last slot.
struct Transition {
    std::vector<double> features;
    std::vector<uint8_t> unserved;   // categorical mask at decision time
    int device_count = 0;            // of the chosen group
    int dg = -1;
    std::vector<uint8_t> offload;    // device_count entries; 1 wherever cache=1
    std::vector<uint8_t> cache;      // device_count entries
    std::vector<uint8_t> bw_mask;    // N+1 flags: uncached offloaders + idle
    std::vector<uint8_t> comp_mask;  // N+1 flags: offloaders + idle
    std::vector<double> bw_weights;  // realized shares on bw_mask (sum 1)
    std::vector<double> comp_weights;
    double reward = 0.0;  // unscaled environment reward
};

struct SampledStep {
    EnvAction action;
    Transition transition;  // reward filled by the caller after env.step
};

// Draws a joint action: masked categorical next group, Bernoulli cache bits
// (a cached task is implicitly offloaded), Bernoulli offload bits for the
// remaining slots, then noisy-softmax budget shares over the eligible slots
// plus idle. device_counts holds the device count of every group. Greedy mode
// takes modes instead of samples.
SampledStep sample_action(const PolicyValueNet& net, const Heads& heads,
                          std::span<const double> features, std::span<const uint8_t> unserved,
                          std::span<const int> device_counts, Rng& rng, bool greedy,
                          double explore_temp = 1.0);

// Discounted backward recursion over a rollout's rewards, seeded with the
// bootstrap value (0 at a terminal state).
std::vector<double> k_step_returns(std::span<const double> rewards, double bootstrap,
                                   double discount);

struct RolloutGrads {
    std::vector<double> actor;   // ascent direction of the policy objective
    std::vector<double> critic;  // descent direction of the value loss
    std::vector<double> returns;
    std::vector<double> advantages;
    double value_loss = 0.0;  // mean squared advantage
    double entropy = 0.0;     // mean joint entropy
};

// Analytic gradients over one rollout. Advantages are treated as constants in
// the policy term; the critic term differentiates only through the value
// head and trunk. Throws std::runtime_error naming the head if any gradient
// turns non-finite.
RolloutGrads losses_and_grads(const PolicyValueNet& net, std::span<const Transition> rollout,
                              double bootstrap, double discount, double entropy_weight);

// Scalar objectives matching the gradients above; used by the finite
// difference checks and diagnostics.
double actor_objective(const PolicyValueNet& net, std::span<const Transition> rollout,
                       std::span<const double> advantages, double entropy_weight);
double critic_objective(const PolicyValueNet& net, std::span<const Transition> rollout,
                        std::span<const double> returns);

struct RmsPropState {
    std::vector<double> accum;  // elementwise squared-gradient average
    double momentum = 0.99;
    double learning_rate = 1e-3;
    double eps = 1e-8;
};

// accum <- momentum*accum + (1-momentum)*grad^2;
// param <- param - lr*grad/sqrt(accum + eps), elementwise.
void rmsprop_apply(std::span<double> params, std::span<const double> grads,
                   std::span<double> accum, double momentum, double learning_rate, double eps);

}  // namespace mtuc
