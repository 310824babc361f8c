#include "mtuc/trainer.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mtuc {

namespace {

struct GlobalStore {
    PolicyValueNet net;
    std::vector<double> rms_accum;
    std::vector<std::unique_ptr<std::mutex>> tensor_locks;
    std::atomic<long> env_steps{0};
    std::atomic<long> updates{0};

    std::mutex meta_lock;  // curve, learning rate, adaptive state
    std::vector<CurvePoint> curve;
    double learning_rate;
    std::vector<double> episode_profits;
    double best_window_mean = 0.0;
    bool have_best_window = false;
    int stalled_checks = 0;
    long next_check = 0;

    GlobalStore(PolicyValueNet n, double lr, int window)
        : net(std::move(n)), learning_rate(lr), next_check(window) {
        rms_accum.assign(net.param_count(), 0.0);
        for (size_t i = 0; i < net.tensors().size(); ++i)
            tensor_locks.push_back(std::make_unique<std::mutex>());
    }
};

void snapshot_params(GlobalStore& store, PolicyValueNet& local) {
    const auto& tensors = store.net.tensors();
    for (size_t t = 0; t < tensors.size(); ++t) {
        std::lock_guard<std::mutex> lock(*store.tensor_locks[t]);
        const auto& info = tensors[t];
        std::copy_n(store.net.params().begin() + static_cast<long>(info.offset), info.size(),
                    local.params().begin() + static_cast<long>(info.offset));
    }
}

void apply_grads(GlobalStore& store, const std::vector<double>& grads, const TrainConfig& cfg) {
    double lr;
    {
        std::lock_guard<std::mutex> lock(store.meta_lock);
        lr = store.learning_rate;
    }
    const auto& tensors = store.net.tensors();
    for (size_t t = 0; t < tensors.size(); ++t) {
        const auto& info = tensors[t];
        std::lock_guard<std::mutex> lock(*store.tensor_locks[t]);
        rmsprop_apply(
            std::span<double>(store.net.params().data() + info.offset, info.size()),
            std::span<const double>(grads.data() + info.offset, info.size()),
            std::span<double>(store.rms_accum.data() + info.offset, info.size()),
            cfg.rms_momentum, lr, cfg.rms_eps);
    }
}

// Runs episodes with the untrained policy to pick a return scale that keeps
// value targets near unit magnitude.
double calibrate_reward_scale(const Scenario& scenario, const PolicyValueNet& net,
                              const TrainConfig& cfg) {
    Env env(scenario, {cfg.fairness_penalty_per_s});
    Rng rng(Rng::derive(cfg.seed, 0x5ca1e));
    double acc = 0.0;
    const int episodes = 8;
    for (int e = 0; e < episodes; ++e) {
        env.reset(0);
        while (!env.done()) {
            const auto heads = net.forward(env.features());
            const auto step = sample_action(net, heads, env.features(), env.unserved(),
                                            env.device_counts(), rng, false, cfg.explore_temp);
            env.step(step.action);
        }
        acc += std::abs(env.episode_profit());
    }
    return std::max(1.0, acc / episodes);
}

}  // namespace

double TrainResult::tail_mean_profit(double tail_fraction) const {
    if (curve.empty()) return 0.0;
    const size_t n = curve.size();
    const size_t start = n - std::max<size_t>(1, static_cast<size_t>(tail_fraction * n));
    double acc = 0.0;
    for (size_t i = start; i < n; ++i) acc += curve[i].mean_episode_profit;
    return acc / static_cast<double>(n - start);
}

TrainResult train(const Scenario& scenario, const TrainConfig& cfg) {
    if (cfg.workers < 1) throw std::invalid_argument("train: workers must be >= 1");
    if (cfg.discount < 0.0 || cfg.discount >= 1.0 + 1e-12)
        throw std::invalid_argument("train: discount must lie in [0, 1)");

    Env probe(scenario, {cfg.fairness_penalty_per_s});
    NetConfig netcfg{probe.feature_size(), probe.num_groups(), probe.max_devices(), cfg.hidden};
    PolicyValueNet initial(netcfg, Rng::derive(cfg.seed, 0x1717));

    const double scale =
        cfg.reward_scale > 0 ? cfg.reward_scale : calibrate_reward_scale(scenario, initial, cfg);

    const double start_lr =
        cfg.adaptive_lr ? cfg.learning_rate * cfg.adaptive_boost : cfg.learning_rate;
    GlobalStore store(std::move(initial), start_lr, cfg.adaptive_window);
    const int rollout_len = cfg.rollout_len > 0 ? cfg.rollout_len : probe.num_groups();

    auto worker = [&](int wid) {
        Env env(scenario, {cfg.fairness_penalty_per_s});
        Rng rng(Rng::derive(cfg.seed, static_cast<uint64_t>(wid)));
        PolicyValueNet local(netcfg, 0);
        env.reset(0);
        double last_episode_profit = 0.0;

        while (store.env_steps.load(std::memory_order_relaxed) < cfg.max_env_steps) {
            snapshot_params(store, local);

            std::vector<Transition> rollout;
            bool terminal = false;
            for (int t = 0; t < rollout_len && !terminal; ++t) {
                if (env.done()) env.reset(0);
                const auto heads = local.forward(env.features());
                auto step = sample_action(local, heads, env.features(), env.unserved(),
                                          env.device_counts(), rng, false, cfg.explore_temp);
                const auto result = env.step(step.action);
                step.transition.reward = result.reward / scale;
                rollout.push_back(std::move(step.transition));
                store.env_steps.fetch_add(1, std::memory_order_relaxed);
                terminal = result.done;
                if (terminal) last_episode_profit = env.episode_profit();
            }
            if (rollout.empty()) break;

            double bootstrap = 0.0;
            if (!terminal) bootstrap = local.forward(env.features()).value;

            const auto grads =
                losses_and_grads(local, rollout, bootstrap, cfg.discount, cfg.entropy_weight);
            std::vector<double> applied(local.param_count());
            for (size_t i = 0; i < applied.size(); ++i)
                applied[i] = -grads.actor[i] + grads.critic[i];  // ascend policy, descend value
            apply_grads(store, applied, cfg);

            const long update = store.updates.fetch_add(1, std::memory_order_relaxed) + 1;
            {
                std::lock_guard<std::mutex> lock(store.meta_lock);
                store.episode_profits.push_back(last_episode_profit);
                CurvePoint pt;
                pt.update = update;
                pt.global_step = store.env_steps.load(std::memory_order_relaxed);
                pt.mean_episode_profit = last_episode_profit;
                pt.entropy = grads.entropy;
                pt.value_loss = grads.value_loss;
                pt.learning_rate = store.learning_rate;
                store.curve.push_back(pt);

                if (cfg.adaptive_lr && update >= store.next_check) {
                    const size_t n = store.episode_profits.size();
                    const size_t w = std::min<size_t>(static_cast<size_t>(cfg.adaptive_window), n);
                    double mean = 0.0;
                    for (size_t i = n - w; i < n; ++i) mean += store.episode_profits[i];
                    mean /= static_cast<double>(w);
                    // A stall means the window average no longer improves on the
                    // best window seen so far; two consecutive stalled checks
                    // debounce the noisy estimate before the rate is halved.
                    if (!store.have_best_window) {
                        store.best_window_mean = mean;
                        store.have_best_window = true;
                    } else if (mean - store.best_window_mean >
                               cfg.adaptive_rel_improve * std::abs(store.best_window_mean)) {
                        store.best_window_mean = mean;
                        store.stalled_checks = 0;
                    } else if (++store.stalled_checks >= 2) {
                        store.learning_rate =
                            std::max(cfg.min_learning_rate, store.learning_rate * 0.5);
                        store.stalled_checks = 0;
                    }
                    store.next_check = update + cfg.adaptive_window;
                }
            }
        }
    };

    if (cfg.workers == 1) {
        worker(0);
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < cfg.workers; ++w) threads.emplace_back(worker, w);
        for (auto& t : threads) t.join();
    }

    TrainResult result{std::move(store.net), std::move(store.curve), scale};
    return result;
}

DecisionSet greedy_decisions(const Scenario& scenario, const PolicyValueNet& net,
                             double fairness_penalty_per_s) {
    Env env(scenario, {fairness_penalty_per_s});
    Rng rng(0);
    env.reset(0);
    while (!env.done()) {
        const auto heads = net.forward(env.features());
        const auto step =
            sample_action(net, heads, env.features(), env.unserved(), env.device_counts(), rng, true);
        env.step(step.action);
    }
    return env.decisions();
}

double greedy_profit(const Scenario& scenario, const PolicyValueNet& net,
                     double fairness_penalty_per_s) {
    const auto decisions = greedy_decisions(scenario, net, fairness_penalty_per_s);
    return evaluate(scenario, decisions, {.strict = false,
                                          .fairness_penalty_per_s = fairness_penalty_per_s})
        .profit;
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
    std::ostringstream out;
    out.precision(12);
    out << "update_index,global_step,mean_episode_profit,entropy,value_loss,learning_rate\n";
    for (const auto& p : curve)
        out << p.update << "," << p.global_step << "," << p.mean_episode_profit << ","
            << p.entropy << "," << p.value_loss << "," << p.learning_rate << "\n";
    return out.str();
}

}  // namespace mtuc
