#include "mtuc/policy_net.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace mtuc {

namespace {

double sigmoid(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

double clamp_prob(double p) { return std::min(1.0 - 1e-12, std::max(1e-12, p)); }

// log-softmax over the masked entries; unmasked entries are untouched.
void masked_log_softmax(std::span<const double> logits, std::span<const uint8_t> mask,
                        std::vector<double>& logp, std::vector<double>& prob) {
    logp.assign(logits.size(), 0.0);
    prob.assign(logits.size(), 0.0);
    double hi = -1e300;
    for (size_t i = 0; i < logits.size(); ++i)
        if (mask[i]) hi = std::max(hi, logits[i]);
    double z = 0.0;
    for (size_t i = 0; i < logits.size(); ++i)
        if (mask[i]) z += std::exp(logits[i] - hi);
    const double logz = hi + std::log(z);
    for (size_t i = 0; i < logits.size(); ++i) {
        if (!mask[i]) continue;
        logp[i] = logits[i] - logz;
        prob[i] = std::exp(logp[i]);
    }
}

}  // namespace

PolicyValueNet::PolicyValueNet(NetConfig cfg, uint64_t seed) : cfg_(cfg) {
    if (cfg.feature_dim <= 0 || cfg.num_groups <= 0 || cfg.max_devices <= 0 || cfg.hidden <= 0)
        throw std::invalid_argument("PolicyValueNet: all dimensions must be positive");
    const size_t F = static_cast<size_t>(cfg.feature_dim);
    const size_t H = static_cast<size_t>(cfg.hidden);
    const size_t K = static_cast<size_t>(cfg.num_groups);
    const size_t N = static_cast<size_t>(cfg.max_devices);

    size_t offset = 0;
    auto add = [&](const std::string& name, size_t rows, size_t cols, bool actor, bool critic) {
        tensors_.push_back({name, offset, rows, cols, actor, critic});
        offset += tensors_.back().size();
    };
    add("trunk.w1", H, F, true, true);
    add("trunk.b1", H, 0, true, true);
    add("trunk.w2", H, H, true, true);
    add("trunk.b2", H, 0, true, true);
    add("dg.w", K, H, true, false);
    add("dg.b", K, 0, true, false);
    add("offload.w", N, H, true, false);
    add("offload.b", N, 0, true, false);
    add("cache.w", N, H, true, false);
    add("cache.b", N, 0, true, false);
    add("bw.w", N + 1, H, true, false);
    add("bw.b", N + 1, 0, true, false);
    add("comp.w", N + 1, H, true, false);
    add("comp.b", N + 1, 0, true, false);
    add("value.w", 1, H, false, true);
    add("value.b", 1, 0, false, true);
    params_.assign(offset, 0.0);

    Rng rng(seed);
    for (const auto& t : tensors_) {
        if (t.cols == 0) continue;  // biases start at zero
        const double scale = (t.name.rfind("trunk", 0) == 0 ? 1.0 : 0.01) /
                             std::sqrt(static_cast<double>(t.cols));
        for (size_t i = 0; i < t.size(); ++i)
            params_[t.offset + i] = rng.uniform(-scale, scale);
    }
}

namespace {

// y = W x + b given flat storage
void affine(std::span<const double> p, const TensorInfo& w, const TensorInfo& b,
            std::span<const double> x, std::vector<double>& y) {
    y.assign(w.rows, 0.0);
    for (size_t r = 0; r < w.rows; ++r) {
        double acc = p[b.offset + r];
        const double* row = p.data() + w.offset + r * w.cols;
        for (size_t c = 0; c < w.cols; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
}

}  // namespace

PolicyValueNet::Trace PolicyValueNet::forward_trace(std::span<const double> features) const {
    if (static_cast<int>(features.size()) != cfg_.feature_dim)
        throw std::invalid_argument("forward: feature length mismatch");
    Trace t;
    t.input.assign(features.begin(), features.end());
    affine(params_, tensors_[0], tensors_[1], t.input, t.h1);
    for (auto& v : t.h1) v = std::tanh(v);
    affine(params_, tensors_[2], tensors_[3], t.h1, t.h2);
    for (auto& v : t.h2) v = std::tanh(v);
    affine(params_, tensors_[4], tensors_[5], t.h2, t.heads.dg_logits);
    affine(params_, tensors_[6], tensors_[7], t.h2, t.heads.offload_logits);
    affine(params_, tensors_[8], tensors_[9], t.h2, t.heads.cache_logits);
    affine(params_, tensors_[10], tensors_[11], t.h2, t.heads.bw_logits);
    affine(params_, tensors_[12], tensors_[13], t.h2, t.heads.comp_logits);
    std::vector<double> v;
    affine(params_, tensors_[14], tensors_[15], t.h2, v);
    t.heads.value = v[0];
    return t;
}

Heads PolicyValueNet::forward(std::span<const double> features) const {
    return forward_trace(features).heads;
}

void PolicyValueNet::backward(const Trace& t, const Heads& hg, bool into_actor_heads,
                              double dvalue, std::span<double> grad) const {
    const size_t H = static_cast<size_t>(cfg_.hidden);
    std::vector<double> dh2(H, 0.0);

    auto head_back = [&](const TensorInfo& w, const TensorInfo& b, std::span<const double> g) {
        for (size_t r = 0; r < w.rows; ++r) {
            if (g[r] == 0.0) continue;
            grad[b.offset + r] += g[r];
            double* wrow = grad.data() + w.offset + r * w.cols;
            const double* prow = params_.data() + w.offset + r * w.cols;
            for (size_t c = 0; c < w.cols; ++c) {
                wrow[c] += g[r] * t.h2[c];
                dh2[c] += prow[c] * g[r];
            }
        }
    };
    if (into_actor_heads) {
        head_back(tensors_[4], tensors_[5], hg.dg_logits);
        head_back(tensors_[6], tensors_[7], hg.offload_logits);
        head_back(tensors_[8], tensors_[9], hg.cache_logits);
        head_back(tensors_[10], tensors_[11], hg.bw_logits);
        head_back(tensors_[12], tensors_[13], hg.comp_logits);
    }
    if (dvalue != 0.0) {
        const std::vector<double> gv{dvalue};
        head_back(tensors_[14], tensors_[15], gv);
    }

    // trunk layer 2
    std::vector<double> dz2(H);
    for (size_t i = 0; i < H; ++i) dz2[i] = dh2[i] * (1.0 - t.h2[i] * t.h2[i]);
    const TensorInfo& w2 = tensors_[2];
    std::vector<double> dh1(H, 0.0);
    for (size_t r = 0; r < H; ++r) {
        if (dz2[r] == 0.0) continue;
        grad[tensors_[3].offset + r] += dz2[r];
        double* wrow = grad.data() + w2.offset + r * w2.cols;
        const double* prow = params_.data() + w2.offset + r * w2.cols;
        for (size_t c = 0; c < H; ++c) {
            wrow[c] += dz2[r] * t.h1[c];
            dh1[c] += prow[c] * dz2[r];
        }
    }

    // trunk layer 1
    const size_t F = static_cast<size_t>(cfg_.feature_dim);
    const TensorInfo& w1 = tensors_[0];
    for (size_t r = 0; r < H; ++r) {
        const double dz1 = dh1[r] * (1.0 - t.h1[r] * t.h1[r]);
        if (dz1 == 0.0) continue;
        grad[tensors_[1].offset + r] += dz1;
        double* wrow = grad.data() + w1.offset + r * w1.cols;
        for (size_t c = 0; c < F; ++c) wrow[c] += dz1 * t.input[c];
    }
}

SampledStep sample_action(const PolicyValueNet& net, const Heads& heads,
                          std::span<const double> features, std::span<const uint8_t> unserved,
                          std::span<const int> device_counts, Rng& rng, bool greedy,
                          double explore_temp) {
    const NetConfig& cfg = net.config();
    const size_t N = static_cast<size_t>(cfg.max_devices);
    SampledStep step;
    Transition& tr = step.transition;
    tr.features.assign(features.begin(), features.end());
    tr.unserved.assign(unserved.begin(), unserved.end());

    // next group: masked categorical
    std::vector<double> logp, prob;
    masked_log_softmax(heads.dg_logits, unserved, logp, prob);
    int dg = -1;
    if (greedy) {
        double best = -1e300;
        for (size_t k = 0; k < prob.size(); ++k)
            if (unserved[k] && heads.dg_logits[k] > best) {
                best = heads.dg_logits[k];
                dg = static_cast<int>(k);
            }
    } else {
        double u = rng.uniform();
        for (size_t k = 0; k < prob.size(); ++k) {
            if (!unserved[k]) continue;
            u -= prob[k];
            dg = static_cast<int>(k);
            if (u <= 0) break;
        }
    }
    tr.dg = dg;
    step.action.next_dg = dg;
    tr.device_count = device_counts[static_cast<size_t>(dg)];

    // The cache bit is drawn first: a set bit implies offloading, so cached
    // offloading explores independently of the plain-offload head instead of
    // hiding behind it.
    const size_t nk = static_cast<size_t>(tr.device_count);
    tr.offload.assign(nk, 0);
    tr.cache.assign(nk, 0);
    step.action.offload.assign(N, 0);
    step.action.cache.assign(N, 0);
    for (size_t i = 0; i < nk; ++i) {
        const double ph = sigmoid(heads.cache_logits[i]);
        const bool h = greedy ? ph > 0.5 : rng.bernoulli(ph);
        tr.cache[i] = h;
        step.action.cache[i] = h;
        bool o = h;
        if (!h) {
            const double po = sigmoid(heads.offload_logits[i]);
            o = greedy ? po > 0.5 : rng.bernoulli(po);
        }
        tr.offload[i] = o;
        step.action.offload[i] = o;
    }

    // budget shares: noisy softmax over the eligible slots plus idle
    auto allocate = [&](const std::vector<double>& logits, const std::vector<uint8_t>& mask,
                        std::vector<double>& weights) {
        weights.assign(N + 1, 0.0);
        int members = 0;
        for (uint8_t m : mask) members += m;
        if (members <= 1) return;  // only the idle slot: nothing to allocate
        std::vector<double> z(logits);
        if (!greedy)
            for (size_t i = 0; i < z.size(); ++i)
                if (mask[i]) {
                    const double u = std::max(1e-12, rng.uniform());
                    z[i] += explore_temp * -std::log(-std::log(u));  // Gumbel noise
                }
        std::vector<double> lp, p;
        masked_log_softmax(z, mask, lp, p);
        weights = p;
    };
    tr.bw_mask.assign(N + 1, 0);
    tr.comp_mask.assign(N + 1, 0);
    for (size_t i = 0; i < nk; ++i) {
        if (tr.offload[i] && !tr.cache[i]) tr.bw_mask[i] = 1;
        if (tr.offload[i]) tr.comp_mask[i] = 1;
    }
    tr.bw_mask[N] = 1;
    tr.comp_mask[N] = 1;
    allocate(heads.bw_logits, tr.bw_mask, tr.bw_weights);
    allocate(heads.comp_logits, tr.comp_mask, tr.comp_weights);

    step.action.bandwidth.assign(N, 0.0);
    step.action.compute.assign(N, 0.0);
    for (size_t i = 0; i < N; ++i) {
        step.action.bandwidth[i] = tr.bw_weights[i];
        step.action.compute[i] = tr.comp_weights[i];
    }
    return step;
}

std::vector<double> k_step_returns(std::span<const double> rewards, double bootstrap,
                                   double discount) {
    std::vector<double> returns(rewards.size(), 0.0);
    double acc = bootstrap;
    for (size_t i = rewards.size(); i-- > 0;) {
        acc = rewards[i] + discount * acc;
        returns[i] = acc;
    }
    return returns;
}

namespace {

struct StepTerms {
    double logp = 0.0;
    double entropy = 0.0;
};

// Per-step log-probability and entropy, with optional gradient accumulation
// into head-logit slots scaled by (advantage, entropy_weight).
StepTerms step_terms(const Heads& heads, const Transition& tr, double advantage,
                     double entropy_weight, Heads* grads) {
    StepTerms out;
    const size_t nk = static_cast<size_t>(tr.device_count);

    std::vector<double> logp, prob;
    masked_log_softmax(heads.dg_logits, tr.unserved, logp, prob);
    out.logp += logp[static_cast<size_t>(tr.dg)];
    double h_cat = 0.0;
    for (size_t k = 0; k < prob.size(); ++k)
        if (tr.unserved[k] && prob[k] > 0) h_cat -= prob[k] * logp[k];
    out.entropy += h_cat;
    if (grads) {
        for (size_t k = 0; k < prob.size(); ++k) {
            if (!tr.unserved[k]) continue;
            const double indicator = (static_cast<int>(k) == tr.dg) ? 1.0 : 0.0;
            grads->dg_logits[k] += advantage * (indicator - prob[k]);
            grads->dg_logits[k] += entropy_weight * (-prob[k] * (logp[k] + h_cat));
        }
    }

    auto bernoulli_terms = [&](const std::vector<double>& logits, std::vector<double>* glogits,
                               auto include, auto bit) {
        for (size_t i = 0; i < nk; ++i) {
            if (!include(i)) continue;
            const double p = clamp_prob(sigmoid(logits[i]));
            const double b = bit(i) ? 1.0 : 0.0;
            out.logp += b * std::log(p) + (1.0 - b) * std::log(1.0 - p);
            const double h = -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
            out.entropy += h;
            if (glogits) {
                (*glogits)[i] += advantage * (b - p);
                (*glogits)[i] += entropy_weight * p * (1.0 - p) * std::log((1.0 - p) / p);
            }
        }
    };
    bernoulli_terms(heads.cache_logits, grads ? &grads->cache_logits : nullptr,
                    [&](size_t) { return true; }, [&](size_t i) { return tr.cache[i] != 0; });
    bernoulli_terms(heads.offload_logits, grads ? &grads->offload_logits : nullptr,
                    [&](size_t i) { return tr.cache[i] == 0; },
                    [&](size_t i) { return tr.offload[i] != 0; });

    // Simplex heads: cross-entropy of the realized shares against the head
    // softmax stands in for the continuous log-density; entropy is the head
    // softmax entropy.
    auto simplex_terms = [&](const std::vector<double>& logits, const std::vector<uint8_t>& mask,
                             const std::vector<double>& weights, std::vector<double>* glogits) {
        int members = 0;
        for (uint8_t m : mask) members += m;
        if (members <= 1) return;
        std::vector<double> lp, p;
        masked_log_softmax(logits, mask, lp, p);
        double h = 0.0;
        for (size_t i = 0; i < p.size(); ++i)
            if (mask[i] && p[i] > 0) h -= p[i] * lp[i];
        for (size_t i = 0; i < p.size(); ++i) {
            if (!mask[i]) continue;
            out.logp += weights[i] * lp[i];
            if (glogits) {
                (*glogits)[i] += advantage * (weights[i] - p[i]);
                (*glogits)[i] += entropy_weight * (-p[i] * (lp[i] + h));
            }
        }
        out.entropy += h;
    };
    simplex_terms(heads.bw_logits, tr.bw_mask, tr.bw_weights, grads ? &grads->bw_logits : nullptr);
    simplex_terms(heads.comp_logits, tr.comp_mask, tr.comp_weights,
                  grads ? &grads->comp_logits : nullptr);
    return out;
}

Heads zero_heads(const NetConfig& cfg) {
    Heads h;
    h.dg_logits.assign(static_cast<size_t>(cfg.num_groups), 0.0);
    h.offload_logits.assign(static_cast<size_t>(cfg.max_devices), 0.0);
    h.cache_logits.assign(static_cast<size_t>(cfg.max_devices), 0.0);
    h.bw_logits.assign(static_cast<size_t>(cfg.max_devices) + 1, 0.0);
    h.comp_logits.assign(static_cast<size_t>(cfg.max_devices) + 1, 0.0);
    return h;
}

void check_finite(const std::vector<double>& v, const char* head) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::runtime_error(std::string("non-finite gradient in ") + head);
}

}  // namespace

RolloutGrads losses_and_grads(const PolicyValueNet& net, std::span<const Transition> rollout,
                              double bootstrap, double discount, double entropy_weight) {
    RolloutGrads out;
    out.actor.assign(net.param_count(), 0.0);
    out.critic.assign(net.param_count(), 0.0);

    std::vector<double> rewards;
    for (const auto& tr : rollout) rewards.push_back(tr.reward);
    out.returns = k_step_returns(rewards, bootstrap, discount);

    for (size_t t = 0; t < rollout.size(); ++t) {
        const auto trace = net.forward_trace(rollout[t].features);
        const double advantage = out.returns[t] - trace.heads.value;
        out.advantages.push_back(advantage);

        Heads hg = zero_heads(net.config());
        const StepTerms terms =
            step_terms(trace.heads, rollout[t], advantage, entropy_weight, &hg);
        check_finite(hg.dg_logits, "next-group head");
        check_finite(hg.offload_logits, "offload head");
        check_finite(hg.cache_logits, "cache head");
        check_finite(hg.bw_logits, "bandwidth head");
        check_finite(hg.comp_logits, "compute head");
        net.backward(trace, hg, true, 0.0, out.actor);

        // critic: d/dtheta (R - V)^2 through the value path only
        const double dv = -2.0 * advantage;
        if (!std::isfinite(dv)) throw std::runtime_error("non-finite gradient in value head");
        net.backward(trace, hg, false, dv, out.critic);

        out.value_loss += advantage * advantage;
        out.entropy += terms.entropy;
    }
    if (!rollout.empty()) {
        out.value_loss /= static_cast<double>(rollout.size());
        out.entropy /= static_cast<double>(rollout.size());
    }
    check_finite(out.actor, "actor parameters");
    check_finite(out.critic, "critic parameters");
    return out;
}

double actor_objective(const PolicyValueNet& net, std::span<const Transition> rollout,
                       std::span<const double> advantages, double entropy_weight) {
    double obj = 0.0;
    for (size_t t = 0; t < rollout.size(); ++t) {
        const auto heads = net.forward(rollout[t].features);
        const StepTerms terms = step_terms(heads, rollout[t], 0.0, 0.0, nullptr);
        obj += terms.logp * advantages[t] + entropy_weight * terms.entropy;
    }
    return obj;
}

double critic_objective(const PolicyValueNet& net, std::span<const Transition> rollout,
                        std::span<const double> returns) {
    double obj = 0.0;
    for (size_t t = 0; t < rollout.size(); ++t) {
        const auto heads = net.forward(rollout[t].features);
        const double adv = returns[t] - heads.value;
        obj += adv * adv;
    }
    return obj;
}

void rmsprop_apply(std::span<double> params, std::span<const double> grads,
                   std::span<double> accum, double momentum, double learning_rate, double eps) {
    if (params.size() != grads.size() || params.size() != accum.size())
        throw std::invalid_argument("rmsprop_apply: size mismatch");
    for (size_t i = 0; i < params.size(); ++i) {
        accum[i] = momentum * accum[i] + (1.0 - momentum) * grads[i] * grads[i];
        params[i] -= learning_rate * grads[i] / std::sqrt(accum[i] + eps);
    }
}

void PolicyValueNet::save_checkpoint(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << "mtuc-net v1\n";
    out << cfg_.feature_dim << " " << cfg_.num_groups << " " << cfg_.max_devices << " "
        << cfg_.hidden << " " << params_.size() << "\n";
    out.precision(17);
    for (double p : params_) out << p << "\n";
}

PolicyValueNet PolicyValueNet::load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    std::string magic, version;
    in >> magic >> version;
    if (magic != "mtuc-net" || version != "v1")
        throw std::runtime_error("unrecognized checkpoint header in " + path);
    NetConfig cfg;
    size_t count = 0;
    in >> cfg.feature_dim >> cfg.num_groups >> cfg.max_devices >> cfg.hidden >> count;
    PolicyValueNet net(cfg, 0);
    if (net.param_count() != count)
        throw std::runtime_error("checkpoint parameter count mismatch in " + path);
    for (size_t i = 0; i < count; ++i)
        if (!(in >> net.params_[i])) throw std::runtime_error("truncated checkpoint: " + path);
    return net;
}

}  // namespace mtuc
