#include "mtuc/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mtuc/ocean.hpp"
#include "mtuc/service.hpp"

namespace mtuc {

namespace {
// Budget shares below this are treated as no allocation; the task runs
// locally instead of queueing behind a vanishing link or compute sliver.
constexpr double kMinShare = 0.02;
}  // namespace

Env::Env(Scenario scenario, EnvOptions opt) : scenario_(std::move(scenario)), opt_(opt) {
    validate(scenario_);
    max_devices_ = scenario_.max_devices_per_group();
    const int K = num_groups();
    device_counts_.resize(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k)
        device_counts_[static_cast<size_t>(k)] =
            static_cast<int>(scenario_.groups[static_cast<size_t>(k)].devices.size());

    links_.reserve(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k) links_.push_back(group_link(scenario_, k));

    const FlowField field(scenario_);
    hover_power_.resize(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k)
        hover_power_[static_cast<size_t>(k)] =
            hover_power_w(field, scenario_.hover_point(k), scenario_.constants);

    // Waypoint set: the station anchor plus one hover point per group. All
    // cruise segments of an episode connect two waypoints.
    std::vector<Vec3> pts;
    pts.push_back(scenario_.station_anchor());
    for (int k = 0; k < K; ++k) pts.push_back(scenario_.hover_point(k));
    const size_t n = pts.size();
    seg_energy_.assign(n, std::vector<double>(n, 0.0));
    seg_time_.assign(n, std::vector<double>(n, 0.0));
    for (size_t a = 0; a < n; ++a) {
        for (size_t b = 0; b < n; ++b) {
            if (a == b || distance(pts[a], pts[b]) <= 0.0) continue;
            const auto e = segment_effort(field, pts[a], pts[b], scenario_.constants);
            seg_energy_[a][b] = e.energy_j();
            seg_time_[a][b] = e.time_s;
        }
    }

    pos_scale_ = 1.0;
    for (const auto& p : pts) pos_scale_ = std::max({pos_scale_, std::abs(p.x), std::abs(p.y)});
    bits_scale_ = cycles_scale_ = cpu_scale_ = 1.0;
    double worst_service = 0.0;
    for (const auto& g : scenario_.groups) {
        for (const auto& d : g.devices) {
            bits_scale_ = std::max(bits_scale_, d.task.data_bits);
            cycles_scale_ = std::max(cycles_scale_, d.task.cycles_per_bit);
            cpu_scale_ = std::max(cpu_scale_, d.cpu_hz);
            worst_service =
                std::max(worst_service, local_outcome(d.task, d, scenario_.constants).first);
        }
    }
    // Generous cycle-time bound: visiting every group on one tour plus the
    // slowest conceivable hovers; cycle features are clamped against it.
    time_scale_ = (2.0 * std::sqrt(2.0) * pos_scale_ * (K + 1)) / scenario_.constants.auv_speed_ms +
                  (worst_service + 60.0) * K;

    reset(0);
}

const std::vector<double>& Env::reset(uint64_t /*seed*/) {
    const int M = num_auvs();
    auv_at_.assign(static_cast<size_t>(M), 0);
    cycle_time_.assign(static_cast<size_t>(M), 0.0);
    served_.assign(static_cast<size_t>(num_groups()), 0);
    capacity_used_bits_ = 0.0;
    steps_ = 0;
    episode_profit_ = 0.0;
    decisions_ = make_local_decisions(scenario_, RoutePlan{});
    decisions_.plan.sequences.assign(static_cast<size_t>(M), {});
    rebuild_features();
    return features_;
}

double Env::segment_energy(int from, int to) const {
    return seg_energy_[static_cast<size_t>(from)][static_cast<size_t>(to)];
}

double Env::segment_time(int from, int to) const {
    return seg_time_[static_cast<size_t>(from)][static_cast<size_t>(to)];
}

std::vector<uint8_t> Env::unserved() const {
    std::vector<uint8_t> mask(served_.size());
    for (size_t k = 0; k < served_.size(); ++k) mask[k] = served_[k] ? 0 : 1;
    return mask;
}

Env::StepResult Env::step(const EnvAction& action) {
    const int K = num_groups();
    const int dg = action.next_dg;
    if (done()) throw std::invalid_argument("step: episode already finished");
    if (dg < 0 || dg >= K || served_[static_cast<size_t>(dg)])
        throw std::invalid_argument("step: next_dg " + std::to_string(dg) +
                                    " is out of range or already served");

    const auto& group = scenario_.groups[static_cast<size_t>(dg)];
    const int nk = static_cast<int>(group.devices.size());
    const GroupLink& link = links_[static_cast<size_t>(dg)];
    const Constants& c = scenario_.constants;

    // Project this group's decisions feasible.
    std::vector<uint8_t> o(static_cast<size_t>(nk), 0), h(static_cast<size_t>(nk), 0);
    std::vector<double> r(static_cast<size_t>(nk), 0.0), f(static_cast<size_t>(nk), 0.0);
    for (int i = 0; i < nk; ++i) {
        const size_t si = static_cast<size_t>(i);
        o[si] = i < static_cast<int>(action.offload.size()) ? action.offload[si] : 0;
        h[si] = (o[si] && i < static_cast<int>(action.cache.size())) ? action.cache[si] : 0;
        if (o[si]) {
            f[si] = i < static_cast<int>(action.compute.size()) ? std::max(0.0, action.compute[si]) : 0.0;
            if (!h[si])
                r[si] = i < static_cast<int>(action.bandwidth.size()) ? std::max(0.0, action.bandwidth[si]) : 0.0;
        }
        if (o[si] && f[si] <= kMinShare) {  // no usable station share: run locally
            o[si] = h[si] = 0;
            r[si] = f[si] = 0.0;
        }
        if (o[si] && !h[si] &&
            (r[si] <= kMinShare || link.devices[si].snr_device_to_auv <= 0.0 ||
             link.devices[si].rate_auv_to_station_bps <= 0.0)) {
            o[si] = 0;
            r[si] = f[si] = 0.0;
        }
    }
    double r_sum = 0.0, f_sum = 0.0;
    for (int i = 0; i < nk; ++i) {
        r_sum += r[static_cast<size_t>(i)];
        f_sum += f[static_cast<size_t>(i)];
    }
    if (r_sum > 1.0)
        for (auto& v : r) v /= r_sum;
    if (f_sum > 1.0)
        for (auto& v : f) v /= f_sum;

    // Storage cap on cached bits, least value per bit evicted first.
    double want = 0.0;
    for (int i = 0; i < nk; ++i)
        if (h[static_cast<size_t>(i)]) want += group.devices[static_cast<size_t>(i)].task.data_bits;
    if (capacity_used_bits_ + want > c.storage_cap_bits) {
        std::vector<int> cached;
        for (int i = 0; i < nk; ++i)
            if (h[static_cast<size_t>(i)]) cached.push_back(i);
        std::sort(cached.begin(), cached.end(), [&](int a, int b) {
            const auto& da = group.devices[static_cast<size_t>(a)];
            const auto& db = group.devices[static_cast<size_t>(b)];
            const double va = (da.time_value * local_outcome(da.task, da, c).first +
                               da.energy_value * local_outcome(da.task, da, c).second) /
                              da.task.data_bits;
            const double vb = (db.time_value * local_outcome(db.task, db, c).first +
                               db.energy_value * local_outcome(db.task, db, c).second) /
                              db.task.data_bits;
            if (va != vb) return va < vb;
            return a < b;
        });
        for (int i : cached) {
            if (capacity_used_bits_ + want <= c.storage_cap_bits) break;
            const size_t si = static_cast<size_t>(i);
            want -= group.devices[si].task.data_bits;
            h[si] = 0;
            o[si] = 0;
            r[si] = f[si] = 0.0;
        }
    }
    capacity_used_bits_ += want;

    // Task accounting for this group.
    std::vector<TaskOutcome> outcomes;
    double revenue = 0.0, cost = 0.0;
    for (int i = 0; i < nk; ++i) {
        const size_t si = static_cast<size_t>(i);
        const Device& dev = group.devices[si];
        const TaskOutcome out = task_outcome(dev.task, dev, o[si] != 0, h[si] != 0, r[si], f[si],
                                             link.devices[si], c, scenario_.geometry);
        outcomes.push_back(out);
        if (out.offloaded) {
            const auto [t_local, e_local] = local_outcome(dev.task, dev, c);
            revenue += dev.time_value * (t_local - out.total_time_s) +
                       dev.energy_value * (e_local - out.device_energy_j);
            cost += c.cost_station * out.station_energy_j + c.cost_auv * out.auv_tx_energy_j;
        }
    }
    const double service_time = dg_service_time(outcomes);

    // Movement: active AUV cruises to the hover point, then hovers for the
    // whole service time.
    const int j = active_auv();
    const int from = auv_at_[static_cast<size_t>(j)];
    const int to = dg + 1;
    const double move_energy = segment_energy(from, to);
    const double hover_energy = service_time * hover_power_[static_cast<size_t>(dg)];

    double reward = revenue - cost - c.cost_auv * (move_energy + hover_energy);

    // Commit.
    const int off = scenario_.device_offset(dg);
    for (int i = 0; i < nk; ++i) {
        const size_t idx = static_cast<size_t>(off + i);
        const size_t si = static_cast<size_t>(i);
        decisions_.offload[idx] = o[si];
        decisions_.cache[idx] = h[si];
        decisions_.bandwidth[idx] = r[si];
        decisions_.compute[idx] = f[si];
    }
    decisions_.plan.sequences[static_cast<size_t>(j)].push_back(dg);
    auv_at_[static_cast<size_t>(j)] = to;
    cycle_time_[static_cast<size_t>(j)] += segment_time(from, to) + service_time;
    served_[static_cast<size_t>(dg)] = 1;
    ++steps_;

    StepResult result;
    if (steps_ == static_cast<size_t>(K)) {
        for (int a = 0; a < num_auvs(); ++a) {
            const int at = auv_at_[static_cast<size_t>(a)];
            if (at == 0) continue;  // idle AUV never left the anchor
            reward -= c.cost_auv * segment_energy(at, 0);
            cycle_time_[static_cast<size_t>(a)] += segment_time(at, 0);
            auv_at_[static_cast<size_t>(a)] = 0;
        }
        const auto [lo, hi] = std::minmax_element(cycle_time_.begin(), cycle_time_.end());
        reward -= opt_.fairness_penalty_per_s * std::max(0.0, (*hi - *lo) - c.fairness_eps_s);
        result.done = true;
    }
    result.reward = reward;
    episode_profit_ += reward;
    rebuild_features();
    return result;
}

void Env::rebuild_features() {
    const int M = num_auvs();
    const int K = num_groups();
    features_.assign(static_cast<size_t>(feature_size()), 0.0);
    std::vector<Vec3> pts;
    pts.push_back(scenario_.station_anchor());
    for (int k = 0; k < K; ++k) pts.push_back(scenario_.hover_point(k));

    size_t at = 0;
    for (int j = 0; j < M; ++j) {
        const Vec3 p = pts[static_cast<size_t>(auv_at_[static_cast<size_t>(j)])];
        features_[at++] = p.x / pos_scale_;
        features_[at++] = p.y / pos_scale_;
        features_[at++] = p.z / scenario_.geometry.water_depth;
    }
    for (int j = 0; j < M; ++j)
        features_[at++] = std::min(1.0, cycle_time_[static_cast<size_t>(j)] / time_scale_);
    for (int j = 0; j < M; ++j) features_[at++] = (j == active_auv() && !done()) ? 1.0 : 0.0;
    for (int k = 0; k < K; ++k) {
        const auto& g = scenario_.groups[static_cast<size_t>(k)];
        double mean_bits = 0.0, mean_cycles = 0.0, mean_cpu = 0.0;
        for (const auto& d : g.devices) {
            mean_bits += d.task.data_bits;
            mean_cycles += d.task.cycles_per_bit;
            mean_cpu += d.cpu_hz;
        }
        const double n = static_cast<double>(g.devices.size());
        features_[at++] = served_[static_cast<size_t>(k)] ? 1.0 : 0.0;
        features_[at++] = g.centroid.x / pos_scale_;
        features_[at++] = g.centroid.y / pos_scale_;
        features_[at++] = n / static_cast<double>(max_devices_);
        features_[at++] = mean_bits / n / bits_scale_;
        features_[at++] = mean_cycles / n / cycles_scale_;
        features_[at++] = mean_cpu / n / cpu_scale_;
    }
    features_[at++] = 1.0 - capacity_used_bits_ / scenario_.constants.storage_cap_bits;
    features_[at++] = static_cast<double>(steps_) / static_cast<double>(K);
}

}  // namespace mtuc
