#include "mtuc/economics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mtuc/acoustics.hpp"
#include "mtuc/ocean.hpp"

namespace mtuc {

DecisionSet make_local_decisions(const Scenario& s, RoutePlan plan) {
    DecisionSet d;
    const size_t n = static_cast<size_t>(s.total_devices());
    d.offload.assign(n, 0);
    d.cache.assign(n, 0);
    d.bandwidth.assign(n, 0.0);
    d.compute.assign(n, 0.0);
    d.plan = std::move(plan);
    return d;
}

GroupLink group_link(const Scenario& s, int group) {
    const Vec3 hover = s.hover_point(group);
    const NoiseBreakdown noise =
        noise_psd(s.constants.freq_khz, s.constants.shipping, s.constants.wind_ms);
    const double snr_as = snr_lb_auv_station(hover, s.geometry, noise, s.constants);
    const double rate_as = rate_auv_to_station(snr_as, s.constants, s.geometry);
    GroupLink link;
    for (const Device& dev : s.groups[static_cast<size_t>(group)].devices) {
        DeviceLink dl;
        dl.snr_device_to_auv = snr_lb_device_auv(
            link_geometry_device_auv(dev.pos, hover, s.geometry), noise, s.constants);
        dl.snr_auv_to_station = snr_as;
        dl.rate_auv_to_station_bps = rate_as;
        link.devices.push_back(dl);
    }
    return link;
}

std::string ProfitBreakdown::csv_header() {
    return "scenario_id,algo,seed,revenue,task_cost,movement_cost,penalty,profit";
}

std::string ProfitBreakdown::csv_row(const std::string& scenario_id, const std::string& algo,
                                     uint64_t seed) const {
    std::ostringstream out;
    out.precision(12);
    out << scenario_id << "," << algo << "," << seed << "," << revenue << "," << task_cost << ","
        << movement_cost << "," << fairness_penalty << "," << profit;
    return out.str();
}

namespace {

void check_sizes(const Scenario& s, const DecisionSet& d) {
    const size_t n = static_cast<size_t>(s.total_devices());
    if (d.offload.size() != n || d.cache.size() != n || d.bandwidth.size() != n ||
        d.compute.size() != n)
        throw std::invalid_argument("decision vectors must have one entry per device");
}

}  // namespace

AuditReport audit(const Scenario& s, const DecisionSet& d) {
    check_sizes(s, d);
    AuditReport report;
    auto add = [&](const std::string& id, bool ok, const std::string& detail) {
        report.constraints.push_back({id, ok, ok ? "" : detail});
        report.ok = report.ok && ok;
    };
    auto list = [](const std::vector<int>& idx) {
        std::string out;
        for (int i : idx) out += (out.empty() ? "" : " ") + std::to_string(i);
        return out;
    };

    const int K = s.num_groups();
    std::vector<int> bad_r_off, bad_r_cached, bad_f_off, bad_h;
    std::vector<int> bad_r_sum, bad_f_sum;
    for (int k = 0; k < K; ++k) {
        const int off = s.device_offset(k);
        const int nk = static_cast<int>(s.groups[static_cast<size_t>(k)].devices.size());
        double r_sum = 0.0, f_sum = 0.0;
        for (int i = 0; i < nk; ++i) {
            const size_t idx = static_cast<size_t>(off + i);
            if (!d.offload[idx] && d.bandwidth[idx] != 0.0) bad_r_off.push_back(off + i);
            if (d.cache[idx] && d.bandwidth[idx] != 0.0) bad_r_cached.push_back(off + i);
            if (!d.offload[idx] && d.compute[idx] != 0.0) bad_f_off.push_back(off + i);
            if (d.cache[idx] && !d.offload[idx]) bad_h.push_back(off + i);
            if (d.offload[idx] && !d.cache[idx]) r_sum += d.bandwidth[idx];
            if (d.offload[idx]) f_sum += d.compute[idx];
        }
        if (r_sum > 1.0 + 1e-9) bad_r_sum.push_back(k);
        if (f_sum > 1.0 + 1e-9) bad_f_sum.push_back(k);
    }
    add("63b", bad_r_off.empty(), "bandwidth without offload at device(s) " + list(bad_r_off));
    add("63c", bad_r_cached.empty(), "bandwidth on cached task(s) " + list(bad_r_cached));
    add("63d", bad_r_sum.empty(), "group bandwidth sum exceeds 1 in group(s) " + list(bad_r_sum));
    add("63e", bad_f_off.empty(), "compute without offload at device(s) " + list(bad_f_off));

    const auto plan_check = validate_plan(d.plan, s.num_auvs, K);
    add("63f", plan_check.ok,
        plan_check.ok ? "" : "route coverage: " + plan_check.violations.front());
    add("63g", bad_f_sum.empty(), "group compute sum exceeds 1 in group(s) " + list(bad_f_sum));

    std::vector<Task> tasks;
    for (const auto& g : s.groups)
        for (const auto& dev : g.devices) tasks.push_back(dev.task);
    const auto cap = cache_capacity_check(d.cache, tasks, s.constants.storage_cap_bits);
    add("63h", cap.ok, "cached bits exceed storage by " + std::to_string(cap.over_bits));

    // Cycles start and end at the anchor and hop counts match the sequence
    // lengths by construction of the sequence representation.
    add("63i", true, "");
    add("63j", true, "");
    add("63k", plan_check.ok, plan_check.ok ? "" : "total hop count != K");

    if (plan_check.ok) {
        std::vector<double> service(static_cast<size_t>(K), 0.0);
        bool finite = true;
        ProfitBreakdown pb;
        try {
            pb = evaluate(s, d, {.strict = false});
            service = [&] {
                std::vector<double> t(static_cast<size_t>(K));
                for (int k = 0; k < K; ++k) t[static_cast<size_t>(k)] = pb.per_dg[static_cast<size_t>(k)].service_time_s;
                return t;
            }();
        } catch (const std::exception&) {
            finite = false;
        }
        if (finite) {
            const auto timing = route_timing(d.plan, service, s);
            add("63l", timing.fairness_gap_s <= s.constants.fairness_eps_s + 1e-9,
                "fairness gap " + std::to_string(timing.fairness_gap_s) + " s exceeds " +
                    std::to_string(s.constants.fairness_eps_s) + " s");
        } else {
            add("63l", false, "service times undefined (offloaded task with no usable rate or share)");
        }
    } else {
        add("63l", false, "fairness unchecked: infeasible plan");
    }

    add("63m", bad_h.empty(), "cache without offload at device(s) " + list(bad_h));
    return report;
}

std::string AuditReport::summary() const {
    std::string out;
    for (const auto& c : constraints)
        if (!c.ok) out += (out.empty() ? "" : "; ") + c.id + ": " + c.detail;
    return out.empty() ? "all constraints satisfied" : out;
}

ProfitBreakdown evaluate(const Scenario& s, const DecisionSet& d, const EvalOptions& opt) {
    check_sizes(s, d);
    const auto plan_check = validate_plan(d.plan, s.num_auvs, s.num_groups());
    if (!plan_check.ok)
        throw std::invalid_argument("evaluate: infeasible plan: " + plan_check.violations.front());

    const int K = s.num_groups();
    ProfitBreakdown pb;
    pb.per_dg.resize(static_cast<size_t>(K));
    std::vector<double> service_times(static_cast<size_t>(K), 0.0);

    for (int k = 0; k < K; ++k) {
        const auto& group = s.groups[static_cast<size_t>(k)];
        const GroupLink link = group_link(s, k);
        const int off = s.device_offset(k);
        std::vector<TaskOutcome> outcomes;
        double revenue = 0.0, cost = 0.0;
        for (size_t i = 0; i < group.devices.size(); ++i) {
            const size_t idx = static_cast<size_t>(off) + i;
            const Device& dev = group.devices[i];
            const TaskOutcome out =
                task_outcome(dev.task, dev, d.offload[idx] != 0, d.cache[idx] != 0,
                             d.bandwidth[idx], d.compute[idx], link.devices[i], s.constants,
                             s.geometry);
            outcomes.push_back(out);
            if (out.offloaded) {
                const auto [t_local, e_local] = local_outcome(dev.task, dev, s.constants);
                const double time_saved = t_local - out.total_time_s;
                const double energy_saved = e_local - out.device_energy_j;
                revenue += dev.time_value * time_saved + dev.energy_value * energy_saved;
                cost += s.constants.cost_station * out.station_energy_j +
                        s.constants.cost_auv * out.auv_tx_energy_j;
            }
        }
        service_times[static_cast<size_t>(k)] = dg_service_time(outcomes);
        pb.per_dg[static_cast<size_t>(k)] = {revenue, cost, service_times[static_cast<size_t>(k)]};
        pb.revenue += revenue;
        pb.task_cost += cost;
    }

    pb.per_auv_energy_j = route_energy(d.plan, service_times, s);
    pb.movement_cost =
        s.constants.cost_auv * std::accumulate(pb.per_auv_energy_j.begin(), pb.per_auv_energy_j.end(), 0.0);

    const auto timing = route_timing(d.plan, service_times, s);
    pb.fairness_gap_s = timing.fairness_gap_s;
    if (opt.strict) {
        const auto report = audit(s, d);
        if (!report.ok)
            throw std::invalid_argument("evaluate (strict): " + report.summary());
    } else {
        pb.fairness_penalty = opt.fairness_penalty_per_s *
                              std::max(0.0, timing.fairness_gap_s - s.constants.fairness_eps_s);
    }
    pb.profit = pb.revenue - pb.task_cost - pb.movement_cost - pb.fairness_penalty;
    return pb;
}

DecisionSet project_to_feasible(const Scenario& s, DecisionSet d) {
    check_sizes(s, d);
    const int K = s.num_groups();

    for (size_t i = 0; i < d.offload.size(); ++i) {
        if (!d.offload[i]) d.cache[i] = 0;            // h <= o
        if (!d.offload[i]) {                          // no resources without offload
            d.bandwidth[i] = 0.0;
            d.compute[i] = 0.0;
        }
        if (d.cache[i]) d.bandwidth[i] = 0.0;         // cached tasks skip the uplink
        d.bandwidth[i] = std::max(0.0, d.bandwidth[i]);
        d.compute[i] = std::max(0.0, d.compute[i]);
    }

    // Offloads that could never move data roll back to local execution.
    for (int k = 0; k < K; ++k) {
        const GroupLink link = group_link(s, k);
        const int off = s.device_offset(k);
        const int nk = static_cast<int>(s.groups[static_cast<size_t>(k)].devices.size());
        for (int i = 0; i < nk; ++i) {
            const size_t idx = static_cast<size_t>(off + i);
            if (!d.offload[idx] || d.cache[idx]) continue;
            if (link.devices[static_cast<size_t>(i)].snr_device_to_auv <= 0.0 ||
                link.devices[static_cast<size_t>(i)].rate_auv_to_station_bps <= 0.0 ||
                d.bandwidth[idx] <= 0.0) {
                d.offload[idx] = 0;
                d.bandwidth[idx] = 0.0;
                d.compute[idx] = 0.0;
            }
        }
    }

    // Per-group allocation budgets.
    for (int k = 0; k < K; ++k) {
        const int off = s.device_offset(k);
        const int nk = static_cast<int>(s.groups[static_cast<size_t>(k)].devices.size());
        double r_sum = 0.0, f_sum = 0.0;
        for (int i = 0; i < nk; ++i) {
            const size_t idx = static_cast<size_t>(off + i);
            if (d.offload[idx] && !d.cache[idx]) r_sum += d.bandwidth[idx];
            if (d.offload[idx]) f_sum += d.compute[idx];
        }
        if (r_sum > 1.0) {
            for (int i = 0; i < nk; ++i) d.bandwidth[static_cast<size_t>(off + i)] /= r_sum;
        }
        if (f_sum > 1.0) {
            for (int i = 0; i < nk; ++i) d.compute[static_cast<size_t>(off + i)] /= f_sum;
        }
    }

    // Storage cap: evict the least valuable cached bits first. An evicted
    // task goes back to local execution so the decision stays finite-profit.
    std::vector<Task> tasks;
    std::vector<double> density;
    for (const auto& g : s.groups) {
        for (const auto& dev : g.devices) {
            tasks.push_back(dev.task);
            const auto [t_local, e_local] = local_outcome(dev.task, dev, s.constants);
            density.push_back((dev.time_value * t_local + dev.energy_value * e_local) /
                              dev.task.data_bits);
        }
    }
    auto cap = cache_capacity_check(d.cache, tasks, s.constants.storage_cap_bits);
    if (!cap.ok) {
        std::vector<size_t> cached;
        for (size_t i = 0; i < d.cache.size(); ++i)
            if (d.cache[i]) cached.push_back(i);
        std::sort(cached.begin(), cached.end(), [&](size_t a, size_t b) {
            if (density[a] != density[b]) return density[a] < density[b];
            return a < b;
        });
        double used = cap.used_bits;
        for (size_t idx : cached) {
            if (used <= s.constants.storage_cap_bits) break;
            d.cache[idx] = 0;
            d.offload[idx] = 0;
            d.bandwidth[idx] = 0.0;
            d.compute[idx] = 0.0;
            used -= tasks[idx].data_bits;
        }
    }
    return d;
}

}  // namespace mtuc
