#include "mtuc/baselines.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "mtuc/ocean.hpp"
#include "mtuc/rng.hpp"
#include "mtuc/service.hpp"

namespace mtuc {

OffloadMode offload_mode_from(const std::string& name) {
    if (name == "full") return OffloadMode::Full;
    if (name == "none") return OffloadMode::None;
    if (name == "random") return OffloadMode::Random;
    if (name == "partial") return OffloadMode::Partial;
    throw std::invalid_argument("unknown offload mode: " + name);
}

CacheMode cache_mode_from(const std::string& name) {
    if (name == "full") return CacheMode::FullCapped;
    if (name == "none") return CacheMode::None;
    if (name == "random") return CacheMode::Random;
    if (name == "partial") return CacheMode::Partial;
    throw std::invalid_argument("unknown cache mode: " + name);
}

AllocMode alloc_mode_from(const std::string& name) {
    if (name == "equal") return AllocMode::Equal;
    if (name == "opt-bandwidth") return AllocMode::OptBandwidth;
    if (name == "opt-compute") return AllocMode::OptCompute;
    if (name == "opt-joint") return AllocMode::OptJoint;
    throw std::invalid_argument("unknown allocation mode: " + name);
}

RouteMode route_mode_from(const std::string& name) {
    if (name == "nearest") return RouteMode::NearestNeighbor;
    if (name == "random") return RouteMode::RandomOrder;
    if (name == "agnostic") return RouteMode::EnvAgnostic;
    if (name == "aware") return RouteMode::EnvAware;
    throw std::invalid_argument("unknown route mode: " + name);
}

namespace {

// ---- route planning -------------------------------------------------------

double tour_distance(const std::vector<int>& seq, const Scenario& s) {
    if (seq.empty()) return 0.0;
    Vec3 at = s.station_anchor();
    double d = 0.0;
    for (int k : seq) {
        d += distance(at, s.hover_point(k));
        at = s.hover_point(k);
    }
    return d + distance(at, s.station_anchor());
}

double tour_energy(const std::vector<int>& seq, const Scenario& s) {
    if (seq.empty()) return 0.0;
    const FlowField field(s);
    Vec3 at = s.station_anchor();
    double e = 0.0;
    for (int k : seq) {
        const Vec3 next = s.hover_point(k);
        if (distance(at, next) > 0) e += segment_effort(field, at, next, s.constants).energy_j();
        at = next;
    }
    if (distance(at, s.station_anchor()) > 0)
        e += segment_effort(field, at, s.station_anchor(), s.constants).energy_j();
    return e;
}

// Balanced contiguous arcs of the angular order around the station.
std::vector<std::vector<int>> partition_by_angle(const Scenario& s) {
    const int K = s.num_groups();
    const int M = s.num_auvs;
    std::vector<int> order(static_cast<size_t>(K));
    std::iota(order.begin(), order.end(), 0);
    const Vec3 st = s.station_anchor();
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const Vec3 pa = s.hover_point(a) - st;
        const Vec3 pb = s.hover_point(b) - st;
        const double aa = std::atan2(pa.y, pa.x);
        const double ab = std::atan2(pb.y, pb.x);
        if (aa != ab) return aa < ab;
        return a < b;
    });
    std::vector<std::vector<int>> parts(static_cast<size_t>(M));
    const int base = K / M;
    const int extra = K % M;
    size_t at = 0;
    for (int j = 0; j < M; ++j) {
        const int take = base + (j < extra ? 1 : 0);
        for (int i = 0; i < take; ++i) parts[static_cast<size_t>(j)].push_back(order[at++]);
    }
    return parts;
}

template <typename CostFn>
std::vector<int> best_tour(std::vector<int> stops, CostFn cost) {
    if (stops.size() <= 1) return stops;
    if (stops.size() <= 7) {
        std::sort(stops.begin(), stops.end());
        std::vector<int> best = stops;
        double best_cost = cost(stops);
        while (std::next_permutation(stops.begin(), stops.end())) {
            const double c = cost(stops);
            if (c < best_cost) {
                best_cost = c;
                best = stops;
            }
        }
        return best;
    }
    // nearest-neighbor seed then 2-opt with full-cost evaluation
    std::vector<int> tour;
    std::vector<int> left = stops;
    // seed greedily by cost of appending
    while (!left.empty()) {
        size_t pick = 0;
        double best_c = 1e300;
        for (size_t i = 0; i < left.size(); ++i) {
            std::vector<int> cand = tour;
            cand.push_back(left[i]);
            const double c = cost(cand);
            if (c < best_c) {
                best_c = c;
                pick = i;
            }
        }
        tour.push_back(left[pick]);
        left.erase(left.begin() + static_cast<long>(pick));
    }
    bool improved = true;
    double tour_cost = cost(tour);
    while (improved) {
        improved = false;
        for (size_t a = 0; a + 1 < tour.size(); ++a) {
            for (size_t b = a + 1; b < tour.size(); ++b) {
                std::vector<int> cand = tour;
                std::reverse(cand.begin() + static_cast<long>(a), cand.begin() + static_cast<long>(b) + 1);
                const double c = cost(cand);
                if (c + 1e-12 < tour_cost) {
                    tour = cand;
                    tour_cost = c;
                    improved = true;
                }
            }
        }
    }
    return tour;
}

RoutePlan planned_routes(const Scenario& s, bool energy_cost) {
    RoutePlan plan;
    for (auto& part : partition_by_angle(s)) {
        auto cost = [&](const std::vector<int>& seq) {
            return energy_cost ? tour_energy(seq, s) : tour_distance(seq, s);
        };
        plan.sequences.push_back(best_tour(std::move(part), cost));
    }
    return plan;
}

// ---- per-group decision value ----------------------------------------------

struct GroupDecision {
    std::vector<uint8_t> offload, cache;
    std::vector<double> bandwidth, compute;
};

struct GroupValue {
    double value = 0.0;  // revenue - task cost - hover energy cost
    double service_time_s = 0.0;
    double cached_bits = 0.0;
    bool finite = true;
};

GroupValue group_value(const Scenario& s, int dg, const GroupDecision& d, const GroupLink& link,
                       double hover_power) {
    const auto& group = s.groups[static_cast<size_t>(dg)];
    const Constants& c = s.constants;
    GroupValue out;
    std::vector<TaskOutcome> outcomes;
    for (size_t i = 0; i < group.devices.size(); ++i) {
        const Device& dev = group.devices[i];
        TaskOutcome to;
        try {
            to = task_outcome(dev.task, dev, d.offload[i] != 0, d.cache[i] != 0, d.bandwidth[i],
                              d.compute[i], link.devices[i], c, s.geometry);
        } catch (const std::exception&) {
            out.finite = false;
            return out;
        }
        outcomes.push_back(to);
        if (to.offloaded) {
            const auto [t_local, e_local] = local_outcome(dev.task, dev, c);
            out.value += dev.time_value * (t_local - to.total_time_s) +
                         dev.energy_value * (e_local - to.device_energy_j);
            out.value -= c.cost_station * to.station_energy_j + c.cost_auv * to.auv_tx_energy_j;
            if (to.cached) out.cached_bits += dev.task.data_bits;
        }
    }
    out.service_time_s = dg_service_time(outcomes);
    out.value -= c.cost_auv * out.service_time_s * hover_power;
    return out;
}

std::vector<double> group_hover_powers(const Scenario& s) {
    const FlowField field(s);
    std::vector<double> powers;
    for (int k = 0; k < s.num_groups(); ++k)
        powers.push_back(hover_power_w(field, s.hover_point(k), s.constants));
    return powers;
}

// Popularity of a device's content: how many devices in the whole scenario
// request the same content id.
std::vector<int> content_popularity(const Scenario& s) {
    std::map<int, int> counts;
    for (const auto& g : s.groups)
        for (const auto& d : g.devices) counts[d.task.content_id]++;
    std::vector<int> pop;
    for (const auto& g : s.groups)
        for (const auto& d : g.devices) pop.push_back(counts[d.task.content_id]);
    return pop;
}

}  // namespace

RoutePlan nearest_neighbor_plan(const Scenario& s) {
    const int K = s.num_groups();
    const int M = s.num_auvs;
    RoutePlan plan;
    plan.sequences.assign(static_cast<size_t>(M), {});
    std::vector<Vec3> at(static_cast<size_t>(M), s.station_anchor());
    std::vector<uint8_t> served(static_cast<size_t>(K), 0);
    for (int step = 0; step < K; ++step) {
        const int j = step % M;
        int pick = -1;
        double best = 1e300;
        for (int k = 0; k < K; ++k) {
            if (served[static_cast<size_t>(k)]) continue;
            const double d = distance(at[static_cast<size_t>(j)], s.hover_point(k));
            if (d < best) {
                best = d;
                pick = k;
            }
        }
        served[static_cast<size_t>(pick)] = 1;
        plan.sequences[static_cast<size_t>(j)].push_back(pick);
        at[static_cast<size_t>(j)] = s.hover_point(pick);
    }
    return plan;
}

RoutePlan random_order_plan(const Scenario& s, uint64_t seed) {
    const int K = s.num_groups();
    const int M = s.num_auvs;
    std::vector<int> order(static_cast<size_t>(K));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(Rng::derive(seed, 0x07de7));
    for (size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.uniform_int(i)]);
    RoutePlan plan;
    plan.sequences.assign(static_cast<size_t>(M), {});
    for (int i = 0; i < K; ++i) plan.sequences[static_cast<size_t>(i % M)].push_back(order[static_cast<size_t>(i)]);
    return plan;
}

RoutePlan env_agnostic_plan(const Scenario& s) { return planned_routes(s, false); }

RoutePlan env_aware_plan(const Scenario& s) { return planned_routes(s, true); }

DecisionSet optimize_allocations(const Scenario& s, DecisionSet d, bool opt_bandwidth,
                                 bool opt_compute) {
    const auto hover_powers = group_hover_powers(s);
    for (int k = 0; k < s.num_groups(); ++k) {
        const GroupLink link = group_link(s, k);
        const int off = s.device_offset(k);
        const size_t nk = s.groups[static_cast<size_t>(k)].devices.size();
        GroupDecision gd;
        gd.offload.resize(nk);
        gd.cache.resize(nk);
        gd.bandwidth.resize(nk);
        gd.compute.resize(nk);
        for (size_t i = 0; i < nk; ++i) {
            const size_t idx = static_cast<size_t>(off) + i;
            gd.offload[i] = d.offload[idx];
            gd.cache[i] = d.cache[idx];
            gd.bandwidth[i] = d.bandwidth[idx];
            gd.compute[i] = d.compute[idx];
        }
        std::vector<size_t> r_slots, f_slots;
        for (size_t i = 0; i < nk; ++i) {
            if (gd.offload[i] && !gd.cache[i]) r_slots.push_back(i);
            if (gd.offload[i]) f_slots.push_back(i);
        }
        auto value = [&]() { return group_value(s, k, gd, link, hover_powers[static_cast<size_t>(k)]); };
        double current = value().value;

        auto ascend = [&](std::vector<double>& shares, const std::vector<size_t>& slots,
                          bool allow_slack) {
            if (slots.size() < 1) return;
            for (double delta : {0.2, 0.1, 0.05, 0.02, 0.01, 0.005}) {
                for (int iter = 0; iter < 200; ++iter) {
                    double best_gain = 1e-10;
                    int best_kind = -1;  // 0 transfer, 1 shrink, 2 grow
                    size_t best_a = 0, best_b = 0;
                    auto trial = [&](int kind, size_t a, size_t b) {
                        const double va = shares[a];
                        const double vb = kind == 0 ? shares[b] : 0.0;
                        if (kind == 0) {
                            if (shares[a] < delta + 1e-4) return;
                            shares[a] -= delta;
                            shares[b] += delta;
                        } else if (kind == 1) {
                            if (shares[a] < delta + 1e-4) return;
                            shares[a] -= delta;
                        } else {
                            double sum = 0.0;
                            for (size_t i : slots) sum += shares[i];
                            if (sum + delta > 1.0 + 1e-12) return;
                            shares[a] += delta;
                        }
                        const double v = value().value;
                        shares[a] = va;
                        if (kind == 0) shares[b] = vb;
                        if (v - current > best_gain) {
                            best_gain = v - current;
                            best_kind = kind;
                            best_a = a;
                            best_b = b;
                        }
                    };
                    for (size_t a : slots)
                        for (size_t b : slots)
                            if (a != b) trial(0, a, b);
                    if (allow_slack) {
                        for (size_t a : slots) trial(1, a, 0);
                        for (size_t a : slots) trial(2, a, 0);
                    }
                    if (best_kind < 0) break;
                    if (best_kind == 0) {
                        shares[best_a] -= delta;
                        shares[best_b] += delta;
                    } else if (best_kind == 1) {
                        shares[best_a] -= delta;
                    } else {
                        shares[best_a] += delta;
                    }
                    current += best_gain;
                }
            }
        };

        if (opt_bandwidth) ascend(gd.bandwidth, r_slots, false);
        if (opt_compute) ascend(gd.compute, f_slots, true);
        if (opt_bandwidth && opt_compute) {
            ascend(gd.bandwidth, r_slots, false);
            ascend(gd.compute, f_slots, true);
        }

        for (size_t i = 0; i < nk; ++i) {
            const size_t idx = static_cast<size_t>(off) + i;
            d.bandwidth[idx] = gd.bandwidth[i];
            d.compute[idx] = gd.compute[i];
        }
    }
    return d;
}

DecisionSet scheme_decisions(const Scenario& s, const SchemeSpec& spec, uint64_t seed) {
    const int K = s.num_groups();
    const int total = s.total_devices();
    Rng rng(Rng::derive(seed, 0xba5e));

    RoutePlan plan;
    switch (spec.route) {
        case RouteMode::NearestNeighbor: plan = nearest_neighbor_plan(s); break;
        case RouteMode::RandomOrder: plan = random_order_plan(s, seed); break;
        case RouteMode::EnvAgnostic: plan = env_agnostic_plan(s); break;
        case RouteMode::EnvAware: plan = env_aware_plan(s); break;
    }
    DecisionSet d = make_local_decisions(s, std::move(plan));

    // offload bits
    for (int k = 0; k < K; ++k) {
        const int off = s.device_offset(k);
        const auto& group = s.groups[static_cast<size_t>(k)];
        const int nk = static_cast<int>(group.devices.size());
        switch (spec.offload) {
            case OffloadMode::Full:
                for (int i = 0; i < nk; ++i) d.offload[static_cast<size_t>(off + i)] = 1;
                break;
            case OffloadMode::None:
                break;
            case OffloadMode::Random:
                for (int i = 0; i < nk; ++i)
                    d.offload[static_cast<size_t>(off + i)] = rng.bernoulli(spec.offload_p);
                break;
            case OffloadMode::Partial: {
                // the designated proportion, highest local burden first
                std::vector<int> order(static_cast<size_t>(nk));
                std::iota(order.begin(), order.end(), 0);
                std::vector<double> burden(static_cast<size_t>(nk));
                for (int i = 0; i < nk; ++i) {
                    const Device& dev = group.devices[static_cast<size_t>(i)];
                    const auto [t, e] = local_outcome(dev.task, dev, s.constants);
                    burden[static_cast<size_t>(i)] = dev.time_value * t + dev.energy_value * e;
                }
                std::sort(order.begin(), order.end(), [&](int a, int b) {
                    if (burden[static_cast<size_t>(a)] != burden[static_cast<size_t>(b)])
                        return burden[static_cast<size_t>(a)] > burden[static_cast<size_t>(b)];
                    return a < b;
                });
                const int take = static_cast<int>(std::ceil(spec.offload_p * nk));
                for (int i = 0; i < take && i < nk; ++i)
                    d.offload[static_cast<size_t>(off + order[static_cast<size_t>(i)])] = 1;
                break;
            }
        }
    }

    // cache bits among offloaded devices, storage-capped in popularity order
    if (spec.cache != CacheMode::None) {
        const auto popularity = content_popularity(s);
        std::vector<int> order(static_cast<size_t>(total));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (popularity[static_cast<size_t>(a)] != popularity[static_cast<size_t>(b)])
                return popularity[static_cast<size_t>(a)] > popularity[static_cast<size_t>(b)];
            return a < b;
        });
        std::vector<Task> tasks;
        for (const auto& g : s.groups)
            for (const auto& dev : g.devices) tasks.push_back(dev.task);

        int keep = total;
        if (spec.cache == CacheMode::Partial)
            keep = static_cast<int>(std::ceil(spec.cache_p * total));
        double used = 0.0;
        int taken = 0;
        for (int idx : order) {
            const size_t si = static_cast<size_t>(idx);
            if (!d.offload[si]) continue;
            if (spec.cache == CacheMode::Random && !rng.bernoulli(spec.cache_p)) continue;
            if (taken >= keep) break;
            if (used + tasks[si].data_bits > s.constants.storage_cap_bits) continue;
            d.cache[si] = 1;
            used += tasks[si].data_bits;
            ++taken;
        }
    }

    // equal allocation among eligible devices per group
    for (int k = 0; k < K; ++k) {
        const int off = s.device_offset(k);
        const int nk = static_cast<int>(s.groups[static_cast<size_t>(k)].devices.size());
        int r_n = 0, f_n = 0;
        for (int i = 0; i < nk; ++i) {
            const size_t idx = static_cast<size_t>(off + i);
            if (d.offload[idx] && !d.cache[idx]) ++r_n;
            if (d.offload[idx]) ++f_n;
        }
        for (int i = 0; i < nk; ++i) {
            const size_t idx = static_cast<size_t>(off + i);
            if (d.offload[idx] && !d.cache[idx]) d.bandwidth[idx] = 1.0 / r_n;
            if (d.offload[idx]) d.compute[idx] = 1.0 / f_n;
        }
    }

    d = project_to_feasible(s, d);
    if (spec.alloc != AllocMode::Equal) {
        d = optimize_allocations(s, d, spec.alloc != AllocMode::OptCompute,
                                 spec.alloc != AllocMode::OptBandwidth);
        d = project_to_feasible(s, d);
    }
    return d;
}

ProfitBreakdown run_scheme(const Scenario& s, const SchemeSpec& spec, uint64_t seed,
                           const EvalOptions& opt) {
    return evaluate(s, scheme_decisions(s, spec, seed), opt);
}

// ---- oracle ----------------------------------------------------------------

namespace {

struct GroupCombo {
    GroupDecision decision;
    double value = 0.0;
    double service_time_s = 0.0;
    double cached_bits = 0.0;
};

// All composition vectors of `units` grid cells over `slots` members, each
// positive, total at most `units`.
void positive_compositions(int slots, int units, std::vector<int>& current,
                           std::vector<std::vector<int>>& out) {
    if (slots == 0) {
        out.push_back(current);
        return;
    }
    int used = 0;
    for (int v : current) used += v;
    for (int v = 1; v + used + (slots - 1) <= units; ++v) {
        current.push_back(v);
        positive_compositions(slots - 1, units, current, out);
        current.pop_back();
    }
}

std::vector<std::vector<double>> share_vectors(int members, double step) {
    std::vector<std::vector<double>> out;
    if (members == 0) {
        out.push_back({});
        return out;
    }
    const int units = static_cast<int>(std::lround(1.0 / step));
    std::vector<std::vector<int>> comps;
    std::vector<int> current;
    positive_compositions(members, units, current, comps);
    for (const auto& comp : comps) {
        std::vector<double> shares;
        for (int v : comp) shares.push_back(v * step);
        out.push_back(std::move(shares));
    }
    // the equal split is part of the lattice so fixed schemes are dominated
    std::vector<double> equal(static_cast<size_t>(members), 1.0 / members);
    bool found = false;
    for (const auto& v : out)
        if (v == equal) found = true;
    if (!found) out.push_back(equal);
    return out;
}

std::vector<GroupCombo> enumerate_group(const Scenario& s, int dg, double step,
                                        const GroupLink& link, double hover_power,
                                        long& nodes) {
    const auto& group = s.groups[static_cast<size_t>(dg)];
    const int nk = static_cast<int>(group.devices.size());
    std::vector<GroupCombo> combos;

    // device states: 0 local, 1 offloaded, 2 offloaded+cached
    std::vector<int> state(static_cast<size_t>(nk), 0);
    while (true) {
        GroupDecision base;
        base.offload.assign(static_cast<size_t>(nk), 0);
        base.cache.assign(static_cast<size_t>(nk), 0);
        base.bandwidth.assign(static_cast<size_t>(nk), 0.0);
        base.compute.assign(static_cast<size_t>(nk), 0.0);
        std::vector<size_t> r_slots, f_slots;
        for (int i = 0; i < nk; ++i) {
            const size_t si = static_cast<size_t>(i);
            if (state[si] >= 1) {
                base.offload[si] = 1;
                f_slots.push_back(si);
            }
            if (state[si] == 2) base.cache[si] = 1;
            if (state[si] == 1) r_slots.push_back(si);
        }
        const auto r_vectors = share_vectors(static_cast<int>(r_slots.size()), step);
        const auto f_vectors = share_vectors(static_cast<int>(f_slots.size()), step);
        for (const auto& rv : r_vectors) {
            for (const auto& fv : f_vectors) {
                GroupDecision d = base;
                for (size_t i = 0; i < r_slots.size(); ++i) d.bandwidth[r_slots[i]] = rv[i];
                for (size_t i = 0; i < f_slots.size(); ++i) d.compute[f_slots[i]] = fv[i];
                const GroupValue v = group_value(s, dg, d, link, hover_power);
                ++nodes;
                if (!v.finite) continue;
                combos.push_back({std::move(d), v.value, v.service_time_s, v.cached_bits});
            }
        }
        // next device-state pattern
        int pos = 0;
        while (pos < nk) {
            if (++state[static_cast<size_t>(pos)] <= 2) break;
            state[static_cast<size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == nk) break;
    }
    // highest value first helps the branch-and-bound
    std::sort(combos.begin(), combos.end(),
              [](const GroupCombo& a, const GroupCombo& b) { return a.value > b.value; });
    return combos;
}

void enumerate_sequences(std::vector<int> remaining, std::vector<int>& current,
                         std::vector<std::vector<int>>& out) {
    if (remaining.empty()) {
        out.push_back(current);
        return;
    }
    for (size_t i = 0; i < remaining.size(); ++i) {
        std::vector<int> rest = remaining;
        rest.erase(rest.begin() + static_cast<long>(i));
        current.push_back(remaining[i]);
        enumerate_sequences(std::move(rest), current, out);
        current.pop_back();
    }
}

// All ordered partitions of the groups into num_auvs sequences.
std::vector<RoutePlan> enumerate_plans(int num_groups, int num_auvs) {
    std::vector<RoutePlan> plans;
    if (num_auvs == 1) {
        std::vector<int> all(static_cast<size_t>(num_groups));
        std::iota(all.begin(), all.end(), 0);
        std::vector<std::vector<int>> seqs;
        std::vector<int> current;
        enumerate_sequences(all, current, seqs);
        for (auto& seq : seqs) plans.push_back({{std::move(seq)}});
        return plans;
    }
    // num_auvs == 2: every subset for the first AUV, ordered both sides
    const int K = num_groups;
    for (uint32_t mask = 0; mask < (1u << K); ++mask) {
        std::vector<int> a, b;
        for (int k = 0; k < K; ++k)
            ((mask >> k) & 1u ? a : b).push_back(k);
        std::vector<std::vector<int>> sa, sb;
        std::vector<int> cur;
        enumerate_sequences(a, cur, sa);
        enumerate_sequences(b, cur, sb);
        for (const auto& qa : sa)
            for (const auto& qb : sb) plans.push_back({{qa, qb}});
    }
    return plans;
}

std::string plan_encoding(const RoutePlan& plan) {
    std::string code;
    for (const auto& seq : plan.sequences) {
        for (int k : seq) code += static_cast<char>('a' + k);
        code += '|';
    }
    return code;
}

struct PlanBest {
    double profit = -1e300;
    RoutePlan plan;
    std::vector<size_t> combo_choice;
    std::string encoding;
    bool valid = false;
};

}  // namespace

OracleResult oracle(const Scenario& s, double grid_step, const OracleLimits& limits) {
    const auto t0 = std::chrono::steady_clock::now();
    const int K = s.num_groups();
    const int M = s.num_auvs;
    if (K > limits.max_groups)
        throw std::invalid_argument("oracle: instance too large: " + std::to_string(K) +
                                    " groups exceed the limit of " + std::to_string(limits.max_groups));
    if (M > limits.max_auvs)
        throw std::invalid_argument("oracle: instance too large: " + std::to_string(M) +
                                    " AUVs exceed the limit of " + std::to_string(limits.max_auvs));
    if (s.max_devices_per_group() > limits.max_devices_per_group)
        throw std::invalid_argument("oracle: instance too large: a group has " +
                                    std::to_string(s.max_devices_per_group()) +
                                    " devices, limit " + std::to_string(limits.max_devices_per_group));
    if (grid_step != 0.25 && grid_step != 0.5)
        throw std::invalid_argument("oracle: grid_step must be 0.25 or 0.5");

    long nodes = 0;
    const auto hover_powers = group_hover_powers(s);
    std::vector<std::vector<GroupCombo>> combos;
    for (int k = 0; k < K; ++k)
        combos.push_back(enumerate_group(s, k, grid_step, group_link(s, k), hover_powers[static_cast<size_t>(k)], nodes));
    for (int k = 0; k < K; ++k)
        if (combos[static_cast<size_t>(k)].empty())
            throw std::runtime_error("oracle: group " + std::to_string(k) + " admits no feasible decision");

    // suffix bounds for branch-and-bound over groups
    std::vector<double> suffix_best(static_cast<size_t>(K) + 1, 0.0);
    for (int k = K - 1; k >= 0; --k)
        suffix_best[static_cast<size_t>(k)] =
            suffix_best[static_cast<size_t>(k) + 1] + combos[static_cast<size_t>(k)].front().value;

    const auto plans = enumerate_plans(K, M);
    const FlowField field(s);

    // cruise energies and times between all waypoints (0 = anchor, 1+k = hover k)
    std::vector<Vec3> pts{s.station_anchor()};
    for (int k = 0; k < K; ++k) pts.push_back(s.hover_point(k));
    const size_t npts = pts.size();
    std::vector<std::vector<double>> seg_e(npts, std::vector<double>(npts, 0.0));
    std::vector<std::vector<double>> seg_t(npts, std::vector<double>(npts, 0.0));
    for (size_t a = 0; a < npts; ++a)
        for (size_t b = 0; b < npts; ++b)
            if (a != b && distance(pts[a], pts[b]) > 0) {
                const auto e = segment_effort(field, pts[a], pts[b], s.constants);
                seg_e[a][b] = e.energy_j();
                seg_t[a][b] = e.time_s;
            }

    std::atomic<long> shared_nodes{nodes};
    std::mutex best_lock;
    PlanBest best;

    auto search_plan = [&](const RoutePlan& plan, PlanBest& local) {
        // travel cost and times of this plan
        double travel_energy = 0.0;
        std::vector<double> travel_time(static_cast<size_t>(M), 0.0);
        std::vector<int> auv_of_group(static_cast<size_t>(K), -1);
        for (int j = 0; j < M; ++j) {
            const auto& seq = plan.sequences[static_cast<size_t>(j)];
            size_t prev = 0;
            for (int k : seq) {
                travel_energy += seg_e[prev][static_cast<size_t>(k) + 1];
                travel_time[static_cast<size_t>(j)] += seg_t[prev][static_cast<size_t>(k) + 1];
                auv_of_group[static_cast<size_t>(k)] = j;
                prev = static_cast<size_t>(k) + 1;
            }
            if (!seq.empty()) {
                travel_energy += seg_e[prev][0];
                travel_time[static_cast<size_t>(j)] += seg_t[prev][0];
            }
        }
        const double travel_cost = s.constants.cost_auv * travel_energy;

        // depth-first over group combos with capacity and value bound
        std::vector<size_t> choice(static_cast<size_t>(K), 0);
        std::vector<size_t> best_choice;
        double best_value = -1e300;
        long local_nodes = 0;

        std::vector<double> hover(static_cast<size_t>(M), 0.0);
        auto dfs = [&](auto&& self, int k, double used_bits, double value_acc) -> void {
            if (value_acc + suffix_best[static_cast<size_t>(k)] <= best_value) return;
            if (k == K) {
                // strict fairness over full cycle times
                double lo = 1e300, hi = -1e300;
                for (int j = 0; j < M; ++j) {
                    const double cycle = travel_time[static_cast<size_t>(j)] + hover[static_cast<size_t>(j)];
                    lo = std::min(lo, cycle);
                    hi = std::max(hi, cycle);
                }
                if (hi - lo > s.constants.fairness_eps_s + 1e-9) return;
                if (value_acc > best_value) {
                    best_value = value_acc;
                    best_choice = choice;
                }
                return;
            }
            const auto& list = combos[static_cast<size_t>(k)];
            for (size_t c = 0; c < list.size(); ++c) {
                const auto& combo = list[c];
                ++local_nodes;
                if (used_bits + combo.cached_bits > s.constants.storage_cap_bits) continue;
                choice[static_cast<size_t>(k)] = c;
                const int j = auv_of_group[static_cast<size_t>(k)];
                hover[static_cast<size_t>(j)] += combo.service_time_s;
                self(self, k + 1, used_bits + combo.cached_bits, value_acc + combo.value);
                hover[static_cast<size_t>(j)] -= combo.service_time_s;
            }
        };
        dfs(dfs, 0, 0.0, 0.0);
        shared_nodes.fetch_add(local_nodes, std::memory_order_relaxed);
        if (best_choice.empty() && best_value == -1e300) return;  // fairness infeasible

        const double profit = best_value - travel_cost;
        const std::string code = plan_encoding(plan);
        if (profit > local.profit ||
            (profit == local.profit && local.valid && code < local.encoding)) {
            local.profit = profit;
            local.plan = plan;
            local.combo_choice = best_choice;
            local.encoding = code;
            local.valid = true;
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const size_t nthreads = std::min<size_t>(std::min<size_t>(hw, 8), plans.size());
    if (nthreads <= 1) {
        for (const auto& plan : plans) search_plan(plan, best);
    } else {
        std::vector<PlanBest> locals(nthreads);
        std::vector<std::thread> threads;
        std::atomic<size_t> next{0};
        for (size_t t = 0; t < nthreads; ++t) {
            threads.emplace_back([&, t]() {
                size_t i;
                while ((i = next.fetch_add(1)) < plans.size()) search_plan(plans[i], locals[t]);
            });
        }
        for (auto& th : threads) th.join();
        for (const auto& local : locals) {
            if (!local.valid) continue;
            std::lock_guard<std::mutex> lock(best_lock);
            if (!best.valid || local.profit > best.profit ||
                (local.profit == best.profit && local.encoding < best.encoding))
                best = local;
        }
    }

    if (!best.valid)
        throw std::runtime_error("oracle: no strictly feasible decision exists (fairness bound)");

    OracleResult result;
    result.best = make_local_decisions(s, best.plan);
    for (int k = 0; k < K; ++k) {
        const auto& combo = combos[static_cast<size_t>(k)][best.combo_choice[static_cast<size_t>(k)]];
        const int off = s.device_offset(k);
        for (size_t i = 0; i < combo.decision.offload.size(); ++i) {
            const size_t idx = static_cast<size_t>(off) + i;
            result.best.offload[idx] = combo.decision.offload[i];
            result.best.cache[idx] = combo.decision.cache[i];
            result.best.bandwidth[idx] = combo.decision.bandwidth[i];
            result.best.compute[idx] = combo.decision.compute[i];
        }
    }
    result.best_profit = evaluate(s, result.best, {.strict = false}).profit;
    result.nodes_searched = shared_nodes.load();
    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace mtuc
