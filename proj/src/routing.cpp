#include "mtuc/routing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mtuc/ocean.hpp"

namespace mtuc {

AssignmentCheck validate_plan(const RoutePlan& plan, int num_auvs, int num_groups) {
    AssignmentCheck r;
    r.plan = plan;
    if (static_cast<int>(plan.sequences.size()) != num_auvs) {
        r.violations.push_back("plan must list one sequence per AUV (" +
                               std::to_string(plan.sequences.size()) + " of " +
                               std::to_string(num_auvs) + ")");
        return r;
    }
    std::vector<int> served(static_cast<size_t>(num_groups), 0);
    int total_hops = 0;
    for (int j = 0; j < num_auvs; ++j) {
        for (int k : plan.sequences[static_cast<size_t>(j)]) {
            if (k < 0 || k >= num_groups) {
                r.violations.push_back("AUV " + std::to_string(j) + " references unknown group " +
                                       std::to_string(k));
                continue;
            }
            ++served[static_cast<size_t>(k)];
            ++total_hops;
        }
    }
    for (int k = 0; k < num_groups; ++k) {
        if (served[static_cast<size_t>(k)] == 0)
            r.violations.push_back("coverage: group " + std::to_string(k) + " is never served");
        else if (served[static_cast<size_t>(k)] > 1)
            r.violations.push_back("coverage: group " + std::to_string(k) + " served " +
                                   std::to_string(served[static_cast<size_t>(k)]) + " times");
    }
    if (total_hops != num_groups)
        r.violations.push_back("total hop count " + std::to_string(total_hops) + " != K = " +
                               std::to_string(num_groups));
    r.ok = r.violations.empty();
    return r;
}

AssignmentCheck validate_assignment(const YMatrix& y, int num_auvs, int num_groups) {
    AssignmentCheck r;
    if (static_cast<int>(y.size()) != num_auvs) {
        r.violations.push_back("assignment must have one hop list per AUV");
        return r;
    }
    RoutePlan plan;
    plan.sequences.resize(static_cast<size_t>(num_auvs));
    for (int j = 0; j < num_auvs; ++j) {
        for (size_t hop = 0; hop < y[static_cast<size_t>(j)].size(); ++hop) {
            const auto& row = y[static_cast<size_t>(j)][hop];
            if (static_cast<int>(row.size()) != num_groups) {
                r.violations.push_back("AUV " + std::to_string(j) + " hop " + std::to_string(hop) +
                                       " row length != K");
                continue;
            }
            int chosen = -1;
            int ones = 0;
            for (int k = 0; k < num_groups; ++k) {
                if (row[static_cast<size_t>(k)] == 1) {
                    chosen = k;
                    ++ones;
                } else if (row[static_cast<size_t>(k)] != 0) {
                    r.violations.push_back("assignment entries must be binary");
                }
            }
            if (ones != 1) {
                r.violations.push_back("AUV " + std::to_string(j) + " hop " + std::to_string(hop) +
                                       " selects " + std::to_string(ones) + " groups");
                continue;
            }
            plan.sequences[static_cast<size_t>(j)].push_back(chosen);
        }
    }
    if (!r.violations.empty()) return r;
    return validate_plan(plan, num_auvs, num_groups);
}

YMatrix to_y_matrix(const RoutePlan& plan, int num_groups) {
    YMatrix y(plan.sequences.size());
    for (size_t j = 0; j < plan.sequences.size(); ++j) {
        for (int k : plan.sequences[j]) {
            std::vector<int> row(static_cast<size_t>(num_groups), 0);
            row.at(static_cast<size_t>(k)) = 1;
            y[j].push_back(std::move(row));
        }
    }
    return y;
}

namespace {

void require_feasible(const RoutePlan& plan, const Scenario& s) {
    auto check = validate_plan(plan, s.num_auvs, s.num_groups());
    if (!check.ok) throw std::invalid_argument("infeasible route plan: " + check.violations.front());
}

// Waypoints of one cycle: anchor, hover stops, anchor again. An idle AUV has
// no waypoints and zero cost.
std::vector<Vec3> cycle_waypoints(const std::vector<int>& seq, const Scenario& s) {
    std::vector<Vec3> pts;
    if (seq.empty()) return pts;
    pts.push_back(s.station_anchor());
    for (int k : seq) pts.push_back(s.hover_point(k));
    pts.push_back(s.station_anchor());
    return pts;
}

}  // namespace

RouteTiming route_timing(const RoutePlan& plan, std::span<const double> dg_service_times,
                         const Scenario& s) {
    require_feasible(plan, s);
    const int m = s.num_auvs;
    RouteTiming t;
    t.travel_s.assign(static_cast<size_t>(m), 0.0);
    t.hover_s.assign(static_cast<size_t>(m), 0.0);
    t.cycle_s.assign(static_cast<size_t>(m), 0.0);
    for (int j = 0; j < m; ++j) {
        const auto& seq = plan.sequences[static_cast<size_t>(j)];
        const auto pts = cycle_waypoints(seq, s);
        double dist = 0.0;
        for (size_t i = 0; i + 1 < pts.size(); ++i) dist += distance(pts[i], pts[i + 1]);
        t.travel_s[static_cast<size_t>(j)] = dist / s.constants.auv_speed_ms;
        for (int k : seq) t.hover_s[static_cast<size_t>(j)] += dg_service_times[static_cast<size_t>(k)];
        t.cycle_s[static_cast<size_t>(j)] =
            t.travel_s[static_cast<size_t>(j)] + t.hover_s[static_cast<size_t>(j)];
    }
    const auto [lo, hi] = std::minmax_element(t.cycle_s.begin(), t.cycle_s.end());
    t.fairness_gap_s = *hi - *lo;
    return t;
}

std::vector<double> route_energy(const RoutePlan& plan, std::span<const double> dg_service_times,
                                 const Scenario& s) {
    require_feasible(plan, s);
    const FlowField field(s);
    std::vector<double> energy(static_cast<size_t>(s.num_auvs), 0.0);
    for (int j = 0; j < s.num_auvs; ++j) {
        const auto& seq = plan.sequences[static_cast<size_t>(j)];
        const auto pts = cycle_waypoints(seq, s);
        double e = 0.0;
        for (size_t i = 0; i + 1 < pts.size(); ++i)
            if (distance(pts[i], pts[i + 1]) > 0)
                e += segment_effort(field, pts[i], pts[i + 1], s.constants).energy_j();
        for (int k : seq)
            e += dg_service_times[static_cast<size_t>(k)] *
                 hover_power_w(field, s.hover_point(k), s.constants);
        energy[static_cast<size_t>(j)] = e;
    }
    return energy;
}

std::string route_plan_csv(const RoutePlan& plan, const Scenario& s) {
    std::ostringstream out;
    out << "auv_id,hop_index,dg_id,x,y\n";
    for (size_t j = 0; j < plan.sequences.size(); ++j) {
        for (size_t hop = 0; hop < plan.sequences[j].size(); ++hop) {
            const int k = plan.sequences[j][hop];
            const Vec3 p = s.hover_point(k);
            out << j << "," << hop << "," << k << "," << p.x << "," << p.y << "\n";
        }
    }
    return out.str();
}

}  // namespace mtuc
