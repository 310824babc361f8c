#pragma once

#include <span>
#include <string>
#include <vector>

#include "mtuc/scenario.hpp"

// Multi-AUV route representation, cycle timing, fairness gap and cycle energy.
// Every cycle starts and ends at the station anchor point; hover stops sit
// directly above the served group centroids at cruise height.

namespace mtuc {

struct RoutePlan {
    // sequences[j] is the ordered list of group indices AUV j serves.
    std::vector<std::vector<int>> sequences;
};

struct RouteTiming {
    std::vector<double> travel_s;  // per AUV
    std::vector<double> hover_s;
    std::vector<double> cycle_s;   // travel + hover
    double fairness_gap_s = 0.0;   // max - min cycle time over all AUVs
};

// Hop-indexed binary assignment tensor y[auv][hop][group].
using YMatrix = std::vector<std::vector<std::vector<int>>>;

struct AssignmentCheck {
    bool ok = false;
    RoutePlan plan;
    std::vector<std::string> violations;
};

// Checks coverage (every group served exactly once), per-AUV hop consistency
// and the total hop count, returning either a sequence-form plan or the list
// of violated constraints.
AssignmentCheck validate_assignment(const YMatrix& y, int num_auvs, int num_groups);

AssignmentCheck validate_plan(const RoutePlan& plan, int num_auvs, int num_groups);

YMatrix to_y_matrix(const RoutePlan& plan, int num_groups);

// Throws std::invalid_argument naming the violated constraint when the plan
// is infeasible. dg_service_times[k] is the hover duration at group k.
RouteTiming route_timing(const RoutePlan& plan, std::span<const double> dg_service_times,
                         const Scenario& s);

// Cycle energy per AUV: hover drag power integrated over service times plus
// cruise power over every segment including the return leg.
std::vector<double> route_energy(const RoutePlan& plan, std::span<const double> dg_service_times,
                                 const Scenario& s);

// CSV rows (auv_id, hop_index, dg_id, x, y) for trajectory plots.
std::string route_plan_csv(const RoutePlan& plan, const Scenario& s);

}  // namespace mtuc
