#pragma once

#include <cstdint>
#include <string>

#include "mtuc/economics.hpp"
#include "mtuc/scenario.hpp"

// Fixed-policy comparison schemes, distance- and energy-based route planners,
// per-group allocation optimizers, and an exhaustive oracle for small
// instances.

namespace mtuc {

enum class OffloadMode { Full, None, Random, Partial };
enum class CacheMode { FullCapped, None, Random, Partial };
enum class AllocMode { Equal, OptBandwidth, OptCompute, OptJoint };
enum class RouteMode { NearestNeighbor, RandomOrder, EnvAgnostic, EnvAware };

struct SchemeSpec {
    OffloadMode offload = OffloadMode::Full;
    double offload_p = 0.5;  // probability (Random) or proportion (Partial)
    CacheMode cache = CacheMode::FullCapped;
    double cache_p = 0.5;
    AllocMode alloc = AllocMode::Equal;
    RouteMode route = RouteMode::NearestNeighbor;
};

// Parses names like "full-offload", "random-cache"; throws on unknown names.
OffloadMode offload_mode_from(const std::string& name);
CacheMode cache_mode_from(const std::string& name);
AllocMode alloc_mode_from(const std::string& name);
RouteMode route_mode_from(const std::string& name);

DecisionSet scheme_decisions(const Scenario& s, const SchemeSpec& spec, uint64_t seed);
ProfitBreakdown run_scheme(const Scenario& s, const SchemeSpec& spec, uint64_t seed,
                           const EvalOptions& opt = {});

// Balanced angular partition around the station, then per-AUV tours: exact
// permutation search up to 7 stops, nearest-neighbor plus 2-opt beyond.
RoutePlan nearest_neighbor_plan(const Scenario& s);
RoutePlan random_order_plan(const Scenario& s, uint64_t seed);
RoutePlan env_agnostic_plan(const Scenario& s);  // minimizes distance only
RoutePlan env_aware_plan(const Scenario& s);     // minimizes cruise energy in the true field

// Hill-climbs the bandwidth and/or compute shares of every group, holding
// offload/cache bits and the plan fixed. Never returns a worse decision set.
DecisionSet optimize_allocations(const Scenario& s, DecisionSet d, bool opt_bandwidth,
                                 bool opt_compute);

struct OracleLimits {
    int max_groups = 6;
    int max_auvs = 2;
    int max_devices_per_group = 3;
};

struct OracleResult {
    DecisionSet best;
    double best_profit = 0.0;
    long nodes_searched = 0;
    double wall_time_s = 0.0;
};

// Exhaustive search over ordered group partitions, per-device offload/cache
// bits and allocation vectors on the simplex lattice of the given step
// (equal splits are included as lattice points). Strictly feasible; exact
// over the searched lattice and a lower bound on the continuous optimum.
// Throws std::invalid_argument when the instance exceeds the limits.
OracleResult oracle(const Scenario& s, double grid_step, const OracleLimits& limits = {});

}  // namespace mtuc
