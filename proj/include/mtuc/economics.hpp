#pragma once

#include <string>
#include <vector>

#include "mtuc/routing.hpp"
#include "mtuc/scenario.hpp"
#include "mtuc/service.hpp"

// System profit: revenue from device latency/energy savings minus the cost of
// station computing, relay transmissions and AUV movement, plus the full
// feasibility audit of a joint decision against the problem constraints.

namespace mtuc {

// One joint decision. Device vectors are flat, indexed group by group in
// scenario order (Scenario::device_offset).
struct DecisionSet {
    std::vector<uint8_t> offload;   // o
    std::vector<uint8_t> cache;     // h
    std::vector<double> bandwidth;  // r, fraction of the low band
    std::vector<double> compute;    // f, fraction of the station pool
    RoutePlan plan;
};

DecisionSet make_local_decisions(const Scenario& s, RoutePlan plan);

struct DgAttribution {
    double revenue = 0.0;
    double task_cost = 0.0;
    double service_time_s = 0.0;
};

struct ProfitBreakdown {
    double revenue = 0.0;        // Re
    double task_cost = 0.0;      // CT
    double movement_cost = 0.0;  // CF
    double fairness_penalty = 0.0;
    double profit = 0.0;  // Re - CT - CF - penalty
    std::vector<DgAttribution> per_dg;
    std::vector<double> per_auv_energy_j;
    double fairness_gap_s = 0.0;

    std::string csv_row(const std::string& scenario_id, const std::string& algo,
                        uint64_t seed) const;
    static std::string csv_header();
};

struct EvalOptions {
    bool strict = false;                   // strict: fairness is a hard constraint
    double fairness_penalty_per_s = 10.0;  // penalty mode weight on gap beyond epsilon
};

// Per-group link budget at the group's hover point.
struct GroupLink {
    std::vector<DeviceLink> devices;
};

GroupLink group_link(const Scenario& s, int group);

// Profit of a decision set. The plan must be structurally feasible and the
// allocation constraints satisfied; the fairness constraint is either hard
// (strict) or converted into a penalty. Deterministic.
ProfitBreakdown evaluate(const Scenario& s, const DecisionSet& d, const EvalOptions& opt = {});

struct ConstraintReport {
    std::string id;      // constraint label, e.g. "63b"
    bool ok = true;
    std::string detail;  // offending indices when violated
};

struct AuditReport {
    bool ok = true;
    std::vector<ConstraintReport> constraints;
    std::string summary() const;
};

AuditReport audit(const Scenario& s, const DecisionSet& d);

// Maps an unconstrained decision onto the feasible set: clears cache bits of
// non-offloaded tasks, masks fractions of ineligible devices, renormalizes
// per-group allocation sums above 1, rolls offloads with no usable rate back
// to local execution, and evicts cached items (least value per bit first,
// clearing their offload bit too) until the storage cap holds. Idempotent;
// the result always passes the audit given a feasible plan.
DecisionSet project_to_feasible(const Scenario& s, DecisionSet d);

}  // namespace mtuc
