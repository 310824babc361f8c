#include "mtuc/economics.hpp"

#include <cmath>

#include <stdexcept>

#include "doctest.h"
#include "mtuc/acoustics.hpp"
#include "mtuc/rng.hpp"
#include "mtuc/service.hpp"

using namespace mtuc;

namespace {

// two groups, two devices each, one AUV, still water, compact geometry
Scenario tiny_scenario() {
    GenSpec spec;
    spec.num_groups = 2;
    spec.num_auvs = 1;
    spec.total_devices = 4;
    spec.area_extent_m = 600.0;
    spec.seed = 21;
    Scenario s = generate_random(spec);
    s.vortices.clear();
    s.constants.cost_auv = 0.02;        // keeps movement from dwarfing task terms
    s.constants.fairness_eps_s = 1e6;   // fairness inactive here
    return s;
}

DecisionSet offload_everything(const Scenario& s) {
    DecisionSet d = make_local_decisions(s, RoutePlan{{{0, 1}}});
    for (int k = 0; k < s.num_groups(); ++k) {
        const int off = s.device_offset(k);
        const int nk = static_cast<int>(s.groups[static_cast<size_t>(k)].devices.size());
        for (int i = 0; i < nk; ++i) {
            d.offload[static_cast<size_t>(off + i)] = 1;
            d.bandwidth[static_cast<size_t>(off + i)] = 1.0 / nk;
            d.compute[static_cast<size_t>(off + i)] = 1.0 / nk;
        }
    }
    return d;
}

}  // namespace

TEST_CASE("all-local decisions earn nothing and pay only for movement") {
    const Scenario s = tiny_scenario();
    const DecisionSet d = make_local_decisions(s, RoutePlan{{{0, 1}}});
    const ProfitBreakdown pb = evaluate(s, d);
    CHECK(pb.revenue == 0.0);
    CHECK(pb.task_cost == 0.0);
    CHECK(pb.movement_cost > 0.0);
    CHECK(pb.profit == doctest::Approx(-pb.movement_cost).epsilon(1e-12));
}

TEST_CASE("profit matches an independently scripted evaluation") {
    // Recompute every term through the raw formula chain, sidestepping the
    // TaskOutcome plumbing, and compare.
    const Scenario s = tiny_scenario();
    const DecisionSet d = offload_everything(s);
    const ProfitBreakdown pb = evaluate(s, d);

    const Constants& c = s.constants;
    const NoiseBreakdown noise = noise_psd(c.freq_khz, c.shipping, c.wind_ms);
    double revenue = 0.0, task_cost = 0.0;
    std::vector<double> service(2, 0.0);
    for (int k = 0; k < 2; ++k) {
        const Vec3 hover = s.hover_point(k);
        const double snr_as = snr_lb_auv_station(hover, s.geometry, noise, c);
        const double rate_as = rate_auv_to_station(snr_as, c, s.geometry);
        const int off = s.device_offset(k);
        for (size_t i = 0; i < s.groups[static_cast<size_t>(k)].devices.size(); ++i) {
            const Device& dev = s.groups[static_cast<size_t>(k)].devices[i];
            const double r = d.bandwidth[static_cast<size_t>(off) + i];
            const double f = d.compute[static_cast<size_t>(off) + i];
            const double t_local = dev.task.cycles_per_bit * dev.task.data_bits / dev.cpu_hz;
            const double e_local = c.cpu_energy_mu * std::pow(dev.cpu_hz, 3.0) * t_local;
            const double snr_da = snr_lb_device_auv(
                link_geometry_device_auv(dev.pos, hover, s.geometry), noise, c);
            const double rate_da = rate_device_to_auv(r, snr_da, c, s.geometry);
            const double t_da = dev.task.data_bits / rate_da;
            const double t_as = dev.task.data_bits / rate_as;
            const double t_station =
                dev.task.cycles_per_bit * dev.task.data_bits / (f * c.station_cycles_per_auv);
            const double total = t_station + t_da + t_as;
            const double e_da = c.tx_power_device_w * t_da;
            const double e_as = c.tx_power_auv_w * t_as;
            const double e_station =
                c.cpu_energy_mu * std::pow(f * c.station_cycles_per_auv, 3.0) * t_station;
            revenue += dev.time_value * (t_local - total) + dev.energy_value * (e_local - e_da);
            task_cost += c.cost_station * e_station + c.cost_auv * e_as;
            service[static_cast<size_t>(k)] = std::max(service[static_cast<size_t>(k)], total);
        }
    }
    CHECK(pb.revenue == doctest::Approx(revenue).epsilon(1e-9));
    CHECK(pb.task_cost == doctest::Approx(task_cost).epsilon(1e-9));

    const auto energy = route_energy(d.plan, service, s);
    const double cf = c.cost_auv * energy[0];
    CHECK(pb.movement_cost == doctest::Approx(cf).epsilon(1e-9));
    CHECK(pb.profit == doctest::Approx(revenue - task_cost - cf).epsilon(1e-9));
}

TEST_CASE("evaluation is deterministic") {
    const Scenario s = tiny_scenario();
    const DecisionSet d = offload_everything(s);
    const ProfitBreakdown a = evaluate(s, d);
    const ProfitBreakdown b = evaluate(s, d);
    CHECK(a.profit == b.profit);
    CHECK(a.revenue == b.revenue);
}

TEST_CASE("caching an offloaded task never hurts") {
    const Scenario s = tiny_scenario();
    const DecisionSet base = offload_everything(s);
    const ProfitBreakdown before = evaluate(s, base);
    for (size_t i = 0; i < base.offload.size(); ++i) {
        DecisionSet cached = base;
        cached.cache[i] = 1;
        cached.bandwidth[i] = 0.0;
        const ProfitBreakdown after = evaluate(s, cached);
        CHECK(after.profit >= before.profit - 1e-9);
    }
}

TEST_CASE("scaling device values scales revenue exactly") {
    const Scenario s = tiny_scenario();
    const DecisionSet d = offload_everything(s);
    const ProfitBreakdown base = evaluate(s, d);

    Scenario scaled = s;
    const double factor = 3.5;
    for (auto& g : scaled.groups) {
        for (auto& dev : g.devices) {
            dev.time_value *= factor;
            dev.energy_value *= factor;
        }
    }
    const ProfitBreakdown big = evaluate(scaled, d);
    CHECK(big.revenue == doctest::Approx(factor * base.revenue).epsilon(1e-12));
    CHECK(big.task_cost == doctest::Approx(base.task_cost).epsilon(1e-12));
    CHECK(big.movement_cost == doctest::Approx(base.movement_cost).epsilon(1e-12));
}

TEST_CASE("offloading that takes longer than local reduces revenue") {
    Scenario s = tiny_scenario();
    // place the first group far away so relay transmission is slow
    s.groups[0].centroid = {6000.0, 6000.0, 10.0};
    for (auto& dev : s.groups[0].devices) dev.pos = {6000.0, 6000.0, 10.0};
    DecisionSet d = make_local_decisions(s, RoutePlan{{{0, 1}}});
    d.offload[0] = 1;
    d.bandwidth[0] = 1.0;
    d.compute[0] = 1.0;
    const ProfitBreakdown pb = evaluate(s, d);
    const Device& dev = s.groups[0].devices[0];
    const auto [t_local, e_local] = local_outcome(dev.task, dev, s.constants);
    (void)e_local;
    CHECK(pb.per_dg[0].revenue < dev.energy_value * e_local);  // time saving went negative
}

TEST_CASE("audit labels each violated constraint") {
    const Scenario s = tiny_scenario();
    SUBCASE("clean local decisions pass everything") {
        const auto report = audit(s, make_local_decisions(s, RoutePlan{{{0, 1}}}));
        CHECK(report.ok);
    }
    SUBCASE("bandwidth without offload fails 63b") {
        DecisionSet d = make_local_decisions(s, RoutePlan{{{0, 1}}});
        d.bandwidth[1] = 0.3;
        const auto report = audit(s, d);
        CHECK_FALSE(report.ok);
        for (const auto& c : report.constraints)
            if (c.id == "63b") CHECK_FALSE(c.ok);
    }
    SUBCASE("cache without offload fails 63m") {
        DecisionSet d = make_local_decisions(s, RoutePlan{{{0, 1}}});
        d.cache[2] = 1;
        const auto report = audit(s, d);
        CHECK_FALSE(report.ok);
        for (const auto& c : report.constraints)
            if (c.id == "63m") CHECK_FALSE(c.ok);
    }
    SUBCASE("bandwidth on a cached task fails 63c") {
        DecisionSet d = offload_everything(s);
        d.cache[0] = 1;  // leaves bandwidth set
        const auto report = audit(s, d);
        for (const auto& c : report.constraints)
            if (c.id == "63c") CHECK_FALSE(c.ok);
    }
    SUBCASE("overflowing group budgets fail 63d and 63g") {
        DecisionSet d = offload_everything(s);
        for (auto& r : d.bandwidth) r = 0.9;
        for (auto& f : d.compute) f = 0.9;
        const auto report = audit(s, d);
        for (const auto& c : report.constraints) {
            if (c.id == "63d") CHECK_FALSE(c.ok);
            if (c.id == "63g") CHECK_FALSE(c.ok);
        }
    }
}

TEST_CASE("strict evaluation throws on infeasibility") {
    const Scenario s = tiny_scenario();
    DecisionSet d = make_local_decisions(s, RoutePlan{{{0, 1}}});
    d.cache[0] = 1;
    CHECK_THROWS_WITH_AS(evaluate(s, d, {.strict = true}), doctest::Contains("63m"),
                         std::invalid_argument);
}

TEST_CASE("projection repairs raw decisions and is idempotent") {
    const Scenario s = tiny_scenario();
    SUBCASE("oversubscribed bandwidth is renormalized") {
        DecisionSet d = offload_everything(s);
        for (auto& r : d.bandwidth) r = 1.0;  // per-group sum 2.0
        const DecisionSet p = project_to_feasible(s, d);
        for (int k = 0; k < s.num_groups(); ++k) {
            const int off = s.device_offset(k);
            double sum = 0.0;
            for (size_t i = 0; i < 2; ++i) sum += p.bandwidth[static_cast<size_t>(off) + i];
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(p.bandwidth[static_cast<size_t>(off)] == doctest::Approx(0.5).epsilon(1e-12));
        }
        CHECK(audit(s, p).ok);
    }
    SUBCASE("feasible input passes through unchanged") {
        const DecisionSet d = offload_everything(s);
        const DecisionSet p = project_to_feasible(s, d);
        CHECK(p.offload == d.offload);
        CHECK(p.cache == d.cache);
        CHECK(p.bandwidth == d.bandwidth);
        CHECK(p.compute == d.compute);
    }
    SUBCASE("capacity overflow evicts exactly the overflowing items") {
        Scenario small = s;
        small.constants.storage_cap_bits = 0.0;  // replaced below
        // capacity fits all but one cached task
        double total_bits = 0.0;
        double min_bits = 1e300;
        for (const auto& g : small.groups)
            for (const auto& dev : g.devices) {
                total_bits += dev.task.data_bits;
                min_bits = std::min(min_bits, dev.task.data_bits);
            }
        small.constants.storage_cap_bits = total_bits - 0.5 * min_bits;
        DecisionSet d = offload_everything(small);
        for (size_t i = 0; i < d.cache.size(); ++i) {
            d.cache[i] = 1;
            d.bandwidth[i] = 0.0;
        }
        const DecisionSet p = project_to_feasible(small, d);
        int evicted = 0;
        for (size_t i = 0; i < p.cache.size(); ++i) evicted += d.cache[i] && !p.cache[i];
        CHECK(evicted == 1);
        CHECK(audit(small, p).ok);
        const DecisionSet pp = project_to_feasible(small, p);
        CHECK(pp.cache == p.cache);
        CHECK(pp.offload == p.offload);
    }
    SUBCASE("projection output always passes the audit") {
        Rng rng(7);
        for (int trial = 0; trial < 25; ++trial) {
            DecisionSet d = make_local_decisions(s, RoutePlan{{{0, 1}}});
            for (size_t i = 0; i < d.offload.size(); ++i) {
                d.offload[i] = rng.bernoulli(0.7);
                d.cache[i] = rng.bernoulli(0.5);
                d.bandwidth[i] = rng.uniform(0.0, 1.5);
                d.compute[i] = rng.uniform(0.0, 1.5);
            }
            const DecisionSet p = project_to_feasible(s, d);
            CHECK(audit(s, p).ok);
            const DecisionSet pp = project_to_feasible(s, p);
            CHECK(pp.offload == p.offload);
            CHECK(pp.cache == p.cache);
            CHECK(pp.bandwidth == p.bandwidth);
            CHECK(pp.compute == p.compute);
        }
    }
}

TEST_CASE("fairness is soft in penalty mode and hard in strict mode") {
    Scenario s = tiny_scenario();
    s.num_auvs = 2;
    s.constants.fairness_eps_s = 2.0;
    // both groups on one AUV leaves the other idle: gap = full cycle time
    DecisionSet d = make_local_decisions(s, RoutePlan{{{0, 1}, {}}});
    const ProfitBreakdown pb = evaluate(s, d, {.strict = false, .fairness_penalty_per_s = 10.0});
    CHECK(pb.fairness_gap_s > s.constants.fairness_eps_s);
    CHECK(pb.fairness_penalty ==
          doctest::Approx(10.0 * (pb.fairness_gap_s - 2.0)).epsilon(1e-9));
    CHECK_THROWS_WITH_AS(evaluate(s, d, {.strict = true}), doctest::Contains("63l"),
                         std::invalid_argument);
}

TEST_CASE("profit rows serialize to the documented csv schema") {
    const Scenario s = tiny_scenario();
    const ProfitBreakdown pb = evaluate(s, make_local_decisions(s, RoutePlan{{{0, 1}}}));
    CHECK(ProfitBreakdown::csv_header() ==
          "scenario_id,algo,seed,revenue,task_cost,movement_cost,penalty,profit");
    const std::string row = pb.csv_row("abc123", "local", 7);
    CHECK(row.find("abc123,local,7,0,0,") == 0);
}
