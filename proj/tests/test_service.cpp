#include "mtuc/service.hpp"

#include <cmath>

#include <stdexcept>

#include "doctest.h"
#include "mtuc/acoustics.hpp"

using namespace mtuc;

namespace {

Device reference_device(double cpu_hz = 2e9) {
    Device d;
    d.pos = {0.0, 0.0, 10.0};
    d.cpu_hz = cpu_hz;
    d.task = {3e5, 2000.0, 0};
    d.time_value = 15.0;
    d.energy_value = 1.5;
    return d;
}

DeviceLink reference_link(const Constants& c, const Geometry& g, Vec3 device_pos, Vec3 hover) {
    const NoiseBreakdown n = noise_psd(c.freq_khz, c.shipping, c.wind_ms);
    DeviceLink link;
    link.snr_device_to_auv =
        snr_lb_device_auv(link_geometry_device_auv(device_pos, hover, g), n, c);
    link.snr_auv_to_station = snr_lb_auv_station(hover, g, n, c);
    link.rate_auv_to_station_bps = rate_auv_to_station(link.snr_auv_to_station, c, g);
    return link;
}

}  // namespace

TEST_CASE("local outcome follows the cubic energy law") {
    Constants c;
    const Device dev = reference_device();
    const auto [t, e] = local_outcome(dev.task, dev, c);
    CHECK(t == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(e == doctest::Approx(30.0).epsilon(1e-12));

    // doubling the clock halves time, quadruples energy at sigma = 3
    const Device fast = reference_device(4e9);
    const auto [t2, e2] = local_outcome(fast.task, fast, c);
    CHECK(t2 == doctest::Approx(t / 2.0).epsilon(1e-12));
    CHECK(e2 == doctest::Approx(4.0 * e).epsilon(1e-12));
}

TEST_CASE("station compute time uses the allocated pool share") {
    Constants c;
    Geometry g;
    const Device dev = reference_device();
    const DeviceLink link = reference_link(c, g, dev.pos, {30.0, 0.0, 20.0});
    const TaskOutcome out = offload_outcome(dev.task, dev, 0.0, 0.5, true, link, c, g);
    CHECK(out.station_time_s == doctest::Approx(0.12).epsilon(1e-12));
    CHECK(out.station_energy_j ==
          doctest::Approx(c.cpu_energy_mu * std::pow(5e9, 3.0) * 0.12).epsilon(1e-9));
}

TEST_CASE("cached tasks skip both transmissions entirely") {
    Constants c;
    Geometry g;
    const Device dev = reference_device();
    const DeviceLink link = reference_link(c, g, dev.pos, {30.0, 0.0, 20.0});
    const TaskOutcome out = offload_outcome(dev.task, dev, 0.0, 0.25, true, link, c, g);
    CHECK(out.cached);
    CHECK(out.tx_time_da_s == 0.0);
    CHECK(out.tx_time_as_s == 0.0);
    CHECK(out.device_energy_j == 0.0);
    CHECK(out.auv_tx_energy_j == 0.0);
    CHECK(out.total_time_s == out.station_time_s);
}

TEST_CASE("uncached transmit energy equals transmit power times airtime") {
    Constants c;
    Geometry g;
    const Device dev = reference_device();
    const DeviceLink link = reference_link(c, g, dev.pos, {30.0, 0.0, 20.0});
    for (double r : {0.2, 0.5, 1.0}) {
        const TaskOutcome out = offload_outcome(dev.task, dev, r, 0.5, false, link, c, g);
        CHECK(out.tx_time_da_s ==
              doctest::Approx(dev.task.data_bits / rate_device_to_auv(r, link.snr_device_to_auv, c, g))
                  .epsilon(1e-12));
        // the inverse-Shannon energy form collapses to P * T
        CHECK(out.device_energy_j ==
              doctest::Approx(c.tx_power_device_w * out.tx_time_da_s).epsilon(1e-9));
        CHECK(out.auv_tx_energy_j ==
              doctest::Approx(c.tx_power_auv_w * out.tx_time_as_s).epsilon(1e-9));
        CHECK(out.total_time_s ==
              doctest::Approx(out.station_time_s + out.tx_time_da_s + out.tx_time_as_s));
    }
}

TEST_CASE("offload outcome rejects broken configurations") {
    Constants c;
    Geometry g;
    const Device dev = reference_device();
    DeviceLink link = reference_link(c, g, dev.pos, {30.0, 0.0, 20.0});
    CHECK_THROWS_AS(offload_outcome(dev.task, dev, 0.5, 0.0, false, link, c, g),
                    std::invalid_argument);
    link.snr_device_to_auv = 0.0;
    CHECK_THROWS_AS(offload_outcome(dev.task, dev, 0.5, 0.5, false, link, c, g),
                    std::domain_error);
}

TEST_CASE("total time composes exactly per execution mode") {
    Constants c;
    Geometry g;
    const Device dev = reference_device();
    const DeviceLink link = reference_link(c, g, dev.pos, {30.0, 0.0, 20.0});
    const TaskOutcome local = task_outcome(dev.task, dev, false, false, 0.0, 0.0, link, c, g);
    CHECK(local.total_time_s == local.local_time_s);
    CHECK_FALSE(local.offloaded);
    const TaskOutcome remote = task_outcome(dev.task, dev, true, false, 0.5, 0.5, link, c, g);
    CHECK(remote.total_time_s == remote.station_time_s + remote.tx_time_da_s + remote.tx_time_as_s);
    CHECK(remote.local_time_s == 0.0);
}

TEST_CASE("group service time is the slowest task") {
    TaskOutcome a, b, c_;
    a.total_time_s = 0.1;
    b.total_time_s = 0.3;
    c_.total_time_s = 0.2;
    const TaskOutcome outcomes[] = {a, b, c_};
    CHECK(dg_service_time(outcomes) == doctest::Approx(0.3));
    CHECK(dg_service_time(std::span<const TaskOutcome>(&b, 1)) == doctest::Approx(0.3));
    // a faster extra task does not move the maximum
    TaskOutcome d;
    d.total_time_s = 0.05;
    const TaskOutcome more[] = {a, b, c_, d};
    CHECK(dg_service_time(more) == doctest::Approx(0.3));
    CHECK_THROWS_AS(dg_service_time(std::span<const TaskOutcome>{}), std::invalid_argument);
}

TEST_CASE("cache capacity verdicts") {
    std::vector<Task> tasks(400, Task{3e5, 1500.0, 0});
    SUBCASE("no caching leaves full slack") {
        std::vector<uint8_t> none(tasks.size(), 0);
        const auto r = cache_capacity_check(none, tasks, 1e8);
        CHECK(r.ok);
        CHECK(r.slack_bits == doctest::Approx(1e8));
    }
    SUBCASE("400 tasks of 3e5 bits overflow a 100 Mb store by 2e7") {
        std::vector<uint8_t> all(tasks.size(), 1);
        const auto r = cache_capacity_check(all, tasks, 1e8);
        CHECK_FALSE(r.ok);
        CHECK(r.over_bits == doctest::Approx(2e7).epsilon(1e-9));
    }
    SUBCASE("exactly at capacity is fine with zero slack") {
        std::vector<Task> exact(4, Task{2.5e7, 1500.0, 0});
        std::vector<uint8_t> all(exact.size(), 1);
        const auto r = cache_capacity_check(all, exact, 1e8);
        CHECK(r.ok);
        CHECK(r.slack_bits == doctest::Approx(0.0));
    }
}
