#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mtuc/scenario.hpp"

// Per-task latency and energy accounting: local execution, two-hop offloading
// with station computing, and cache hits that skip both transmissions.

namespace mtuc {

struct TaskOutcome {
    double total_time_s = 0.0;
    double local_time_s = 0.0;
    double tx_time_da_s = 0.0;   // device -> AUV
    double tx_time_as_s = 0.0;   // AUV -> station
    double station_time_s = 0.0;
    double device_energy_j = 0.0;   // local compute or uplink transmit energy
    double station_energy_j = 0.0;
    double auv_tx_energy_j = 0.0;
    bool offloaded = false;
    bool cached = false;
};

// Link budget of one device's serving configuration: SNR lower bounds of both
// hops plus the fraction-independent relay rate.
struct DeviceLink {
    double snr_device_to_auv = 0.0;
    double snr_auv_to_station = 0.0;
    double rate_auv_to_station_bps = 0.0;
};

// (time, energy) of running the task on the device itself.
std::pair<double, double> local_outcome(const Task& task, const Device& dev, const Constants& c);

// Outcome of an offloaded task. Cached tasks skip both transmissions; their
// only time is the station compute time. Throws std::domain_error when an
// uncached transfer would run at zero rate, and std::invalid_argument when
// the station fraction is zero while offloaded.
TaskOutcome offload_outcome(const Task& task, const Device& dev, double r_frac, double f_frac,
                            bool cached, const DeviceLink& link, const Constants& c,
                            const Geometry& g);

// Dispatcher used by the economics layer.
TaskOutcome task_outcome(const Task& task, const Device& dev, bool offloaded, bool cached,
                         double r_frac, double f_frac, const DeviceLink& link, const Constants& c,
                         const Geometry& g);

// Serving time of a whole group: the slowest of its tasks.
double dg_service_time(std::span<const TaskOutcome> outcomes);

struct CapacityCheck {
    bool ok = true;
    double used_bits = 0.0;
    double slack_bits = 0.0;
    double over_bits = 0.0;
};

CapacityCheck cache_capacity_check(std::span<const uint8_t> cache_bits, std::span<const Task> tasks,
                                   double cap_bits);

}  // namespace mtuc
