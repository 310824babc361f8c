#include "mtuc/service.hpp"

#include <cmath>
#include <stdexcept>

#include "mtuc/acoustics.hpp"

namespace mtuc {

namespace {
constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

// Transmit energy written as the inverse of the Shannon rate expression:
// prefactor * (2^(Z/(B*T)) - 1) * T with Z/(B*T) = R/B. With T = Z/R this
// reduces to transmit power times airtime exactly, which the tests assert.
double tx_energy(double depth_m, double band_hz, double snr_lb, double bits, double tx_time_s,
                 const Constants& c) {
    const double prefactor = kTwoPi * depth_m * band_hz / (c.circuitry_eff * snr_lb);
    const double spectral = bits / (band_hz * tx_time_s);
    return prefactor * (std::pow(2.0, spectral) - 1.0) * tx_time_s;
}
}  // namespace

std::pair<double, double> local_outcome(const Task& task, const Device& dev, const Constants& c) {
    const double t = task.cycles_per_bit * task.data_bits / dev.cpu_hz;
    const double e = c.cpu_energy_mu * std::pow(dev.cpu_hz, c.cpu_exponent) * t;
    return {t, e};
}

TaskOutcome offload_outcome(const Task& task, const Device& /*dev*/, double r_frac, double f_frac,
                            bool cached, const DeviceLink& link, const Constants& c,
                            const Geometry& g) {
    if (f_frac <= 0.0)
        throw std::invalid_argument("offload_outcome: offloaded task needs a positive compute fraction");
    TaskOutcome out;
    out.offloaded = true;
    out.cached = cached;
    out.station_time_s = task.cycles_per_bit * task.data_bits / (f_frac * c.station_cycles_per_auv);
    out.station_energy_j = c.cpu_energy_mu *
                           std::pow(f_frac * c.station_cycles_per_auv, c.cpu_exponent) *
                           out.station_time_s;
    if (!cached) {
        const double rate_da = rate_device_to_auv(r_frac, link.snr_device_to_auv, c, g);
        const double rate_as = link.rate_auv_to_station_bps;
        if (rate_da <= 0.0 || rate_as <= 0.0)
            throw std::domain_error("offload_outcome: zero data rate on an uncached transfer");
        out.tx_time_da_s = task.data_bits / rate_da;
        out.tx_time_as_s = task.data_bits / rate_as;
        out.device_energy_j = tx_energy(g.device_depth, r_frac * c.bandwidth_low_hz,
                                        link.snr_device_to_auv, task.data_bits, out.tx_time_da_s, c);
        out.auv_tx_energy_j = tx_energy(g.auv_depth, c.bandwidth_high_hz, link.snr_auv_to_station,
                                        task.data_bits, out.tx_time_as_s, c);
    }
    out.total_time_s = out.station_time_s + out.tx_time_da_s + out.tx_time_as_s;
    return out;
}

TaskOutcome task_outcome(const Task& task, const Device& dev, bool offloaded, bool cached,
                         double r_frac, double f_frac, const DeviceLink& link, const Constants& c,
                         const Geometry& g) {
    if (!offloaded) {
        auto [t, e] = local_outcome(task, dev, c);
        TaskOutcome out;
        out.local_time_s = t;
        out.total_time_s = t;
        out.device_energy_j = e;
        return out;
    }
    return offload_outcome(task, dev, r_frac, f_frac, cached, link, c, g);
}

double dg_service_time(std::span<const TaskOutcome> outcomes) {
    if (outcomes.empty()) throw std::invalid_argument("dg_service_time: empty outcome list");
    double worst = 0.0;
    for (const auto& o : outcomes) worst = std::max(worst, o.total_time_s);
    return worst;
}

CapacityCheck cache_capacity_check(std::span<const uint8_t> cache_bits, std::span<const Task> tasks,
                                   double cap_bits) {
    CapacityCheck r;
    for (size_t i = 0; i < tasks.size() && i < cache_bits.size(); ++i)
        if (cache_bits[i]) r.used_bits += tasks[i].data_bits;
    if (r.used_bits <= cap_bits) {
        r.ok = true;
        r.slack_bits = cap_bits - r.used_bits;
    } else {
        r.ok = false;
        r.over_bits = r.used_bits - cap_bits;
    }
    return r;
}

}  // namespace mtuc
