#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mtuc/vec3.hpp"

// World description for the multi-tier underwater computing simulator.
//
// Unit convention, enforced at this boundary: meters, seconds, hertz, watts,
// joules and bits everywhere in the public API. kHz and dB appear only inside
// the acoustics module. Coordinates are right-handed with z measured upward
// from the seabed; the surface-station sits at z = water_depth.

namespace mtuc {

struct Geometry {
    Vec3 station_pos{0.0, 0.0, 200.0};
    double water_depth = 200.0;    // H
    double device_height = 10.0;   // h0, above seabed
    double auv_height = 20.0;      // d0, above seabed
    double device_depth = 190.0;   // H1 = H - h0
    double auv_depth = 180.0;      // H2 = H - d0
};

struct Task {
    double data_bits = 0.0;
    double cycles_per_bit = 0.0;
    int content_id = 0;  // identifies repeated request content for cache ranking
};

struct Device {
    Vec3 pos;
    double cpu_hz = 0.0;
    Task task;
    double time_value = 0.0;    // profit units per second saved
    double energy_value = 0.0;  // profit units per joule saved
};

struct DeviceGroup {
    Vec3 centroid;
    std::vector<Device> devices;
};

// Physical and economic constants. Defaults are the reference parameter set
// used throughout: acoustic and hydrodynamic values from standard shallow
// water assumptions, with two calibrations documented in the README:
//   - circuitry_eff folds the 1 uPa reference-intensity normalization of the
//     Shannon-rate expressions into the efficiency factor (0.2 * rho*c / 1e-12),
//     so the rate formulas use a dimensionless unit reference.
//   - the NLOS reflected-path counts default to 1 significant path per
//     boundary; larger counts tighten the SNR lower bound toward zero.
struct Constants {
    double freq_khz = 30.0;
    double shipping = 0.5;           // in [0,1]
    double wind_ms = 0.0;
    double spreading = 1.5;          // k_s
    double gamma_surface = 1.0;
    double gamma_bottom = 0.0139;
    double surface_paths = 1.0;      // significant surface-reflected paths
    double bottom_paths = 1.0;       // significant bottom-reflected paths (device link)
    double relay_paths = 1.0;        // significant bottom-reflected paths (station link)
    double bandwidth_low_hz = 1.0e4;   // device -> AUV band
    double bandwidth_high_hz = 1.0e4;  // AUV -> station band
    double tx_power_device_w = 0.03;
    double tx_power_auv_w = 0.036;
    double circuitry_eff = 3.06e17;  // eta, includes reference-intensity conversion
    double electric_eff = 0.8;       // zeta
    double drag_coeff = 0.117;       // C_d
    double cross_section_m2 = 0.0314;
    double water_density = 1020.0;   // kg/m^3
    double auv_speed_ms = 2.572;     // 5 knots at 0.5144 m/s per knot
    double cpu_energy_mu = 1.25e-26;
    double cpu_exponent = 3.0;       // sigma
    double station_cycles_per_auv = 1.0e10;  // F, cycles/s pool per served group
    double storage_cap_bits = 1.0e8;         // C_e
    double fairness_eps_s = 2.0;             // epsilon
    double cost_station = 1.0;  // profit units per station joule
    double cost_auv = 2.0;      // profit units per AUV joule
};

struct Vortex {
    Vec3 center;
    double strength = 0.0;  // m^2/s
    double radius = 0.0;    // m
};

struct Scenario {
    Geometry geometry;
    std::vector<DeviceGroup> groups;
    int num_auvs = 1;
    Constants constants;
    std::vector<Vortex> vortices;
    uint64_t seed = 0;

    int num_groups() const { return static_cast<int>(groups.size()); }
    int total_devices() const;
    int max_devices_per_group() const;
    int device_offset(int group) const;  // flat index of group's first device

    // AUVs hover directly above a group's centroid at cruise height.
    Vec3 hover_point(int group) const;
    // Common start/end point of all cycles: below the station at cruise height.
    Vec3 station_anchor() const;
};

// Throws std::invalid_argument naming the violated invariant.
void validate(const Scenario& s);

Scenario load_scenario(const std::string& path);
void save_scenario(const std::string& path, const Scenario& s);
std::string to_json_text(const Scenario& s);
Scenario from_json_text(const std::string& text);

// FNV-1a over the canonical JSON serialization; stable across platforms.
std::string scenario_hash(const Scenario& s);

struct GenSpec {
    int num_groups = 15;
    int num_auvs = 4;
    int total_devices = 190;
    double area_extent_m = 2000.0;  // side of the horizontal deployment square
    double group_spread_m = 50.0;   // device disc radius around each centroid
    int content_catalog = 30;
    double zipf_exponent = 0.8;
    int num_vortices = 0;
    double vortex_strength_lo = 1500.0;  // m^2/s
    double vortex_strength_hi = 3000.0;
    double vortex_radius_lo = 80.0;  // m
    double vortex_radius_hi = 160.0;
    uint64_t seed = 1;
};

// Deterministic for a fixed spec+seed on every platform. Devices within a
// group are ordered by descending cpu_hz so that device slots carry meaning
// for fixed-layout policies.
Scenario generate_random(const GenSpec& spec);

}  // namespace mtuc
