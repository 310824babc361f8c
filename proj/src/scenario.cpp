#include "mtuc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "mtuc/rng.hpp"

namespace mtuc {

using ordered_json = nlohmann::ordered_json;

int Scenario::total_devices() const {
    int n = 0;
    for (const auto& g : groups) n += static_cast<int>(g.devices.size());
    return n;
}

int Scenario::max_devices_per_group() const {
    int n = 0;
    for (const auto& g : groups) n = std::max(n, static_cast<int>(g.devices.size()));
    return n;
}

int Scenario::device_offset(int group) const {
    int n = 0;
    for (int k = 0; k < group; ++k) n += static_cast<int>(groups[k].devices.size());
    return n;
}

Vec3 Scenario::hover_point(int group) const {
    const Vec3& c = groups.at(group).centroid;
    return {c.x, c.y, geometry.auv_height};
}

Vec3 Scenario::station_anchor() const {
    return {geometry.station_pos.x, geometry.station_pos.y, geometry.auv_height};
}

namespace {

void require(bool ok, const std::string& invariant) {
    if (!ok) throw std::invalid_argument("scenario invariant violated: " + invariant);
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

void validate(const Scenario& s) {
    const Geometry& g = s.geometry;
    require(g.water_depth > 0, "H > 0");
    require(g.device_height > 0 && g.device_height < g.water_depth, "0 < h0 < H");
    require(g.auv_height > 0 && g.auv_height < g.water_depth, "0 < d0 < H");
    require(near(g.device_depth, g.water_depth - g.device_height), "H1 = H - h0");
    require(near(g.auv_depth, g.water_depth - g.auv_height), "H2 = H - d0");
    require(g.station_pos.finite(), "station position finite");

    require(s.num_auvs >= 1, "M >= 1");
    require(!s.groups.empty(), "K >= 1");
    require(s.num_groups() >= s.num_auvs, "K >= M");

    for (int k = 0; k < s.num_groups(); ++k) {
        const auto& dg = s.groups[k];
        const std::string tag = "group " + std::to_string(k) + ": ";
        require(!dg.devices.empty(), tag + "nonempty device list");
        require(dg.centroid.finite(), tag + "centroid finite");
        for (size_t i = 0; i < dg.devices.size(); ++i) {
            const auto& d = dg.devices[i];
            const std::string dt = tag + "device " + std::to_string(i) + ": ";
            require(d.pos.finite(), dt + "position finite");
            require(near(d.pos.z, g.device_height), dt + "z equals h0");
            require(d.cpu_hz > 0, dt + "f_ki > 0");
            require(d.task.data_bits > 0, dt + "Z_ki > 0");
            require(d.task.cycles_per_bit > 0, dt + "alpha_ki > 0");
            require(d.time_value >= 0 && d.energy_value >= 0, dt + "omega, lambda >= 0");
        }
    }

    const Constants& c = s.constants;
    require(c.freq_khz > 0, "f > 0");
    require(c.shipping >= 0 && c.shipping <= 1, "s in [0,1]");
    require(c.wind_ms >= 0, "w >= 0");
    require(c.spreading > 0, "k_s > 0");
    require(c.gamma_surface > 0 && c.gamma_bottom > 0, "reflection gains > 0");
    require(c.surface_paths > 0 && c.bottom_paths > 0 && c.relay_paths > 0, "path counts > 0");
    require(c.bandwidth_low_hz > 0 && c.bandwidth_high_hz > 0, "bandwidths > 0");
    require(c.tx_power_device_w > 0 && c.tx_power_auv_w > 0, "tx powers > 0");
    require(c.circuitry_eff > 0 && c.electric_eff > 0, "efficiencies > 0");
    require(c.drag_coeff > 0 && c.cross_section_m2 > 0 && c.water_density > 0, "drag constants > 0");
    require(c.auv_speed_ms > 0, "V_k > 0");
    require(c.cpu_energy_mu > 0 && c.cpu_exponent > 0, "cpu energy constants > 0");
    require(c.station_cycles_per_auv > 0, "F > 0");
    require(c.storage_cap_bits > 0, "C_e > 0");
    require(c.fairness_eps_s > 0, "epsilon > 0");
    require(c.cost_station > 0 && c.cost_auv > 0, "unit costs > 0");

    for (size_t v = 0; v < s.vortices.size(); ++v) {
        require(s.vortices[v].radius > 0, "vortex " + std::to_string(v) + ": r0 > 0");
        require(s.vortices[v].center.finite(), "vortex " + std::to_string(v) + ": center finite");
    }
}

namespace {

ordered_json vec_to_json(const Vec3& v) { return ordered_json::array({v.x, v.y, v.z}); }

Vec3 vec_from_json(const ordered_json& j) {
    if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected [x,y,z] array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

ordered_json constants_to_json(const Constants& c) {
    ordered_json j;
    j["freq_khz"] = c.freq_khz;
    j["shipping"] = c.shipping;
    j["wind_ms"] = c.wind_ms;
    j["spreading"] = c.spreading;
    j["gamma_surface"] = c.gamma_surface;
    j["gamma_bottom"] = c.gamma_bottom;
    j["surface_paths"] = c.surface_paths;
    j["bottom_paths"] = c.bottom_paths;
    j["relay_paths"] = c.relay_paths;
    j["bandwidth_low_hz"] = c.bandwidth_low_hz;
    j["bandwidth_high_hz"] = c.bandwidth_high_hz;
    j["tx_power_device_w"] = c.tx_power_device_w;
    j["tx_power_auv_w"] = c.tx_power_auv_w;
    j["circuitry_eff"] = c.circuitry_eff;
    j["electric_eff"] = c.electric_eff;
    j["drag_coeff"] = c.drag_coeff;
    j["cross_section_m2"] = c.cross_section_m2;
    j["water_density"] = c.water_density;
    j["auv_speed_ms"] = c.auv_speed_ms;
    j["cpu_energy_mu"] = c.cpu_energy_mu;
    j["cpu_exponent"] = c.cpu_exponent;
    j["station_cycles_per_auv"] = c.station_cycles_per_auv;
    j["storage_cap_bits"] = c.storage_cap_bits;
    j["fairness_eps_s"] = c.fairness_eps_s;
    j["cost_station"] = c.cost_station;
    j["cost_auv"] = c.cost_auv;
    return j;
}

Constants constants_from_json(const ordered_json& j) {
    Constants c;
    auto get = [&](const char* key, double& out) {
        if (j.contains(key)) out = j.at(key).get<double>();
    };
    get("freq_khz", c.freq_khz);
    get("shipping", c.shipping);
    get("wind_ms", c.wind_ms);
    get("spreading", c.spreading);
    get("gamma_surface", c.gamma_surface);
    get("gamma_bottom", c.gamma_bottom);
    get("surface_paths", c.surface_paths);
    get("bottom_paths", c.bottom_paths);
    get("relay_paths", c.relay_paths);
    get("bandwidth_low_hz", c.bandwidth_low_hz);
    get("bandwidth_high_hz", c.bandwidth_high_hz);
    get("tx_power_device_w", c.tx_power_device_w);
    get("tx_power_auv_w", c.tx_power_auv_w);
    get("circuitry_eff", c.circuitry_eff);
    get("electric_eff", c.electric_eff);
    get("drag_coeff", c.drag_coeff);
    get("cross_section_m2", c.cross_section_m2);
    get("water_density", c.water_density);
    get("auv_speed_ms", c.auv_speed_ms);
    get("cpu_energy_mu", c.cpu_energy_mu);
    get("cpu_exponent", c.cpu_exponent);
    get("station_cycles_per_auv", c.station_cycles_per_auv);
    get("storage_cap_bits", c.storage_cap_bits);
    get("fairness_eps_s", c.fairness_eps_s);
    get("cost_station", c.cost_station);
    get("cost_auv", c.cost_auv);
    return c;
}

}  // namespace

std::string to_json_text(const Scenario& s) {
    ordered_json j;
    j["seed"] = s.seed;
    j["num_auvs"] = s.num_auvs;
    ordered_json geo;
    geo["station_pos"] = vec_to_json(s.geometry.station_pos);
    geo["water_depth"] = s.geometry.water_depth;
    geo["device_height"] = s.geometry.device_height;
    geo["auv_height"] = s.geometry.auv_height;
    geo["device_depth"] = s.geometry.device_depth;
    geo["auv_depth"] = s.geometry.auv_depth;
    j["geometry"] = geo;
    j["constants"] = constants_to_json(s.constants);
    ordered_json groups = ordered_json::array();
    for (const auto& g : s.groups) {
        ordered_json jg;
        jg["centroid"] = vec_to_json(g.centroid);
        ordered_json devs = ordered_json::array();
        for (const auto& d : g.devices) {
            ordered_json jd;
            jd["pos"] = vec_to_json(d.pos);
            jd["cpu_hz"] = d.cpu_hz;
            jd["time_value"] = d.time_value;
            jd["energy_value"] = d.energy_value;
            ordered_json jt;
            jt["data_bits"] = d.task.data_bits;
            jt["cycles_per_bit"] = d.task.cycles_per_bit;
            jt["content_id"] = d.task.content_id;
            jd["task"] = jt;
            devs.push_back(jd);
        }
        jg["devices"] = devs;
        groups.push_back(jg);
    }
    j["groups"] = groups;
    ordered_json vortices = ordered_json::array();
    for (const auto& v : s.vortices) {
        ordered_json jv;
        jv["center"] = vec_to_json(v.center);
        jv["strength"] = v.strength;
        jv["radius"] = v.radius;
        vortices.push_back(jv);
    }
    j["vortices"] = vortices;
    return j.dump(2) + "\n";
}

Scenario from_json_text(const std::string& text) {
    ordered_json j = ordered_json::parse(text);  // throws with byte context on error
    Scenario s;
    s.seed = j.value("seed", uint64_t{0});
    s.num_auvs = j.value("num_auvs", 1);
    if (j.contains("geometry")) {
        const auto& g = j.at("geometry");
        if (g.contains("station_pos")) s.geometry.station_pos = vec_from_json(g.at("station_pos"));
        s.geometry.water_depth = g.value("water_depth", s.geometry.water_depth);
        s.geometry.device_height = g.value("device_height", s.geometry.device_height);
        s.geometry.auv_height = g.value("auv_height", s.geometry.auv_height);
        s.geometry.device_depth = g.value("device_depth", s.geometry.water_depth - s.geometry.device_height);
        s.geometry.auv_depth = g.value("auv_depth", s.geometry.water_depth - s.geometry.auv_height);
    }
    if (j.contains("constants")) s.constants = constants_from_json(j.at("constants"));
    if (j.contains("groups")) {
        for (const auto& jg : j.at("groups")) {
            DeviceGroup g;
            g.centroid = vec_from_json(jg.at("centroid"));
            for (const auto& jd : jg.at("devices")) {
                Device d;
                d.pos = vec_from_json(jd.at("pos"));
                d.cpu_hz = jd.at("cpu_hz").get<double>();
                d.time_value = jd.at("time_value").get<double>();
                d.energy_value = jd.at("energy_value").get<double>();
                const auto& jt = jd.at("task");
                d.task.data_bits = jt.at("data_bits").get<double>();
                d.task.cycles_per_bit = jt.at("cycles_per_bit").get<double>();
                d.task.content_id = jt.value("content_id", 0);
                g.devices.push_back(d);
            }
            s.groups.push_back(std::move(g));
        }
    }
    if (j.contains("vortices")) {
        for (const auto& jv : j.at("vortices")) {
            Vortex v;
            v.center = vec_from_json(jv.at("center"));
            v.strength = jv.at("strength").get<double>();
            v.radius = jv.at("radius").get<double>();
            s.vortices.push_back(v);
        }
    }
    validate(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return from_json_text(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("parse error in " + path + ": " + e.what());
    }
}

void save_scenario(const std::string& path, const Scenario& s) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
    if (!out) throw std::runtime_error("cannot write scenario file: " + path);
    out << to_json_text(s);
}

std::string scenario_hash(const Scenario& s) {
    const std::string text = to_json_text(s);
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Scenario generate_random(const GenSpec& spec) {
    if (spec.num_groups < 1 || spec.num_auvs < 1 || spec.total_devices < spec.num_groups)
        throw std::invalid_argument("generate_random: counts must be >= 1 with at least one device per group");
    Rng rng(spec.seed);
    Scenario s;
    s.seed = spec.seed;
    s.num_auvs = spec.num_auvs;

    // Zipf-like popularity over the content catalog.
    std::vector<double> content_cdf(static_cast<size_t>(spec.content_catalog));
    double acc = 0.0;
    for (int i = 0; i < spec.content_catalog; ++i) {
        acc += 1.0 / std::pow(static_cast<double>(i + 1), spec.zipf_exponent);
        content_cdf[static_cast<size_t>(i)] = acc;
    }
    auto sample_content = [&]() {
        const double u = rng.uniform() * acc;
        for (int i = 0; i < spec.content_catalog; ++i)
            if (u <= content_cdf[static_cast<size_t>(i)]) return i;
        return spec.content_catalog - 1;
    };

    const double half = spec.area_extent_m / 2.0;
    const int base = spec.total_devices / spec.num_groups;
    const int extra = spec.total_devices % spec.num_groups;
    for (int k = 0; k < spec.num_groups; ++k) {
        DeviceGroup g;
        g.centroid = {rng.uniform(-half, half), rng.uniform(-half, half), s.geometry.device_height};
        const int count = base + (k < extra ? 1 : 0);
        for (int i = 0; i < count; ++i) {
            Device d;
            const double ang = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
            const double rad = spec.group_spread_m * std::sqrt(rng.uniform());
            d.pos = {g.centroid.x + rad * std::cos(ang), g.centroid.y + rad * std::sin(ang),
                     s.geometry.device_height};
            d.cpu_hz = rng.uniform(1.0e9, 4.0e9);
            d.task.data_bits = rng.uniform(1.0e5, 3.0e5);
            d.task.cycles_per_bit = rng.uniform(1500.0, 2000.0);
            d.task.content_id = sample_content();
            d.time_value = rng.uniform(10.0, 20.0);
            d.energy_value = rng.uniform(1.0, 2.0);
            g.devices.push_back(d);
        }
        std::sort(g.devices.begin(), g.devices.end(),
                  [](const Device& a, const Device& b) { return a.cpu_hz > b.cpu_hz; });
        s.groups.push_back(std::move(g));
    }

    for (int v = 0; v < spec.num_vortices; ++v) {
        Vortex vx;
        vx.center = {rng.uniform(-half, half), rng.uniform(-half, half), s.geometry.auv_height};
        vx.strength = rng.uniform(spec.vortex_strength_lo, spec.vortex_strength_hi);
        vx.radius = rng.uniform(spec.vortex_radius_lo, spec.vortex_radius_hi);
        s.vortices.push_back(vx);
    }

    validate(s);
    return s;
}

}  // namespace mtuc
