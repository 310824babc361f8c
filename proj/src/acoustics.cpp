#include "mtuc/acoustics.hpp"

#include <cmath>
#include <stdexcept>

namespace mtuc {

NoiseBreakdown noise_psd(double f_khz, double shipping, double wind_ms) {
    if (f_khz <= 0) throw std::domain_error("noise_psd: frequency must be positive");
    if (shipping < 0 || shipping > 1) throw std::domain_error("noise_psd: shipping factor outside [0,1]");
    if (wind_ms < 0) throw std::domain_error("noise_psd: wind speed must be nonnegative");

    const double logf = std::log10(f_khz);
    const double turb_db = 17.0 - 30.0 * logf;
    const double ship_db = 40.0 + 20.0 * (shipping - 0.5) + 26.0 * logf - 60.0 * std::log10(f_khz + 0.03);
    const double wave_db = 50.0 + 7.5 * std::sqrt(wind_ms) + 20.0 * logf - 40.0 * std::log10(f_khz + 0.4);
    const double therm_db = -15.0 + 20.0 * logf;

    NoiseBreakdown n;
    n.turbulence = db_to_linear(turb_db);
    n.shipping = db_to_linear(ship_db);
    n.waves = db_to_linear(wave_db);
    n.thermal = db_to_linear(therm_db);
    n.combined = n.turbulence + n.shipping + n.waves + n.thermal;  // sum in linear power
    return n;
}

double absorption_db_per_km(double f_khz) {
    if (f_khz <= 0) throw std::domain_error("absorption: frequency must be positive");
    const double f2 = f_khz * f_khz;
    return 0.11 * f2 / (1.0 + f2) + 44.0 * f2 / (4100.0 + f2) + 2.75e-4 * f2 + 0.003;
}

double attenuation(double l_m, double f_khz, double spreading) {
    if (l_m <= 0) throw std::domain_error("attenuation: distance must be positive");
    const double a_db_km = absorption_db_per_km(f_khz);
    return std::pow(l_m, spreading) * db_to_linear(a_db_km * l_m / 1000.0);
}

LinkGeometry link_geometry_device_auv(Vec3 device_pos, Vec3 auv_pos, const Geometry& g) {
    const double dx = auv_pos.x - device_pos.x;
    const double dy = auv_pos.y - device_pos.y;
    const double horiz2 = dx * dx + dy * dy;
    LinkGeometry link;
    link.los_m = distance(device_pos, auv_pos);
    if (link.los_m <= 0) throw std::domain_error("link geometry: device and AUV coincide");
    const double v_surface = 2.0 * g.water_depth - g.device_height - g.auv_height;
    const double v_bottom = g.device_height + g.auv_height;
    link.nlos_surface_m = std::sqrt(horiz2 + v_surface * v_surface);
    link.nlos_bottom_m = std::sqrt(horiz2 + v_bottom * v_bottom);
    return link;
}

namespace {

double clamped_bracket_squared_over_noise(double direct_m, double f_khz, double spreading,
                                          double noise, double refl1_count, double refl1_gain,
                                          double refl1_m, double refl2_count, double refl2_gain,
                                          double refl2_m) {
    double bracket = 1.0 / std::sqrt(attenuation(direct_m, f_khz, spreading));
    bracket -= refl1_count * refl1_gain / std::sqrt(attenuation(refl1_m, f_khz, spreading));
    if (refl2_count > 0)
        bracket -= refl2_count * refl2_gain / std::sqrt(attenuation(refl2_m, f_khz, spreading));
    if (bracket < 0) bracket = 0.0;
    return bracket * bracket / noise;
}

}  // namespace

double snr_lb_device_auv(const LinkGeometry& link, const NoiseBreakdown& noise, const Constants& c) {
    return clamped_bracket_squared_over_noise(
        link.los_m, c.freq_khz, c.spreading, noise.combined, c.surface_paths, c.gamma_surface,
        link.nlos_surface_m, c.bottom_paths, c.gamma_bottom, link.nlos_bottom_m);
}

double snr_lb_auv_station(Vec3 auv_pos, const Geometry& g, const NoiseBreakdown& noise,
                          const Constants& c) {
    const double dx = auv_pos.x - g.station_pos.x;
    const double dy = auv_pos.y - g.station_pos.y;
    const double horiz2 = dx * dx + dy * dy;
    const double los = std::sqrt(horiz2 + (g.water_depth - g.auv_height) * (g.water_depth - g.auv_height));
    const double v_bottom = g.device_height + g.auv_height;
    const double nlos = std::sqrt(horiz2 + v_bottom * v_bottom);
    return clamped_bracket_squared_over_noise(los, c.freq_khz, c.spreading, noise.combined,
                                              c.relay_paths, c.gamma_bottom, nlos, 0.0, 0.0, 1.0);
}

namespace {
constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
}

double rate_device_to_auv(double r_frac, double snr_lb, const Constants& c, const Geometry& g) {
    if (r_frac == 0.0) return 0.0;
    if (r_frac < 0 || r_frac > 1) throw std::domain_error("rate: bandwidth fraction outside [0,1]");
    const double band = r_frac * c.bandwidth_low_hz;
    const double snr = c.circuitry_eff * c.tx_power_device_w * snr_lb / (kTwoPi * g.device_depth * band);
    return band * std::log2(1.0 + snr);
}

double rate_auv_to_station(double snr_lb, const Constants& c, const Geometry& g) {
    const double band = c.bandwidth_high_hz;
    const double snr = c.circuitry_eff * c.tx_power_auv_w * snr_lb / (kTwoPi * g.auv_depth * band);
    return band * std::log2(1.0 + snr);
}

}  // namespace mtuc
