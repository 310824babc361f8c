#pragma once

#include "mtuc/scenario.hpp"
#include "mtuc/vec3.hpp"

// Underwater acoustic link budget: ambient noise spectral densities, Thorp
// absorption, spreading/absorption attenuation, worst-case multipath SNR
// lower bounds and the resulting Shannon rates of the two transmission hops.
//
// dB and kHz live only inside this module; every public result is linear and
// SI (Hz, bits/s).

namespace mtuc {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double v) { return 10.0 * std::log10(v); }

// Linear power spectral densities (uPa^2/Hz) of the four ambient components.
struct NoiseBreakdown {
    double turbulence = 0.0;
    double shipping = 0.0;
    double waves = 0.0;
    double thermal = 0.0;
    double combined = 0.0;  // linear sum of the four
};

// f in kHz, shipping factor in [0,1], wind speed in m/s.
NoiseBreakdown noise_psd(double f_khz, double shipping, double wind_ms);

// Thorp's empirical absorption coefficient, dB/km, f in kHz.
double absorption_db_per_km(double f_khz);

// Combined spreading + absorption attenuation over l meters: the spreading
// term uses the distance in meters, the absorption exponent the distance in
// km (Thorp is a per-km coefficient).
double attenuation(double l_m, double f_khz, double spreading);

// Direct and shortest single-reflection path lengths of the device-AUV hop.
struct LinkGeometry {
    double los_m = 0.0;
    double nlos_surface_m = 0.0;
    double nlos_bottom_m = 0.0;
};

LinkGeometry link_geometry_device_auv(Vec3 device_pos, Vec3 auv_pos, const Geometry& g);

// Worst-case SNR lower bound: the surface- and bottom-reflected amplitudes,
// scaled by path count and boundary gain, are subtracted from the direct
// amplitude. A negative sum means the bound is vacuous and is clamped to 0
// (squaring a negative amplitude sum would raise the bound instead).
double snr_lb_device_auv(const LinkGeometry& link, const NoiseBreakdown& noise, const Constants& c);

// Same structure for the AUV-station hop, with only bottom reflections.
double snr_lb_auv_station(Vec3 auv_pos, const Geometry& g, const NoiseBreakdown& noise,
                          const Constants& c);

// Shannon rate of the device->AUV hop given its bandwidth fraction. The
// noise aggregation factor 2*pi*H uses the transmitter's water depth.
// Returns 0 when no bandwidth is allocated.
double rate_device_to_auv(double r_frac, double snr_lb, const Constants& c, const Geometry& g);

// Shannon rate of the CDMA AUV->station hop (full band).
double rate_auv_to_station(double snr_lb, const Constants& c, const Geometry& g);

}  // namespace mtuc
