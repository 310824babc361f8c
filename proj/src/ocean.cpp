#include "mtuc/ocean.hpp"

#include <cmath>
#include <stdexcept>

namespace mtuc {

namespace {
constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
constexpr double kCenterEps = 1e-9;  // below this distance the field is its analytic limit 0
}  // namespace

Vec3 current_velocity(const FlowField& field, Vec3 p) {
    Vec3 v;
    for (const Vortex& vx : field.vortices) {
        const Vec3 d = p - vx.center;
        const double dist2 = d.norm2();
        if (dist2 < kCenterEps * kCenterEps) continue;
        const double swirl =
            vx.strength / (kTwoPi * dist2) * (1.0 - std::exp(-dist2 / (vx.radius * vx.radius)));
        v.x += -swirl * d.y;
        v.y += swirl * d.x;
        v.z += swirl * (field.ref_height - vx.center.z);
    }
    return v;
}

double vorticity_mag(Vec3 p, const Vortex& v) {
    const double dist2 = (p - v.center).norm2();
    const double r02 = v.radius * v.radius;
    return v.strength / (3.14159265358979323846 * r02) * std::exp(-dist2 / r02);
}

Vec3 relative_velocity(const FlowField& field, Vec3 direction, double speed, Vec3 p) {
    if (std::abs(direction.norm() - 1.0) > 1e-9)
        throw std::domain_error("relative_velocity: direction must be a unit vector");
    return speed * direction - current_velocity(field, p);
}

double drag_force_n(Vec3 velocity, const Constants& c) {
    return 0.5 * c.water_density * velocity.norm2() * c.cross_section_m2 * c.drag_coeff;
}

double hover_power_w(const FlowField& field, Vec3 p, const Constants& c) {
    const Vec3 vc = current_velocity(field, p);
    return drag_force_n(vc, c) * vc.norm() / c.electric_eff;
}

SegmentEffort segment_effort(const FlowField& field, Vec3 from, Vec3 to, const Constants& c) {
    const Vec3 delta = to - from;
    const double len = delta.norm();
    if (len <= 0) throw std::domain_error("segment_effort: degenerate segment");
    const Vec3 dir = delta / len;
    const Vec3 mid = from + 0.5 * delta;
    const Vec3 avg_rel = (relative_velocity(field, dir, c.auv_speed_ms, from) +
                          relative_velocity(field, dir, c.auv_speed_ms, mid) +
                          relative_velocity(field, dir, c.auv_speed_ms, to)) /
                         3.0;
    SegmentEffort e;
    e.power_w = drag_force_n(avg_rel, c) * avg_rel.norm() / c.electric_eff;
    e.time_s = len / c.auv_speed_ms;
    return e;
}

}  // namespace mtuc
