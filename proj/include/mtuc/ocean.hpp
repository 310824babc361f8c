#pragma once

#include <span>

#include "mtuc/scenario.hpp"
#include "mtuc/vec3.hpp"

// Closed-form vortex current field and the drag/electric power it imposes on
// hovering and cruising AUVs.

namespace mtuc {

// View over a scenario's vortices. ref_height is the AUV cruise height; the
// vertical field component is proportional to (ref_height - vortex center z)
// for every sample point, matching the planar closed-form approximation.
struct FlowField {
    std::span<const Vortex> vortices;
    double ref_height = 20.0;

    explicit FlowField(const Scenario& s)
        : vortices(s.vortices), ref_height(s.geometry.auv_height) {}
    FlowField(std::span<const Vortex> v, double h) : vortices(v), ref_height(h) {}
};

// Superposed current velocity of all vortices at p. Each contribution decays
// like (1 - exp(-d^2/r0^2))/d tangentially around its center and vanishes in
// the limit at the center itself (threshold 1e-9 m).
Vec3 current_velocity(const FlowField& field, Vec3 p);

// Vorticity magnitude of a single vortex at p.
double vorticity_mag(Vec3 p, const Vortex& v);

// Velocity of the AUV relative to the water when cruising along the unit
// vector `direction` at `speed` through the current at p.
Vec3 relative_velocity(const FlowField& field, Vec3 direction, double speed, Vec3 p);

// Quadratic hull drag, newtons.
double drag_force_n(Vec3 velocity, const Constants& c);

// Electric power needed to hold position against the local current.
double hover_power_w(const FlowField& field, Vec3 p, const Constants& c);

struct SegmentEffort {
    double power_w = 0.0;
    double time_s = 0.0;
    double energy_j() const { return power_w * time_s; }
};

// Cruise effort along a straight segment at constant ground speed. The
// relative flow is approximated by the average of its value at the start,
// midpoint and end of the segment.
SegmentEffort segment_effort(const FlowField& field, Vec3 from, Vec3 to, const Constants& c);

}  // namespace mtuc
