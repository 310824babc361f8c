#include "mtuc/ocean.hpp"

#include <cmath>

#include <stdexcept>

#include "doctest.h"
#include "mtuc/rng.hpp"

using namespace mtuc;

namespace {
Vortex reference_vortex() { return {{0.0, 0.0, 20.0}, 8.0, 100.0}; }
}  // namespace

TEST_CASE("velocity vanishes at the vortex center") {
    const Vortex v = reference_vortex();
    const FlowField field{std::span<const Vortex>(&v, 1), 20.0};
    const Vec3 at = current_velocity(field, v.center);
    CHECK(at.norm() == 0.0);
}

TEST_CASE("tangential speed one radius out matches the closed form") {
    const Vortex v = reference_vortex();
    const FlowField field{std::span<const Vortex>(&v, 1), 20.0};
    const Vec3 vel = current_velocity(field, {100.0, 0.0, 20.0});
    CHECK(vel.x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(vel.y == doctest::Approx(0.00804841).epsilon(1e-5));  // independent evaluation
    CHECK(vel.z == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("planar component is orthogonal to the radial vector everywhere") {
    const Vortex v{{37.0, -12.0, 20.0}, 2000.0, 140.0};
    const FlowField field{std::span<const Vortex>(&v, 1), 20.0};
    Rng rng(99);
    for (int i = 0; i < 1000; ++i) {
        const Vec3 p{rng.uniform(-500, 500), rng.uniform(-500, 500), 20.0};
        const Vec3 vel = current_velocity(field, p);
        const double radial = vel.x * (p.x - v.center.x) + vel.y * (p.y - v.center.y);
        CHECK(std::abs(radial) <= 1e-12 * std::max(1.0, vel.norm() * (p - v.center).norm()));
    }
}

TEST_CASE("planar speed depends only on the radial distance") {
    const Vortex v = reference_vortex();
    const FlowField field{std::span<const Vortex>(&v, 1), 20.0};
    const double r = 75.0;
    const double ref = current_velocity(field, {r, 0.0, 20.0}).norm();
    for (int i = 1; i < 24; ++i) {
        const double ang = i * 0.26;
        const Vec3 p{r * std::cos(ang), r * std::sin(ang), 20.0};
        CHECK(current_velocity(field, p).norm() == doctest::Approx(ref).epsilon(1e-9));
    }
}

TEST_CASE("multiple vortices superpose additively") {
    const Vortex a{{0, 0, 20}, 8.0, 100.0};
    const Vortex b{{50, 50, 20}, -5.0, 80.0};
    const Vortex pair[] = {a, b};
    const FlowField fa{std::span<const Vortex>(&a, 1), 20.0};
    const FlowField fb{std::span<const Vortex>(&b, 1), 20.0};
    const FlowField fab{std::span<const Vortex>(pair, 2), 20.0};
    const Vec3 p{20.0, -30.0, 20.0};
    const Vec3 sum = current_velocity(fa, p) + current_velocity(fb, p);
    const Vec3 joint = current_velocity(fab, p);
    CHECK(joint.x == doctest::Approx(sum.x).epsilon(1e-12));
    CHECK(joint.y == doctest::Approx(sum.y).epsilon(1e-12));
    CHECK(joint.z == doctest::Approx(sum.z).epsilon(1e-12));
}

TEST_CASE("vorticity magnitude") {
    const Vortex v = reference_vortex();
    CHECK(vorticity_mag(v.center, v) == doctest::Approx(2.54647909e-4).epsilon(1e-6));
    const double at_r0 = vorticity_mag({100.0, 0.0, 20.0}, v);
    CHECK(at_r0 == doctest::Approx(2.54647909e-4 * std::exp(-1.0)).epsilon(1e-6));
}

TEST_CASE("relative velocity") {
    const FlowField still{std::span<const Vortex>{}, 20.0};
    Constants c;
    const Vec3 dir{1.0, 0.0, 0.0};
    SUBCASE("still water keeps the commanded speed") {
        CHECK(relative_velocity(still, dir, c.auv_speed_ms, {0, 0, 20}).norm() ==
              doctest::Approx(c.auv_speed_ms));
    }
    SUBCASE("head current adds to the relative speed") {
        const Vortex v{{0.0, -994.0, 20.0}, 50.0, 1000.0};
        const FlowField field{std::span<const Vortex>(&v, 1), 20.0};
        const Vec3 cur = current_velocity(field, {0, 0, 20});
        REQUIRE(cur.x < 0.0);  // westward swirl at the probe point
        REQUIRE(cur.y == doctest::Approx(0.0).epsilon(1e-15));
        const Vec3 rel = relative_velocity(field, {1.0, 0.0, 0.0}, c.auv_speed_ms, {0, 0, 20});
        CHECK(rel.norm() == doctest::Approx(c.auv_speed_ms + std::abs(cur.x)).epsilon(1e-9));
    }
    SUBCASE("direction must be a unit vector") {
        CHECK_THROWS_AS(relative_velocity(still, {2.0, 0.0, 0.0}, 1.0, {0, 0, 20}),
                        std::domain_error);
    }
}

TEST_CASE("drag force at the cruise speed") {
    Constants c;
    CHECK(drag_force_n({c.auv_speed_ms, 0.0, 0.0}, c) == doctest::Approx(12.394460).epsilon(1e-6));
    CHECK(drag_force_n({0.0, 0.0, 0.0}, c) == 0.0);
    const double f1 = drag_force_n({1.5, 0.0, 0.0}, c);
    const double f2 = drag_force_n({3.0, 0.0, 0.0}, c);
    CHECK(f2 == doctest::Approx(4.0 * f1).epsilon(1e-12));
}

TEST_CASE("hover power") {
    Constants c;
    const FlowField still{std::span<const Vortex>{}, 20.0};
    CHECK(hover_power_w(still, {0, 0, 20}, c) == 0.0);

    const Vortex v{{0, 0, 20}, 3000.0, 150.0};
    const FlowField field{std::span<const Vortex>(&v, 1), 20.0};
    const Vec3 p{150.0, 0.0, 20.0};
    const Vec3 cur = current_velocity(field, p);
    const double expected = 0.5 * c.water_density * cur.norm2() * c.cross_section_m2 *
                            c.drag_coeff * cur.norm() / c.electric_eff;
    CHECK(hover_power_w(field, p, c) == doctest::Approx(expected).epsilon(1e-12));
    // cubic in the current magnitude
    CHECK(hover_power_w(field, p, c) > 0.0);
}

TEST_CASE("segment effort in still water") {
    Constants c;
    const FlowField still{std::span<const Vortex>{}, 20.0};
    const auto e = segment_effort(still, {0, 0, 20}, {1000, 0, 20}, c);
    CHECK(e.time_s == doctest::Approx(388.8025).epsilon(1e-4));
    CHECK(e.power_w == doctest::Approx(39.848189).epsilon(1e-6));
    CHECK(e.energy_j() == doctest::Approx(15493.08).epsilon(1e-4));

    // isotropy and reversal invariance in still water
    const auto north = segment_effort(still, {0, 0, 20}, {0, 1000, 20}, c);
    CHECK(north.energy_j() == doctest::Approx(e.energy_j()).epsilon(1e-12));
    const auto back = segment_effort(still, {1000, 0, 20}, {0, 0, 20}, c);
    CHECK(back.energy_j() == doctest::Approx(e.energy_j()).epsilon(1e-12));

    CHECK_THROWS_AS(segment_effort(still, {1, 2, 3}, {1, 2, 3}, c), std::domain_error);
}

TEST_CASE("three-point averaging is exact in a uniform current") {
    Constants c;
    // two distant huge vortices approximate a locally uniform flow; compare
    // against the pointwise relative velocity at the midpoint
    const Vortex v{{0.0, -50000.0, 20.0}, 5e6, 80000.0};
    const FlowField field{std::span<const Vortex>(&v, 1), 20.0};
    const Vec3 from{-20.0, 0.0, 20.0};
    const Vec3 to{20.0, 0.0, 20.0};
    const auto seg = segment_effort(field, from, to, c);
    const Vec3 rel = relative_velocity(field, {1, 0, 0}, c.auv_speed_ms, {0.0, 0.0, 20.0});
    const double pointwise = drag_force_n(rel, c) * rel.norm() / c.electric_eff;
    CHECK(seg.power_w == doctest::Approx(pointwise).epsilon(1e-6));
}

TEST_CASE("opposing current costs more than still water") {
    Constants c;
    // counterclockwise swirl centered south of the path opposes an eastward
    // transit along it
    const Vortex v{{500.0, -300.0, 20.0}, 4000.0, 400.0};
    const FlowField field{std::span<const Vortex>(&v, 1), 20.0};
    const FlowField still{std::span<const Vortex>{}, 20.0};
    const Vec3 from{0.0, 0.0, 20.0};
    const Vec3 to{1000.0, 0.0, 20.0};
    // confirm opposition at the three sample points
    for (const Vec3 p : {from, Vec3{500.0, 0.0, 20.0}, to})
        CHECK(current_velocity(field, p).x < 0.0);
    CHECK(segment_effort(field, from, to, c).energy_j() >
          segment_effort(still, from, to, c).energy_j());
}
