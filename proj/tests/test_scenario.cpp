#include "mtuc/scenario.hpp"

#include <cstdio>
#include <fstream>

#include <stdexcept>

#include "doctest.h"

using namespace mtuc;

TEST_CASE("reference constants carry the expected values") {
    Constants c;
    CHECK(c.freq_khz == doctest::Approx(30.0));
    CHECK(c.auv_speed_ms == doctest::Approx(5.0 * 0.5144).epsilon(1e-9));  // 5 knots
    CHECK(c.spreading == doctest::Approx(1.5));
    CHECK(c.storage_cap_bits == doctest::Approx(1e8));
}

TEST_CASE("generation is deterministic and byte-identical") {
    GenSpec spec;
    spec.num_groups = 15;
    spec.num_auvs = 4;
    spec.total_devices = 190;
    spec.seed = 42;
    const Scenario a = generate_random(spec);
    const Scenario b = generate_random(spec);
    CHECK(to_json_text(a) == to_json_text(b));
    CHECK(scenario_hash(a) == scenario_hash(b));

    spec.seed = 43;
    CHECK(to_json_text(generate_random(spec)) != to_json_text(a));
}

TEST_CASE("generated totals and ranges match the defaults") {
    GenSpec spec;
    spec.num_groups = 15;
    spec.num_auvs = 4;
    spec.total_devices = 190;
    spec.seed = 7;
    const Scenario s = generate_random(spec);
    CHECK(s.num_groups() == 15);
    CHECK(s.total_devices() == 190);

    GenSpec tiny;
    tiny.num_groups = 6;
    tiny.num_auvs = 2;
    tiny.total_devices = 18;
    tiny.seed = 7;
    const Scenario t = generate_random(tiny);
    for (const auto& g : t.groups) {
        CHECK(g.devices.size() == 3);
        for (const auto& d : g.devices) {
            CHECK(d.task.data_bits >= 1e5);
            CHECK(d.task.data_bits <= 3e5);
            CHECK(d.cpu_hz >= 1e9);
            CHECK(d.cpu_hz <= 4e9);
            CHECK(d.task.cycles_per_bit >= 1500.0);
            CHECK(d.task.cycles_per_bit <= 2000.0);
            CHECK(d.time_value >= 10.0);
            CHECK(d.time_value <= 20.0);
            CHECK(d.energy_value >= 1.0);
            CHECK(d.energy_value <= 2.0);
        }
    }
}

TEST_CASE("round-trip through save/load preserves the scenario") {
    GenSpec spec;
    spec.num_groups = 4;
    spec.num_auvs = 2;
    spec.total_devices = 10;
    spec.num_vortices = 2;
    spec.seed = 11;
    const Scenario s = generate_random(spec);
    const std::string path = "roundtrip_scenario.json";
    save_scenario(path, s);
    const Scenario loaded = load_scenario(path);
    CHECK(to_json_text(loaded) == to_json_text(s));
    std::remove(path.c_str());
}

TEST_CASE("validation names the violated invariant") {
    GenSpec spec;
    spec.num_groups = 3;
    spec.num_auvs = 1;
    spec.total_devices = 6;
    spec.seed = 5;
    Scenario s = generate_random(spec);

    SUBCASE("M >= 1") {
        s.num_auvs = 0;
        CHECK_THROWS_WITH_AS(validate(s), doctest::Contains("M >= 1"), std::invalid_argument);
    }
    SUBCASE("depth identity is checked, not fixed") {
        s.geometry.device_depth = 123.0;
        CHECK_THROWS_WITH_AS(validate(s), doctest::Contains("H1 = H - h0"), std::invalid_argument);
    }
    SUBCASE("K >= M") {
        s.num_auvs = 5;
        CHECK_THROWS_WITH_AS(validate(s), doctest::Contains("K >= M"), std::invalid_argument);
    }
    SUBCASE("task size must be positive") {
        s.groups[0].devices[0].task.data_bits = 0.0;
        CHECK_THROWS_AS(validate(s), std::invalid_argument);
    }
}

TEST_CASE("a file without vortices loads as still water") {
    GenSpec spec;
    spec.num_groups = 2;
    spec.num_auvs = 1;
    spec.total_devices = 4;
    spec.seed = 3;
    Scenario s = generate_random(spec);
    std::string text = to_json_text(s);
    const auto pos = text.find("\"vortices\"");
    REQUIRE(pos != std::string::npos);
    const auto comma = text.rfind(',', pos);
    const auto close = text.find(']', pos);
    REQUIRE(comma != std::string::npos);
    text.erase(comma, close - comma + 1);
    const Scenario loaded = from_json_text(text);
    CHECK(loaded.vortices.empty());
}

TEST_CASE("parse errors carry file context") {
    const std::string path = "broken_scenario.json";
    std::ofstream(path) << "{ not json";
    CHECK_THROWS_WITH_AS(load_scenario(path), doctest::Contains("parse error"), std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("devices inside a group are sorted by descending cpu") {
    GenSpec spec;
    spec.num_groups = 5;
    spec.num_auvs = 1;
    spec.total_devices = 20;
    spec.seed = 19;
    const Scenario s = generate_random(spec);
    for (const auto& g : s.groups)
        for (size_t i = 0; i + 1 < g.devices.size(); ++i)
            CHECK(g.devices[i].cpu_hz >= g.devices[i + 1].cpu_hz);
}
