#include "imtosc/device.hpp"

#include <catch_amalgamated.hpp>

using namespace imtosc;

namespace {
const DeviceParams kDev{0.7, 0.3, 10.0, 0.0, 1.0};
}

TEST_CASE("next_state switches at the outer thresholds") {
    CHECK(next_state(kDev, ConductionState::Insulating, 0.75) == ConductionState::Metallic);
    CHECK(next_state(kDev, ConductionState::Metallic, 0.25) == ConductionState::Insulating);
}

TEST_CASE("next_state keeps its state inside the hysteresis window") {
    for (double v : {0.31, 0.5, 0.69}) {
        CHECK(next_state(kDev, ConductionState::Insulating, v) == ConductionState::Insulating);
        CHECK(next_state(kDev, ConductionState::Metallic, v) == ConductionState::Metallic);
    }
}

TEST_CASE("thresholds are inclusive") {
    CHECK(next_state(kDev, ConductionState::Insulating, 0.7) == ConductionState::Metallic);
    CHECK(next_state(kDev, ConductionState::Metallic, 0.3) == ConductionState::Insulating);
}

TEST_CASE("a sweep up and back down traces a hysteresis loop") {
    ConductionState s = ConductionState::Insulating;
    std::vector<ConductionState> up, down;
    for (int k = 0; k <= 100; ++k) up.push_back(s = next_state(kDev, s, k / 100.0));
    for (int k = 100; k >= 0; --k) down.push_back(s = next_state(kDev, s, k / 100.0));
    // At v = 0.5 the state depends on the sweep direction.
    CHECK(up[50] == ConductionState::Insulating);
    CHECK(down[50] == ConductionState::Metallic);
}

TEST_CASE("conductance follows the conduction state") {
    DeviceParams d = kDev;
    d.g_di = 0.1;
    CHECK(conductance(d, ConductionState::Metallic) == 10.0);
    CHECK(conductance(d, ConductionState::Insulating) == 0.1);
}

TEST_CASE("device parameter validation") {
    CHECK_NOTHROW(kDev.validate());
    DeviceParams d = kDev;
    d.v_l = 0.8;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d = kDev;
    d.g_di = 20.0;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d = kDev;
    d.c_int = 0.0;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d = kDev;
    d.v_h = 1.0;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}

TEST_CASE("state bit conversions") {
    CHECK(to_bit(ConductionState::Metallic) == 0);
    CHECK(to_bit(ConductionState::Insulating) == 1);
    CHECK(state_from_bit(1) == ConductionState::Insulating);
    CHECK(flipped(ConductionState::Metallic) == ConductionState::Insulating);
    CHECK_THROWS(state_from_bit(2));
}
