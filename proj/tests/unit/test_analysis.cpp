#include "imtosc/analysis.hpp"
#include "imtosc/rng.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace imtosc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kPi = std::numbers::pi;
const DeviceParams kDR{0.7, 0.3, 10.0, 0.0, 1.0};
const double kPeriod = std::log((10.0 / 11.0 - 0.3) / (10.0 / 11.0 - 0.7)) / 11.0 + std::log(0.7 / 0.3);

Trajectory single_dr_run(double t_end, std::vector<double> watch = {}) {
    Vector x0(1);
    x0 << 0.3;
    SimConfig cfg;
    cfg.t_end = t_end;
    cfg.sample_dt = 0.0;
    cfg.watch_levels = std::move(watch);
    return simulate(NetworkSpec({OscillatorSpec::dr(kDR, 1.0, 1.0)}, {}), x0, {ConductionState::Metallic}, cfg);
}

NetworkSpec dd_pair(double c_c, double g_c) {
    const DeviceParams d{0.7, 0.3, 1.0, 0.0, 0.5};
    const auto o = OscillatorSpec::dd(d, d, 1.0);
    return NetworkSpec({o, o}, {{0, 1, c_c, g_c}});
}

Trajectory shifted(Trajectory t, double dt) {
    for (auto& x : t.times) x += dt;
    for (auto& e : t.events) e.t += dt;
    for (auto& c : t.crossings) c.t += dt;
    t.final_t += dt;
    t.t_end += dt;
    return t;
}

}  // namespace

TEST_CASE("switching phases of a single oscillator") {
    const auto traj = single_dr_run(20.0);
    const auto ps = switching_phases(traj, 0);
    REQUIRE(ps.periods.size() >= 10);
    for (double p : ps.periods) CHECK_THAT(p, WithinRel(kPeriod, 1e-9));
    CHECK(ps.phase_at(ps.event_times[3]) == 0.0);
    CHECK_THAT(ps.phase_at(ps.event_times[3] + 0.5 * ps.periods[3]), WithinAbs(kPi, 1e-12));
}

TEST_CASE("switching phases need three up-switches") {
    const auto traj = single_dr_run(1.5);
    CHECK_THROWS_AS(switching_phases(traj, 0), TooFewEvents);
    CHECK_THROWS_AS(switching_phases(traj, 3), std::out_of_range);
}

TEST_CASE("periodic orbit of a single oscillator has the closed-form period") {
    const auto orbit = detect_periodic_orbit(single_dr_run(30.0));
    REQUIRE(orbit);
    CHECK_THAT(orbit->period, WithinRel(kPeriod, 1e-9));
    CHECK(orbit->section_returns == 1);
}

TEST_CASE("a run parked at a fixed point has no periodic orbit") {
    Vector x0(1);
    x0 << 0.5;
    SimConfig cfg;
    cfg.t_end = 20.0;
    const auto traj =
        simulate(NetworkSpec({OscillatorSpec::dr(kDR, 10.0, 1.0)}, {}), x0, {ConductionState::Metallic}, cfg);
    CHECK_FALSE(detect_periodic_orbit(traj));
}

TEST_CASE("capacitively coupled D-D pair locks anti-phase") {
    const auto net = dd_pair(0.2, 0.0);
    SimConfig cfg;
    cfg.t_end = 200.0;
    cfg.sample_dt = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto ic = random_initial_condition(net, derive_seed(1, seed));
        const auto res = classify_locking(simulate(net, ic.x0, ic.s0, cfg));
        CHECK(res.kind == LockingKind::AntiPhase);
        CHECK_THAT(res.delta_phi, WithinAbs(kPi, 0.05));
        REQUIRE(res.period);
        CHECK(*res.period > 0.0);
    }
}

TEST_CASE("resistively coupled D-D pair locks in phase") {
    const auto net = dd_pair(0.0, 0.2);
    SimConfig cfg;
    cfg.t_end = 200.0;
    cfg.sample_dt = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto ic = random_initial_condition(net, derive_seed(1, seed));
        CHECK(classify_locking(simulate(net, ic.x0, ic.s0, cfg)).kind == LockingKind::InPhase);
    }
}

TEST_CASE("locking classification is invariant under time translation") {
    const auto net = dd_pair(0.2, 0.0);
    const auto ic = random_initial_condition(net, 5);
    SimConfig cfg;
    cfg.t_end = 200.0;
    cfg.sample_dt = 0.0;
    const auto traj = simulate(net, ic.x0, ic.s0, cfg);
    const auto a = classify_locking(traj);
    const auto b = classify_locking(shifted(traj, 1234.5));
    CHECK(a.kind == b.kind);
    CHECK_THAT(a.delta_phi, WithinAbs(b.delta_phi, 1e-9));
}

TEST_CASE("identical oscillators started together stay on the symmetric manifold") {
    const auto o = OscillatorSpec::dr(kDR, 1.0, 1.0);
    const NetworkSpec net({o, o}, {{0, 1, 0.2, 0.1}});
    Vector x0(2);
    x0 << 0.42, 0.42;
    SimConfig cfg;
    cfg.t_end = 60.0;
    cfg.sample_dt = 0.01;
    cfg.watch_levels = {0.5, 0.5};
    const auto traj = simulate(net, x0, {ConductionState::Insulating, ConductionState::Insulating}, cfg);
    for (const auto& x : traj.states) REQUIRE_THAT(x(0), WithinAbs(x(1), 1e-12));
    const auto lock = classify_locking(traj);
    CHECK(lock.kind == LockingKind::InPhase);
    CHECK_THAT(lock.delta_phi, WithinAbs(0.0, 1e-9));
    CHECK(xor_measure(traj, default_xor_window(traj)).value == 0.0);
}

TEST_CASE("xor measure on a hand-built pair of square waves") {
    // Oscillator 0 is high on [1, 3), oscillator 1 on [2, 5), window [0, 6).
    Trajectory t;
    t.times = {0.0, 6.0};
    t.states = {Vector::Zero(2), Vector::Zero(2)};
    t.conduction = {StateVector(2), StateVector(2)};
    t.final_x = Vector::Zero(2);
    t.final_t = t.t_end = 6.0;
    t.watch_levels = {0.5, 0.5};
    t.watch_initial = {false, false};
    t.crossings = {{1.0, 0, true}, {2.0, 1, true}, {3.0, 0, false}, {5.0, 1, false}};
    const XorWindow w{0.0, 6.0};
    CHECK_THAT(xor_measure(t, w).value, WithinAbs(3.0 / 6.0, 1e-15));
    CHECK_THAT(xor_measure(t, w, 1, 0).value, WithinAbs(3.0 / 6.0, 1e-15));
    CHECK_THAT(xor_measure(t, w, 0, 1, true).value, WithinAbs(3.0 / 6.0, 1e-15));
    CHECK_THAT(xor_measure(t, {1.5, 2.5}).value, WithinAbs(0.5, 1e-15));
    CHECK_THAT(xor_measure(t, {2.0, 3.0}).value, WithinAbs(0.0, 1e-15));
    CHECK_THAT(xor_measure(t, {2.0, 3.0}, 0, 1, true).value, WithinAbs(1.0, 1e-15));
    CHECK_THROWS_AS(xor_measure(t, {3.0, 3.0}), std::invalid_argument);
    CHECK_THROWS_AS(xor_measure(t, {0.0, 7.0}), std::invalid_argument);
    CHECK_THROWS_AS(xor_measure(t, w, 0, 0), std::invalid_argument);
}

TEST_CASE("xor measure is label-symmetric and bounded on a coupled run") {
    const auto o1 = OscillatorSpec::dr(kDR, 1.0, 1.0);
    const auto o2 = OscillatorSpec::dr(kDR, 1.3, 1.0);
    const NetworkSpec net({o1, o2}, {{0, 1, 0.05, 0}});
    Vector x0(2);
    x0 << 0.35, 0.6;
    SimConfig cfg;
    cfg.t_end = 100.0;
    cfg.sample_dt = 0.0;
    cfg.watch_levels = {0.45, 0.55};
    const auto traj = simulate(net, x0, {ConductionState::Metallic, ConductionState::Insulating}, cfg);
    const auto w = default_xor_window(traj);
    const double a = xor_measure(traj, w, 0, 1).value;
    const double b = xor_measure(traj, w, 1, 0).value;
    CHECK(a == b);
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
}

TEST_CASE("sampled xor converges to the exact value as the grid is refined") {
    const auto o1 = OscillatorSpec::dr(kDR, 1.0, 1.0);
    const auto o2 = OscillatorSpec::dr(kDR, 1.2, 1.0);
    const NetworkSpec net({o1, o2}, {{0, 1, 0.05, 0}});
    Vector x0(2);
    x0 << 0.35, 0.6;
    const std::vector<double> thr{0.5, 0.5};
    for (double dt : {0.004, 0.002, 0.001, 0.0005}) {
        SimConfig cfg;
        cfg.t_end = 40.0;
        cfg.sample_dt = dt;
        cfg.watch_levels = thr;
        const auto traj = simulate(net, x0, {ConductionState::Metallic, ConductionState::Insulating}, cfg);
        const XorWindow w{20.0, 40.0};
        // Each crossing contributes at most dt of misclassified time.
        const double bound = static_cast<double>(traj.crossings.size()) * dt / (w.end - w.start);
        CHECK(std::abs(xor_measure_sampled(traj, thr, w).value - xor_measure(traj, w).value) <= bound);
    }
}

TEST_CASE("default xor window covers the final periods after burn-in") {
    const auto traj = single_dr_run(100.0);
    const auto w = default_xor_window(traj, 20.0);
    CHECK(w.end == traj.final_t);
    CHECK(w.start >= 50.0);
    CHECK_THAT(w.duration(), WithinRel(20.0 * kPeriod, 1e-9));
}

TEST_CASE("order parameter examples") {
    const std::vector<double> aligned{0.3, 0.3, 0.3};
    const std::vector<double> antipodal{0.0, kPi};
    const std::vector<double> splay{0.0, 2 * kPi / 3, 4 * kPi / 3};
    CHECK_THAT(order_parameter(aligned), WithinAbs(1.0, 1e-15));
    CHECK_THAT(order_parameter(antipodal), WithinAbs(0.0, 1e-15));
    CHECK_THAT(order_parameter(splay), WithinAbs(0.0, 1e-15));
    CHECK(order_parameter(std::vector<double>{}) == 0.0);
}

TEST_CASE("default thresholds are band midpoints") {
    const NetworkSpec net({OscillatorSpec::dr(kDR, 1.0)}, {});
    CHECK_THAT(default_thresholds(net)[0], WithinAbs(0.5, 1e-15));
}

TEST_CASE("half-duty threshold splits the period in two equal halves") {
    const auto osc = OscillatorSpec::dr(kDR, 1.0, 1.0);
    const double level = half_duty_threshold(osc);
    const auto traj = single_dr_run(30.0, {level});
    double above = 0.0;
    bool high = traj.watch_initial[0];
    double t = 0.0;
    const double t0 = 10.0, t1 = 10.0 + 20.0 * kPeriod;
    for (const auto& c : traj.crossings) {
        if (c.t > t0) above += high ? std::min(c.t, t1) - std::max(t, t0) : 0.0;
        high = c.rising;
        t = c.t;
        if (c.t >= t1) break;
    }
    CHECK_THAT(above / (t1 - t0), WithinAbs(0.5, 1e-6));
    CHECK_THROWS_AS(half_duty_threshold(OscillatorSpec::dr(kDR, 10.0)), std::domain_error);
}
