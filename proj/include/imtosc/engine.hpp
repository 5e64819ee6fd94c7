#pragma once

#include "imtosc/netlist.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace imtosc {

enum class Integrator { ExactExp, AdaptiveRK };

struct SimConfig {
    double t_end = 10.0;
    double event_tol = 1e-10;
    double sample_dt = 0.01;  ///< <= 0 records event points only
    std::size_t max_events = 1'000'000;
    std::uint64_t seed = 0;
    Integrator integrator = Integrator::ExactExp;
    /// Per-oscillator levels whose crossings are located exactly and recorded
    /// in Trajectory::crossings (used by the XOR measure). Empty = none.
    std::vector<double> watch_levels;
    double rk_rtol = 1e-12;
    double rk_atol = 1e-13;

    void validate(std::size_t n) const;
};

struct EventRecord {
    double t = 0.0;
    std::size_t osc = 0;
    Transition transition = Transition::ToMetallic;
    Vector x_at_event;
};

/// Exact crossing of a watch level; rising means the signal is >= level after t.
struct LevelCrossing {
    double t = 0.0;
    std::size_t osc = 0;
    bool rising = true;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<StateVector> conduction;
    std::vector<EventRecord> events;
    std::vector<double> watch_levels;
    std::vector<bool> watch_initial;  ///< x_i(0) >= level_i
    std::vector<LevelCrossing> crossings;
    Vector final_x;
    StateVector final_s;
    double final_t = 0.0;
    double t_end = 0.0;
    std::vector<std::string> warnings;

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(final_x.size()); }
};

struct MaxEventsExceeded : std::runtime_error {
    MaxEventsExceeded(const std::string& what, std::vector<EventRecord> last)
        : std::runtime_error(what), last_events(std::move(last)) {}
    std::vector<EventRecord> last_events;
};

struct StepSizeUnderflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Closed-form flow of one conduction state. The pencil (G, C) is symmetric
/// definite, so G V = C V diag(lambda) with V^T C V = I and every mode
/// evolves independently: decaying modes relax exponentially towards their
/// rest value, zero modes drift linearly.
class ModalFlow {
public:
    explicit ModalFlow(const LinearSystem& sys);

    struct Segment {
        Vector rest;       ///< modal rest values (decaying) or initial values (zero modes)
        Vector amplitude;  ///< decaying-mode offsets from rest
        Vector drift;      ///< zero-mode slopes
    };

    [[nodiscard]] Segment start(const Vector& x0) const;
    [[nodiscard]] Vector state(const Segment& seg, double tau) const;
    [[nodiscard]] double component(const Segment& seg, std::size_t i, double tau) const;
    /// Step length resolving the fastest mode still carrying amplitude at tau;
    /// +inf when only the affine part remains.
    [[nodiscard]] double grid_step(const Segment& seg, double tau) const;
    [[nodiscard]] bool has_drift(const Segment& seg, std::size_t i) const;

    [[nodiscard]] const Vector& rates() const noexcept { return lambda_; }

private:
    Vector modal(const Segment& seg, double tau) const;

    Matrix V_;
    Matrix VtC_;
    Vector lambda_;
    Vector q_;
    std::vector<bool> decaying_;
};

struct IndexedGuard {
    std::size_t osc = 0;
    Guard guard;
};

struct StepOutcome {
    bool event = false;
    double t = 0.0;  ///< event time, or t_max when no event
    Vector x;
    std::vector<std::size_t> fired;  ///< oscillator indices, ascending
    bool converged = false;          ///< no event and the flow has reached its rest point
};

/// Advances one conduction state exactly from x0 and locates the earliest
/// guard crossing before t_max. All guards within event_tol of their
/// threshold at that instant fire together.
[[nodiscard]] StepOutcome step_exact(const LinearSystem& sys, const Vector& x0,
                                     const std::vector<IndexedGuard>& guards, double t_max,
                                     double event_tol = 1e-10);

[[nodiscard]] Trajectory simulate(const NetworkSpec& net, const Vector& x0, const StateVector& s0,
                                  const SimConfig& cfg);

/// Same contract as simulate() with a Dormand-Prince 5(4) pair and
/// dense-output event location. Used as an independent cross-check.
[[nodiscard]] Trajectory simulate_adaptive(const NetworkSpec& net, const Vector& x0,
                                           const StateVector& s0, const SimConfig& cfg);

/// Dispatches on cfg.integrator.
[[nodiscard]] Trajectory run(const NetworkSpec& net, const Vector& x0, const StateVector& s0,
                             const SimConfig& cfg);

/// Node voltages uniform in each operating band, states uniform.
struct InitialCondition {
    Vector x0;
    StateVector s0;
};
[[nodiscard]] InitialCondition random_initial_condition(const NetworkSpec& net, std::uint64_t seed);

}  // namespace imtosc
