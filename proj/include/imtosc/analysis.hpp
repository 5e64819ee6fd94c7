#pragma once

#include "imtosc/engine.hpp"

#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace imtosc {

struct TooFewEvents : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Up-switch (ToMetallic) times of one oscillator. Phase is 0 at each
/// up-switch and grows linearly to 2*pi at the next one.
struct PhaseSeries {
    std::size_t osc = 0;
    std::vector<double> event_times;
    std::vector<double> periods;  ///< successive differences of event_times

    /// Phase in [0, 2*pi). Outside the recorded span the nearest period is extrapolated.
    [[nodiscard]] double phase_at(double t) const;
};

[[nodiscard]] PhaseSeries switching_phases(const Trajectory& traj, std::size_t osc);

struct PeriodicOrbit {
    double period = 0.0;
    std::size_t section_returns = 1;  ///< section crossings per period
    std::vector<double> times;        ///< samples over the final period
    std::vector<Vector> states;
};

/// Poincare section at oscillator 0's up-switches; periodic when the section
/// state repeats (sup-norm <= tol) after 1..4 returns, confirmed twice.
[[nodiscard]] std::optional<PeriodicOrbit> detect_periodic_orbit(const Trajectory& traj, double tol = 1e-7);

enum class LockingKind { InPhase, AntiPhase, LockedOther, Unlocked };

[[nodiscard]] const char* to_string(LockingKind k) noexcept;

struct LockingResult {
    LockingKind kind = LockingKind::Unlocked;
    double delta_phi = 0.0;  ///< oscillator 1 relative to oscillator 0, [0, 2*pi)
    std::optional<double> period;
    std::vector<double> phase_diffs;  ///< oscillator j relative to oscillator 0, j = 1..N-1
};

inline constexpr double kDefaultPhaseEps = 0.05 * 2.0 * std::numbers::pi;

[[nodiscard]] LockingResult classify_locking(const Trajectory& traj, double eps_phase = kDefaultPhaseEps,
                                             double orbit_tol = 1e-7);

struct XorWindow {
    double start = 0.0;
    double end = 0.0;
    [[nodiscard]] double duration() const { return end - start; }
};

struct XorMeasure {
    double value = 0.0;
    XorWindow window;
    std::vector<double> thresholds;
};

/// Steady-state window: skip the first half of the run or the first 50
/// events, whichever ends later, then average over up to `periods` periods of
/// oscillator 0 (the whole remainder when the period is unknown).
[[nodiscard]] XorWindow default_xor_window(const Trajectory& traj, double periods = 20.0);

/// Time fraction of the window where the binarized outputs of oscillators
/// a and b differ, computed from the exact level crossings recorded by the
/// simulator (SimConfig::watch_levels are the thresholds). With
/// complement_b the second output is binarized with inverted polarity, so
/// the value measures disagreement with the complementary waveform.
[[nodiscard]] XorMeasure xor_measure(const Trajectory& traj, const XorWindow& window, std::size_t a = 0,
                                     std::size_t b = 1, bool complement_b = false);

/// Left-point approximation of the same quantity from trajectory samples.
[[nodiscard]] XorMeasure xor_measure_sampled(const Trajectory& traj, std::span<const double> thresholds,
                                             const XorWindow& window, std::size_t a = 0, std::size_t b = 1,
                                             bool complement_b = false);

/// Kuramoto order parameter |mean exp(i theta)|.
[[nodiscard]] double order_parameter(std::span<const double> phases);

/// Midpoint of each oscillator's operating band.
[[nodiscard]] std::vector<double> default_thresholds(const NetworkSpec& net);

/// Level at which the free-running oscillator spends exactly half of its
/// period above; its binarized output then has a 50% duty cycle.
/// Throws std::domain_error when the oscillator does not oscillate.
[[nodiscard]] double half_duty_threshold(const OscillatorSpec& osc);

}  // namespace imtosc
