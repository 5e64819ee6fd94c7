#include "imtosc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace imtosc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kMaxSectionReturns = 4;
constexpr std::size_t kMinSectionEvents = 10;
constexpr double kPeriodRelTol = 1e-6;

double wrap(double phi) {
    phi = std::fmod(phi, kTwoPi);
    if (phi < 0.0) phi += kTwoPi;
    return phi >= kTwoPi ? 0.0 : phi;
}

std::vector<double> up_switch_times(const Trajectory& traj, std::size_t osc) {
    std::vector<double> times;
    for (const auto& e : traj.events) {
        if (e.osc == osc && e.transition == Transition::ToMetallic) times.push_back(e.t);
    }
    return times;
}

double circular_mean(const std::vector<double>& phases) {
    std::complex<double> acc{0.0, 0.0};
    for (double p : phases) acc += std::polar(1.0, p);
    return wrap(std::arg(acc));
}

/// Mean period over the up-switches at or after t_from (falls back to the last period).
double late_period(const std::vector<double>& ups, double t_from) {
    const auto first = std::lower_bound(ups.begin(), ups.end(), t_from);
    const auto count = std::distance(first, ups.end());
    if (count >= 2) return (ups.back() - *first) / static_cast<double>(count - 1);
    return ups[ups.size() - 1] - ups[ups.size() - 2];
}

}  // namespace

double PhaseSeries::phase_at(double t) const {
    if (event_times.size() < 2) throw TooFewEvents("phase_at: need at least two up-switch events");
    const auto it = std::upper_bound(event_times.begin(), event_times.end(), t);
    std::size_t k;
    if (it == event_times.begin()) {
        k = 0;
    } else {
        k = static_cast<std::size_t>(std::distance(event_times.begin(), it)) - 1;
        k = std::min(k, periods.size() - 1);
    }
    return wrap(kTwoPi * (t - event_times[k]) / periods[k]);
}

PhaseSeries switching_phases(const Trajectory& traj, std::size_t osc) {
    if (osc >= traj.size()) throw std::out_of_range("switching_phases: oscillator index out of range");
    PhaseSeries ps;
    ps.osc = osc;
    ps.event_times = up_switch_times(traj, osc);
    if (ps.event_times.size() < 3) {
        throw TooFewEvents("switching_phases: oscillator " + std::to_string(osc) + " has only " +
                           std::to_string(ps.event_times.size()) + " up-switch events");
    }
    for (std::size_t k = 1; k < ps.event_times.size(); ++k) {
        ps.periods.push_back(ps.event_times[k] - ps.event_times[k - 1]);
    }
    return ps;
}

std::optional<PeriodicOrbit> detect_periodic_orbit(const Trajectory& traj, double tol) {
    std::vector<const EventRecord*> sections;
    std::size_t osc0_events = 0;
    for (const auto& e : traj.events) {
        if (e.osc != 0) continue;
        ++osc0_events;
        if (e.transition == Transition::ToMetallic) sections.push_back(&e);
    }
    if (osc0_events < kMinSectionEvents) return std::nullopt;

    const std::size_t m = sections.size();
    for (std::size_t p = 1; p <= kMaxSectionReturns; ++p) {
        if (m < 2 * p + 2) break;
        const auto close = [&](std::size_t a, std::size_t b) {
            return (sections[a]->x_at_event - sections[b]->x_at_event).cwiseAbs().maxCoeff() <= tol;
        };
        if (!close(m - 1, m - 1 - p) || !close(m - 2, m - 2 - p)) continue;
        PeriodicOrbit orbit;
        orbit.section_returns = p;
        const double t_hi = sections[m - 1]->t;
        const double t_lo = sections[m - 1 - p]->t;
        orbit.period = t_hi - t_lo;
        for (std::size_t k = 0; k < traj.times.size(); ++k) {
            if (traj.times[k] >= t_lo && traj.times[k] <= t_hi) {
                orbit.times.push_back(traj.times[k]);
                orbit.states.push_back(traj.states[k]);
            }
        }
        return orbit;
    }
    return std::nullopt;
}

const char* to_string(LockingKind k) noexcept {
    switch (k) {
        case LockingKind::InPhase: return "InPhase";
        case LockingKind::AntiPhase: return "AntiPhase";
        case LockingKind::LockedOther: return "LockedOther";
        case LockingKind::Unlocked: return "Unlocked";
    }
    return "Unlocked";
}

LockingResult classify_locking(const Trajectory& traj, double eps_phase, double orbit_tol) {
    LockingResult result;
    const std::size_t n = traj.size();
    if (n < 2) throw std::invalid_argument("classify_locking: needs at least two oscillators");

    std::vector<std::vector<double>> ups(n);
    for (std::size_t i = 0; i < n; ++i) {
        ups[i] = up_switch_times(traj, i);
        if (ups[i].size() < 3) return result;
    }
    const auto orbit = detect_periodic_orbit(traj, orbit_tol);
    if (!orbit) return result;

    const double t_begin = traj.times.empty() ? 0.0 : traj.times.front();
    const double t_from = traj.final_t - 0.25 * (traj.final_t - t_begin);
    const double period0 = late_period(ups[0], t_from);

    for (std::size_t j = 1; j < n; ++j) {
        const double period_j = late_period(ups[j], t_from);
        if (std::abs(period_j - period0) > kPeriodRelTol * std::max(period0, period_j)) return result;
        std::vector<double> offsets;
        for (double tj : ups[j]) {
            if (tj < t_from) continue;
            const auto it = std::upper_bound(ups[0].begin(), ups[0].end(), tj);
            if (it == ups[0].begin()) continue;
            offsets.push_back(wrap(kTwoPi * (tj - *std::prev(it)) / period0));
        }
        if (offsets.empty()) return result;
        result.phase_diffs.push_back(circular_mean(offsets));
    }

    result.period = orbit->period / static_cast<double>(orbit->section_returns);
    result.delta_phi = result.phase_diffs.front();
    const double d = result.delta_phi;
    if (d < eps_phase || d > kTwoPi - eps_phase) {
        result.kind = LockingKind::InPhase;
    } else if (std::abs(d - std::numbers::pi) < eps_phase) {
        result.kind = LockingKind::AntiPhase;
    } else {
        result.kind = LockingKind::LockedOther;
    }
    return result;
}

XorWindow default_xor_window(const Trajectory& traj, double periods) {
    const double t_begin = traj.times.empty() ? 0.0 : traj.times.front();
    double burn = t_begin + 0.5 * (traj.final_t - t_begin);
    if (traj.events.size() >= 50) burn = std::max(burn, traj.events[49].t);
    XorWindow w{burn, traj.final_t};
    const auto ups = up_switch_times(traj, 0);
    if (ups.size() >= 2 && periods > 0.0) {
        const double period = ups.back() - ups[ups.size() - 2];
        w.start = std::max(burn, w.end - periods * period);
    }
    return w;
}

XorMeasure xor_measure(const Trajectory& traj, const XorWindow& window, std::size_t a, std::size_t b,
                       bool complement_b) {
    const auto& levels = traj.watch_levels;
    if (levels.empty()) {
        throw std::invalid_argument("xor_measure: trajectory was simulated without watch levels");
    }
    if (a >= levels.size() || b >= levels.size() || a == b) {
        throw std::invalid_argument("xor_measure: invalid oscillator pair");
    }
    const double t_begin = traj.times.empty() ? 0.0 : traj.times.front();
    if (!(window.end > window.start) || window.start < t_begin || window.end > traj.final_t) {
        throw std::invalid_argument("xor_measure: degenerate window or window outside the trajectory");
    }
    bool bit_a = traj.watch_initial[a];
    bool bit_b = traj.watch_initial[b];
    double t = window.start;
    double differ = 0.0;
    for (const auto& c : traj.crossings) {
        if (c.osc != a && c.osc != b) continue;
        if (c.t > window.start) {
            const double upto = std::min(c.t, window.end);
            if (bit_a != bit_b) differ += upto - t;
            t = upto;
            if (c.t >= window.end) break;
        }
        (c.osc == a ? bit_a : bit_b) = c.rising;
    }
    if (t < window.end && bit_a != bit_b) differ += window.end - t;
    if (complement_b) differ = window.duration() - differ;
    const double value = std::clamp(differ / window.duration(), 0.0, 1.0);
    return {value, window, {levels[a], levels[b]}};
}

XorMeasure xor_measure_sampled(const Trajectory& traj, std::span<const double> thresholds,
                               const XorWindow& window, std::size_t a, std::size_t b,
                               bool complement_b) {
    if (a >= thresholds.size() || b >= thresholds.size() || a == b) {
        throw std::invalid_argument("xor_measure_sampled: invalid oscillator pair");
    }
    if (!(window.end > window.start)) throw std::invalid_argument("xor_measure_sampled: degenerate window");
    const auto ia = static_cast<Eigen::Index>(a);
    const auto ib = static_cast<Eigen::Index>(b);
    double differ = 0.0;
    for (std::size_t k = 0; k + 1 < traj.times.size(); ++k) {
        const double lo = std::max(traj.times[k], window.start);
        const double hi = std::min(traj.times[k + 1], window.end);
        if (hi <= lo) continue;
        const bool bit_a = traj.states[k](ia) >= thresholds[a];
        const bool bit_b = (traj.states[k](ib) >= thresholds[b]) != complement_b;
        if (bit_a != bit_b) differ += hi - lo;
    }
    return {std::clamp(differ / window.duration(), 0.0, 1.0), window, {thresholds[a], thresholds[b]}};
}

double order_parameter(std::span<const double> phases) {
    if (phases.empty()) return 0.0;
    std::complex<double> acc{0.0, 0.0};
    for (double p : phases) acc += std::polar(1.0, p);
    return std::abs(acc) / static_cast<double>(phases.size());
}

std::vector<double> default_thresholds(const NetworkSpec& net) {
    std::vector<double> thr;
    thr.reserve(net.size());
    for (const auto& osc : net.oscillators()) thr.push_back(osc.operating_band().mid());
    return thr;
}

double half_duty_threshold(const OscillatorSpec& osc) {
    const auto check = validate_oscillation(osc);
    if (!check.ok) throw std::domain_error("half_duty_threshold: " + check.diagnostic);
    const Band band = osc.operating_band();
    const double c = osc.c_lump();
    const double g_up = osc.node_conductance(ConductionState::Metallic);
    const double rest_up = osc.rail_conductance(ConductionState::Metallic) / g_up;
    const double g_down = osc.node_conductance(ConductionState::Insulating);
    const double rest_down = osc.rail_conductance(ConductionState::Insulating) / g_down;
    const auto rise = [&](double from, double to) { return c / g_up * std::log((rest_up - from) / (rest_up - to)); };
    const auto fall = [&](double from, double to) {
        return c / g_down * std::log((from - rest_down) / (to - rest_down));
    };
    const double half = 0.5 * (rise(band.lo, band.hi) + fall(band.hi, band.lo));
    double lo = band.lo;
    double hi = band.hi;
    // Time above the level decreases monotonically as the level rises.
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double above = rise(mid, band.hi) + fall(band.hi, mid);
        (above > half ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace imtosc
