#include "imtosc/comparator.hpp"

#include "imtosc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace imtosc {

void ComparatorConfig::validate() const {
    device.validate();
    if (!(c_lump > 0.0)) throw std::invalid_argument("comparator.c_lump must be > 0");
    if (!(c_c > 0.0)) throw std::invalid_argument("comparator.c_c must be > 0");
    if (!(k > 0.0)) throw std::invalid_argument("comparator.k must be > 0");
    if (!(v_gs_min < v_gs_max)) throw std::invalid_argument("comparator.v_gs_min must be < v_gs_max");
    if (!(t_end > 0.0)) throw std::invalid_argument("comparator.t_end must be > 0");
    if (!(event_tol > 0.0)) throw std::invalid_argument("comparator.event_tol must be > 0");
    if (!(window_periods > 0.0)) throw std::invalid_argument("comparator.window_periods must be > 0");
}

NetworkSpec comparator_network(double v_gs1, double v_gs2, const ComparatorConfig& cfg) {
    std::vector<OscillatorSpec> oscs;
    for (double v : {v_gs1, v_gs2}) {
        if (!(v >= cfg.v_gs_min && v <= cfg.v_gs_max)) {
            throw std::invalid_argument("comparator: v_gs=" + std::to_string(v) + " outside [" +
                                        std::to_string(cfg.v_gs_min) + ", " + std::to_string(cfg.v_gs_max) + "]");
        }
        const double g_s = gs_from_vgs(v, cfg.k, cfg.v_t);
        if (!(g_s > 0.0)) throw NonOscillating("comparator: transistor is cut off at v_gs=" + std::to_string(v));
        auto osc = OscillatorSpec::dr(cfg.device, g_s, cfg.c_lump);
        const auto check = validate_oscillation(osc);
        if (!check.ok) {
            throw NonOscillating("comparator: no oscillation at v_gs=" + std::to_string(v) + ": " + check.diagnostic);
        }
        oscs.push_back(std::move(osc));
    }
    return NetworkSpec(std::move(oscs), {CouplingSpec{0, 1, cfg.c_c, 0.0}});
}

ComparatorResult comparator(double v_gs1, double v_gs2, const ComparatorConfig& cfg) {
    // Canonical order: the lower input always drives oscillator 0.
    if (v_gs2 < v_gs1) std::swap(v_gs1, v_gs2);
    const NetworkSpec net = comparator_network(v_gs1, v_gs2, cfg);

    SimConfig sim;
    sim.t_end = cfg.t_end;
    sim.event_tol = cfg.event_tol;
    sim.sample_dt = 0.0;
    if (cfg.thresholds == ThresholdRule::HalfDuty) {
        sim.watch_levels = {half_duty_threshold(net.oscillator(0)), half_duty_threshold(net.oscillator(1))};
    } else {
        sim.watch_levels = default_thresholds(net);
    }

    const Band band = net.oscillator(0).operating_band();
    Vector x0(2);
    x0 << band.lo + 0.25 * (band.hi - band.lo), band.lo + 0.75 * (band.hi - band.lo);
    const StateVector s0{ConductionState::Metallic, ConductionState::Insulating};
    const Trajectory traj = simulate(net, x0, s0, sim);

    ComparatorResult result;
    result.xor_value = xor_measure(traj, default_xor_window(traj, cfg.window_periods), 0, 1, cfg.complement);
    const LockingResult lock = classify_locking(traj);
    result.locking = lock.kind;
    result.period = lock.period;
    return result;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    if (n == 0) throw std::invalid_argument("linear_grid: needs at least one point");
    if (n == 1) return {lo};
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    g.back() = hi;
    return g;
}

XorSurface xor_surface(const std::vector<double>& vgs1_grid, const std::vector<double>& vgs2_grid,
                       const ComparatorConfig& cfg, std::size_t jobs) {
    const auto monotone = [](const std::vector<double>& g) {
        return !g.empty() && std::adjacent_find(g.begin(), g.end(), std::greater_equal<>()) == g.end();
    };
    if (!monotone(vgs1_grid) || !monotone(vgs2_grid)) {
        throw std::invalid_argument("xor_surface: grids must be non-empty and strictly increasing");
    }
    cfg.validate();
    const std::size_t rows = vgs1_grid.size();
    const std::size_t cols = vgs2_grid.size();
    XorSurface surf{vgs1_grid, vgs2_grid,
                    Matrix::Constant(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols),
                                     std::numeric_limits<double>::quiet_NaN()),
                    std::vector<std::vector<bool>>(rows, std::vector<bool>(cols, false)), {}};
    std::vector<std::string> cell_errors(rows * cols);
    std::vector<char> cell_locked(rows * cols, 0);
    parallel_for(rows * cols, jobs, [&](std::size_t idx) {
        const std::size_t r = idx / cols;
        const std::size_t c = idx % cols;
        try {
            const auto res = comparator(vgs1_grid[r], vgs2_grid[c], cfg);
            surf.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = res.xor_value.value;
            cell_locked[idx] = res.locked() ? 1 : 0;
        } catch (const std::exception& e) {
            cell_errors[idx] = e.what();
        }
    });
    for (std::size_t idx = 0; idx < rows * cols; ++idx) {
        surf.locked[idx / cols][idx % cols] = cell_locked[idx] != 0;
        if (!cell_errors[idx].empty()) {
            surf.errors.push_back(std::to_string(idx / cols) + "," + std::to_string(idx % cols) + ": " +
                                  cell_errors[idx]);
        }
    }
    return surf;
}

XorSurface xor_surface_square(const std::vector<double>& grid, const ComparatorConfig& cfg, std::size_t jobs) {
    if (grid.empty() || std::adjacent_find(grid.begin(), grid.end(), std::greater_equal<>()) != grid.end()) {
        throw std::invalid_argument("xor_surface_square: grid must be non-empty and strictly increasing");
    }
    cfg.validate();
    const std::size_t n = grid.size();
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r; c < n; ++c) cells.emplace_back(r, c);
    std::vector<double> values(cells.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<char> locked(cells.size(), 0);
    std::vector<std::string> errors(cells.size());
    parallel_for(cells.size(), jobs, [&](std::size_t k) {
        try {
            const auto res = comparator(grid[cells[k].first], grid[cells[k].second], cfg);
            values[k] = res.xor_value.value;
            locked[k] = res.locked() ? 1 : 0;
        } catch (const std::exception& e) {
            errors[k] = e.what();
        }
    });
    const auto N = static_cast<Eigen::Index>(n);
    XorSurface surf{grid, grid, Matrix::Constant(N, N, std::numeric_limits<double>::quiet_NaN()),
                    std::vector<std::vector<bool>>(n, std::vector<bool>(n, false)), {}};
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const auto [r, c] = cells[k];
        const auto R = static_cast<Eigen::Index>(r);
        const auto C = static_cast<Eigen::Index>(c);
        surf.values(R, C) = surf.values(C, R) = values[k];
        surf.locked[r][c] = surf.locked[c][r] = locked[k] != 0;
        if (!errors[k].empty()) surf.errors.push_back(std::to_string(r) + "," + std::to_string(c) + ": " + errors[k]);
    }
    return surf;
}

XorLookup::XorLookup(double lo, double hi, std::size_t resolution, const ComparatorConfig& cfg, std::size_t jobs)
    : XorLookup(xor_surface_square(linear_grid(lo, hi, resolution), cfg, jobs)) {}

XorLookup::XorLookup(XorSurface surface) : surface_(std::move(surface)) {
    if (surface_.vgs1_grid.size() < 2 || surface_.vgs2_grid.size() < 2) {
        throw std::invalid_argument("XorLookup: needs at least a 2x2 grid");
    }
    if (!surface_.errors.empty()) {
        throw std::invalid_argument("XorLookup: surface has failed cells: " + surface_.errors.front());
    }
}

namespace {

/// Cell index and fractional offset of v within a strictly increasing grid (clamped).
std::pair<std::size_t, double> locate(const std::vector<double>& grid, double v) {
    v = std::clamp(v, grid.front(), grid.back());
    auto it = std::upper_bound(grid.begin(), grid.end(), v);
    std::size_t i = it == grid.begin() ? 0 : static_cast<std::size_t>(std::distance(grid.begin(), it)) - 1;
    i = std::min(i, grid.size() - 2);
    return {i, (v - grid[i]) / (grid[i + 1] - grid[i])};
}

}  // namespace

double XorLookup::operator()(double v_gs1, double v_gs2) const {
    const auto [r, fr] = locate(surface_.vgs1_grid, v_gs1);
    const auto [c, fc] = locate(surface_.vgs2_grid, v_gs2);
    const auto& m = surface_.values;
    const auto R = static_cast<Eigen::Index>(r);
    const auto C = static_cast<Eigen::Index>(c);
    return (1 - fr) * (1 - fc) * m(R, C) + (1 - fr) * fc * m(R, C + 1) + fr * (1 - fc) * m(R + 1, C) +
           fr * fc * m(R + 1, C + 1);
}

}  // namespace imtosc
