#pragma once

#include "imtosc/analysis.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace imtosc {

struct NonOscillating : std::domain_error {
    using std::domain_error::domain_error;
};

enum class ThresholdRule { HalfDuty, BandMidpoint };

/// A capacitively coupled pair of D-R oscillators whose series resistances
/// are transistors driven by the two inputs.
struct ComparatorConfig {
    DeviceParams device{0.7, 0.3, 10.0, 0.0, 1.0};
    double c_lump = 1.0;
    double c_c = 0.1;
    double k = 1.0;    ///< transistor transconductance
    double v_t = 0.0;  ///< transistor threshold
    double v_gs_min = 1.0;
    double v_gs_max = 3.0;
    double t_end = 300.0;
    double event_tol = 1e-10;
    double window_periods = 20.0;
    /// Binarize the second output with inverted polarity. The symmetric pair
    /// locks anti-phase, so its outputs are complementary at equal inputs.
    bool complement = true;
    ThresholdRule thresholds = ThresholdRule::HalfDuty;

    void validate() const;
};

struct ComparatorResult {
    XorMeasure xor_value;
    LockingKind locking = LockingKind::Unlocked;
    std::optional<double> period;

    [[nodiscard]] bool locked() const noexcept { return locking != LockingKind::Unlocked; }
};

/// Builds the pair network for the given inputs (oscillator 0 driven by v_gs1).
[[nodiscard]] NetworkSpec comparator_network(double v_gs1, double v_gs2, const ComparatorConfig& cfg);

/// Simulates the pair to steady state and returns its averaged XOR measure.
/// Symmetric in its inputs by construction.
[[nodiscard]] ComparatorResult comparator(double v_gs1, double v_gs2, const ComparatorConfig& cfg);

struct XorSurface {
    std::vector<double> vgs1_grid;  ///< rows
    std::vector<double> vgs2_grid;  ///< columns
    Matrix values;                  ///< NaN where the cell failed
    std::vector<std::vector<bool>> locked;
    std::vector<std::string> errors;  ///< "row,col: message" for failed cells
};

/// Evenly spaced grid of n points over [lo, hi].
[[nodiscard]] std::vector<double> linear_grid(double lo, double hi, std::size_t n);

[[nodiscard]] XorSurface xor_surface(const std::vector<double>& vgs1_grid, const std::vector<double>& vgs2_grid,
                                     const ComparatorConfig& cfg, std::size_t jobs = 1);

/// Square surface on one grid; evaluates the upper triangle and mirrors it,
/// which is exact because comparator() is symmetric.
[[nodiscard]] XorSurface xor_surface_square(const std::vector<double>& grid, const ComparatorConfig& cfg,
                                            std::size_t jobs = 1);

/// Bilinear interpolation over a precomputed square XOR surface.
class XorLookup {
public:
    XorLookup(double lo, double hi, std::size_t resolution, const ComparatorConfig& cfg, std::size_t jobs = 1);
    explicit XorLookup(XorSurface surface);

    [[nodiscard]] double operator()(double v_gs1, double v_gs2) const;
    [[nodiscard]] const XorSurface& surface() const noexcept { return surface_; }

private:
    XorSurface surface_;
};

}  // namespace imtosc
