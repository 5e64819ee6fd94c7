#pragma once

#include <stdexcept>
#include <string>

namespace imtosc {

/// Binary conduction state of an IMT device. The numeric values follow the
/// usual convention of 0 = metallic, 1 = insulating.
enum class ConductionState : int { Metallic = 0, Insulating = 1 };

[[nodiscard]] constexpr ConductionState flipped(ConductionState s) noexcept {
    return s == ConductionState::Metallic ? ConductionState::Insulating
                                          : ConductionState::Metallic;
}

[[nodiscard]] constexpr int to_bit(ConductionState s) noexcept { return static_cast<int>(s); }

[[nodiscard]] inline ConductionState state_from_bit(int b) {
    if (b != 0 && b != 1) {
        throw std::invalid_argument("conduction state must be 0 or 1, got " + std::to_string(b));
    }
    return static_cast<ConductionState>(b);
}

/// Hysteretic insulator-metal-transition device. All voltages are normalized
/// by the supply voltage, so the supply rail sits at 1.
struct DeviceParams {
    double v_h = 0.7;    ///< device voltage at or above which it turns metallic
    double v_l = 0.3;    ///< device voltage at or below which it turns insulating
    double g_dm = 10.0;  ///< metallic conductance
    double g_di = 0.0;   ///< insulating conductance
    double c_int = 1.0;  ///< internal capacitance

    /// Throws std::invalid_argument naming the violated field.
    void validate() const;
};

/// Hysteresis rule: switch to metallic at or above v_h, to insulating at or
/// below v_l, otherwise keep the previous state.
[[nodiscard]] constexpr ConductionState next_state(const DeviceParams& dev, ConductionState s,
                                                   double v_dev) noexcept {
    if (v_dev >= dev.v_h) return ConductionState::Metallic;
    if (v_dev <= dev.v_l) return ConductionState::Insulating;
    return s;
}

[[nodiscard]] constexpr double conductance(const DeviceParams& dev, ConductionState s) noexcept {
    return s == ConductionState::Metallic ? dev.g_dm : dev.g_di;
}

}  // namespace imtosc
