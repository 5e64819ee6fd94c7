#include "imtosc/device.hpp"

#include <cmath>

namespace imtosc {

void DeviceParams::validate() const {
    if (!std::isfinite(v_l) || !std::isfinite(v_h) || !(0.0 < v_l && v_l < v_h && v_h < 1.0)) {
        throw std::invalid_argument("device: thresholds must satisfy 0 < v_l < v_h < 1 (v_l=" +
                                    std::to_string(v_l) + ", v_h=" + std::to_string(v_h) + ")");
    }
    if (!(g_di >= 0.0)) throw std::invalid_argument("device: g_di must be >= 0");
    if (!(g_dm > g_di)) throw std::invalid_argument("device: g_dm must exceed g_di");
    if (!(c_int > 0.0)) throw std::invalid_argument("device: c_int must be > 0");
}

}  // namespace imtosc
