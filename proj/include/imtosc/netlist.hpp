#pragma once

#include "imtosc/device.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace imtosc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using StateVector = std::vector<ConductionState>;

/// Two IMT devices in series between the rail and the output node. The
/// oscillator state is the state of the top (rail-side) device; the bottom
/// device is always in the opposite state.
struct DDCircuit {
    DeviceParams top;
    DeviceParams bottom;
};

/// One IMT device between the rail and the output node, with a series
/// conductance g_s from the output node to ground.
struct DRCircuit {
    DeviceParams device;
    double g_s = 1.0;
};

enum class OscillatorKind { DD, DR };
enum class Transition { ToMetallic, ToInsulating };

/// Switching guard on the output-node voltage for one conduction state.
struct Guard {
    double threshold = 0.0;
    bool rising = true;  ///< fires when v >= threshold (rising) or v <= threshold (falling)
    Transition transition = Transition::ToMetallic;
};

struct Band {
    double lo = 0.0;
    double hi = 1.0;
    [[nodiscard]] double mid() const { return 0.5 * (lo + hi); }
};

class OscillatorSpec {
public:
    /// D-D oscillator. Each device must satisfy v_l + v_h = 1 and both devices
    /// must share thresholds, so that they always switch together.
    /// c_lump <= 0 means "sum of the devices' internal capacitances".
    static OscillatorSpec dd(const DeviceParams& top, const DeviceParams& bottom, double c_lump = 0.0);
    static OscillatorSpec dr(const DeviceParams& device, double g_s, double c_lump = 0.0);

    [[nodiscard]] OscillatorKind kind() const noexcept {
        return std::holds_alternative<DDCircuit>(circuit_) ? OscillatorKind::DD : OscillatorKind::DR;
    }
    [[nodiscard]] const std::variant<DDCircuit, DRCircuit>& circuit() const noexcept { return circuit_; }
    [[nodiscard]] double c_lump() const noexcept { return c_lump_; }

    /// Total conductance from the output node to either rail in state s.
    [[nodiscard]] double node_conductance(ConductionState s) const noexcept;
    /// Conductance from the output node to the supply rail in state s.
    [[nodiscard]] double rail_conductance(ConductionState s) const noexcept;
    [[nodiscard]] Guard guard(ConductionState s) const noexcept;
    /// Node-voltage interval traversed by a free-running oscillation.
    [[nodiscard]] Band operating_band() const noexcept;

    /// Applies the device hysteresis rule to the node voltage v.
    [[nodiscard]] ConductionState next_state(ConductionState s, double v) const noexcept;

    /// Same oscillator with a different series conductance (D-R only).
    [[nodiscard]] OscillatorSpec with_series_conductance(double g_s) const;
    [[nodiscard]] OscillatorSpec with_c_lump(double c_lump) const;

private:
    OscillatorSpec(std::variant<DDCircuit, DRCircuit> c, double c_lump)
        : circuit_(std::move(c)), c_lump_(c_lump) {}

    std::variant<DDCircuit, DRCircuit> circuit_;
    double c_lump_;
};

/// Parallel RC element between two output nodes. g_c = 1/R_C.
struct CouplingSpec {
    std::size_t i = 0;
    std::size_t j = 1;
    double c_c = 0.0;
    double g_c = 0.0;
};

class NetworkSpec {
public:
    NetworkSpec() = default;
    NetworkSpec(std::vector<OscillatorSpec> oscillators, std::vector<CouplingSpec> couplings);

    [[nodiscard]] std::size_t size() const noexcept { return oscillators_.size(); }
    [[nodiscard]] const std::vector<OscillatorSpec>& oscillators() const noexcept { return oscillators_; }
    [[nodiscard]] const std::vector<CouplingSpec>& couplings() const noexcept { return couplings_; }
    [[nodiscard]] const OscillatorSpec& oscillator(std::size_t i) const { return oscillators_.at(i); }

private:
    std::vector<OscillatorSpec> oscillators_;
    std::vector<CouplingSpec> couplings_;
};

/// C x' = -G x + P for one conduction-state vector.
struct LinearSystem {
    Matrix C;
    Matrix G;
    Vector P;
    StateVector s;
};

struct SingularSystemError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Kirchhoff assembly of the nodal equations.
[[nodiscard]] LinearSystem assemble(const NetworkSpec& net, const StateVector& s);

/// Rest point G^-1 P of the current conduction state; throws SingularSystemError.
[[nodiscard]] Vector fixed_point(const LinearSystem& sys);

/// -C^-1 G; x' = flow (x - fixed point). Throws SingularSystemError if C is not PD.
[[nodiscard]] Matrix flow_matrix(const LinearSystem& sys);

struct OscillationCheck {
    bool ok = false;
    std::string diagnostic;
};

/// True when each conduction state's rest point lies strictly outside the
/// operating band on the side the guard pushes towards.
[[nodiscard]] OscillationCheck validate_oscillation(const OscillatorSpec& osc);

/// Ideal linear transistor: g_s = k * max(v_gs - v_t, 0).
[[nodiscard]] double gs_from_vgs(double v_gs, double k, double v_t);

}  // namespace imtosc
