#include "imtosc/netlist.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <utility>

namespace imtosc {

namespace {

constexpr double kThresholdTol = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

OscillatorSpec OscillatorSpec::dd(const DeviceParams& top, const DeviceParams& bottom, double c_lump) {
    top.validate();
    bottom.validate();
    require(std::abs(top.v_l + top.v_h - 1.0) <= kThresholdTol,
            "oscillator: D-D top device needs v_l + v_h = 1");
    require(std::abs(bottom.v_l + bottom.v_h - 1.0) <= kThresholdTol,
            "oscillator: D-D bottom device needs v_l + v_h = 1");
    require(std::abs(top.v_h - bottom.v_h) <= kThresholdTol,
            "oscillator: D-D devices must share thresholds");
    if (c_lump <= 0.0) c_lump = top.c_int + bottom.c_int;
    return OscillatorSpec(DDCircuit{top, bottom}, c_lump);
}

OscillatorSpec OscillatorSpec::dr(const DeviceParams& device, double g_s, double c_lump) {
    device.validate();
    require(std::isfinite(g_s) && g_s > 0.0, "oscillator: g_s must be > 0");
    if (c_lump <= 0.0) c_lump = device.c_int;
    return OscillatorSpec(DRCircuit{device, g_s}, c_lump);
}

double OscillatorSpec::node_conductance(ConductionState s) const noexcept {
    return std::visit(overloaded{
                          [s](const DDCircuit& c) {
                              return conductance(c.top, s) + conductance(c.bottom, flipped(s));
                          },
                          [s](const DRCircuit& c) { return conductance(c.device, s) + c.g_s; },
                      },
                      circuit_);
}

double OscillatorSpec::rail_conductance(ConductionState s) const noexcept {
    return std::visit(overloaded{
                          [s](const DDCircuit& c) { return conductance(c.top, s); },
                          [s](const DRCircuit& c) { return conductance(c.device, s); },
                      },
                      circuit_);
}

Guard OscillatorSpec::guard(ConductionState s) const noexcept {
    const Band band = operating_band();
    if (s == ConductionState::Metallic) return {band.hi, true, Transition::ToInsulating};
    return {band.lo, false, Transition::ToMetallic};
}

Band OscillatorSpec::operating_band() const noexcept {
    return std::visit(overloaded{
                          // The top device sees 1 - v; the bottom device sees v.
                          [](const DDCircuit& c) { return Band{c.bottom.v_l, c.bottom.v_h}; },
                          // The device sits between the rail and the node, so it sees 1 - v.
                          [](const DRCircuit& c) { return Band{1.0 - c.device.v_h, 1.0 - c.device.v_l}; },
                      },
                      circuit_);
}

ConductionState OscillatorSpec::next_state(ConductionState s, double v) const noexcept {
    return std::visit(overloaded{
                          [&](const DDCircuit& c) { return imtosc::next_state(c.top, s, 1.0 - v); },
                          [&](const DRCircuit& c) { return imtosc::next_state(c.device, s, 1.0 - v); },
                      },
                      circuit_);
}

OscillatorSpec OscillatorSpec::with_series_conductance(double g_s) const {
    const auto* dr = std::get_if<DRCircuit>(&circuit_);
    require(dr != nullptr, "oscillator: series conductance only applies to D-R");
    return OscillatorSpec::dr(dr->device, g_s, c_lump_);
}

OscillatorSpec OscillatorSpec::with_c_lump(double c_lump) const {
    require(c_lump > 0.0, "oscillator: c_lump must be > 0");
    OscillatorSpec copy = *this;
    copy.c_lump_ = c_lump;
    return copy;
}

NetworkSpec::NetworkSpec(std::vector<OscillatorSpec> oscillators, std::vector<CouplingSpec> couplings)
    : oscillators_(std::move(oscillators)), couplings_(std::move(couplings)) {
    require(!oscillators_.empty(), "network: needs at least one oscillator");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& cp : couplings_) {
        require(cp.i < oscillators_.size() && cp.j < oscillators_.size(),
                "network: coupling index out of range");
        require(cp.i != cp.j, "network: coupling must join two distinct oscillators");
        require(std::isfinite(cp.c_c) && cp.c_c >= 0.0, "network: coupling c_c must be >= 0");
        require(std::isfinite(cp.g_c) && cp.g_c >= 0.0, "network: coupling g_c must be >= 0");
        require(cp.c_c > 0.0 || cp.g_c > 0.0, "network: coupling needs c_c > 0 or g_c > 0");
        const auto key = std::minmax(cp.i, cp.j);
        require(seen.insert(key).second, "network: duplicate coupling between " +
                                             std::to_string(key.first) + " and " +
                                             std::to_string(key.second));
    }
}

LinearSystem assemble(const NetworkSpec& net, const StateVector& s) {
    const auto n = net.size();
    if (s.size() != n) {
        throw std::invalid_argument("assemble: state vector has " + std::to_string(s.size()) +
                                    " entries, network has " + std::to_string(n));
    }
    LinearSystem sys{Matrix::Zero(n, n), Matrix::Zero(n, n), Vector::Zero(n), s};
    for (std::size_t i = 0; i < n; ++i) {
        const auto& osc = net.oscillator(i);
        const auto k = static_cast<Eigen::Index>(i);
        sys.C(k, k) += osc.c_lump();
        sys.G(k, k) += osc.node_conductance(s[i]);
        sys.P(k) += osc.rail_conductance(s[i]);
    }
    for (const auto& cp : net.couplings()) {
        const auto a = static_cast<Eigen::Index>(cp.i);
        const auto b = static_cast<Eigen::Index>(cp.j);
        sys.C(a, a) += cp.c_c;
        sys.C(b, b) += cp.c_c;
        sys.C(a, b) -= cp.c_c;
        sys.C(b, a) -= cp.c_c;
        sys.G(a, a) += cp.g_c;
        sys.G(b, b) += cp.g_c;
        sys.G(a, b) -= cp.g_c;
        sys.G(b, a) -= cp.g_c;
    }
    return sys;
}

Vector fixed_point(const LinearSystem& sys) {
    Eigen::FullPivLU<Matrix> lu(sys.G);
    if (!lu.isInvertible()) throw SingularSystemError("fixed_point: conductance matrix is singular");
    return lu.solve(sys.P);
}

Matrix flow_matrix(const LinearSystem& sys) {
    Eigen::LLT<Matrix> llt(sys.C);
    if (llt.info() != Eigen::Success) {
        throw SingularSystemError("flow_matrix: capacitance matrix is not positive definite");
    }
    return -llt.solve(sys.G);
}

OscillationCheck validate_oscillation(const OscillatorSpec& osc) {
    const Band band = osc.operating_band();
    std::ostringstream diag;
    bool ok = true;
    for (auto s : {ConductionState::Metallic, ConductionState::Insulating}) {
        const double g = osc.node_conductance(s);
        const double p = osc.rail_conductance(s);
        const char* name = s == ConductionState::Metallic ? "metallic" : "insulating";
        if (!(g > 0.0)) {
            ok = false;
            diag << name << " state has no conductive path; ";
            continue;
        }
        const double rest = p / g;
        const bool outside = s == ConductionState::Metallic ? rest > band.hi : rest < band.lo;
        if (!outside) {
            ok = false;
            diag << name << " rest point " << rest << " lies inside reach of the band [" << band.lo
                 << ", " << band.hi << "]; ";
        }
    }
    return {ok, ok ? std::string("oscillates") : diag.str()};
}

double gs_from_vgs(double v_gs, double k, double v_t) {
    if (!(k > 0.0)) throw std::invalid_argument("gs_from_vgs: k must be > 0");
    return k * std::max(v_gs - v_t, 0.0);
}

}  // namespace imtosc
