#include "imtosc/engine.hpp"

#include "imtosc/rng.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace imtosc {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double kMinEventGap = 1e-12;
// e^-36 ~ 2e-16: a mode this far along has no visible amplitude left.
constexpr double kDecayHorizon = 36.0;
constexpr double kSamplesPerTimeConstant = 32.0;
constexpr int kRkSubdivisions = 4;
constexpr double kRkMinStep = 1e-14;

double guard_value(const Guard& g, double v) noexcept {
    return g.rising ? v - g.threshold : g.threshold - v;
}

/// Smallest t in (lo, hi] with f(t) >= 0, given f(lo) < 0 <= f(hi).
template <class F>
double bisect(F&& f, double lo, double hi) {
    for (int it = 0; it < 200; ++it) {
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(hi))) break;
        const double mid = 0.5 * (lo + hi);
        if (f(mid) >= 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

/// Writes samples and watch-level crossings into a trajectory as brackets are
/// processed. Sample k sits at k * sample_dt.
class Recorder {
public:
    Recorder(Trajectory& traj, const SimConfig& cfg) : traj_(traj), cfg_(cfg) {}

    void set_state(const StateVector& s) { s_ = &s; }

    void row(double t, const Vector& x, const StateVector& s) {
        traj_.times.push_back(t);
        traj_.states.push_back(x);
        traj_.conduction.push_back(s);
    }

    /// Consumes every sample instant <= t without recording it.
    void skip_through(double t) {
        if (cfg_.sample_dt <= 0.0) return;
        while (sample_time(next_k_) <= t) ++next_k_;
    }

    /// Records samples strictly inside (.., t_until) (or up to and including it).
    template <class Flow>
    void samples(const Flow& f, double t_until, bool inclusive) {
        if (cfg_.sample_dt <= 0.0) return;
        for (;;) {
            const double ts = sample_time(next_k_);
            if (ts > cfg_.t_end || ts > t_until || (!inclusive && ts >= t_until)) break;
            if (traj_.times.empty() || ts > traj_.times.back()) row(ts, f.state(ts), *s_);
            ++next_k_;
        }
    }

    template <class Flow>
    void levels(const Flow& f, double ta, const Vector& xa, double tb, const Vector& xb) {
        const auto& lv = traj_.watch_levels;
        if (lv.empty()) return;
        const std::size_t first = traj_.crossings.size();
        for (std::size_t i = 0; i < lv.size(); ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            const bool above_a = xa(k) >= lv[i];
            const bool above_b = xb(k) >= lv[i];
            if (above_a == above_b) continue;
            const double sign = above_b ? 1.0 : -1.0;
            const double t = bisect([&](double tt) { return sign * (f.value(i, tt) - lv[i]); }, ta, tb);
            traj_.crossings.push_back({t, i, above_b});
        }
        std::sort(traj_.crossings.begin() + static_cast<std::ptrdiff_t>(first), traj_.crossings.end(),
                  [](const LevelCrossing& a, const LevelCrossing& b) {
                      return a.t < b.t || (a.t == b.t && a.osc < b.osc);
                  });
    }

private:
    double sample_time(std::uint64_t k) const { return static_cast<double>(k) * cfg_.sample_dt; }

    Trajectory& traj_;
    const SimConfig& cfg_;
    const StateVector* s_ = nullptr;
    std::uint64_t next_k_ = 0;
};

/// Checks one bracket [ta, tb] for guard crossings. On an event fills `out`
/// and returns true. Records samples and level crossings up to the event (or tb).
template <class Flow>
bool process_bracket(const Flow& f, double ta, const Vector& xa, double tb, const Vector& xb,
                     const std::vector<IndexedGuard>& guards, double tol, Recorder* rec,
                     StepOutcome& out) {
    double t_event = std::numeric_limits<double>::infinity();
    for (const auto& ig : guards) {
        const auto k = static_cast<Eigen::Index>(ig.osc);
        if (guard_value(ig.guard, xa(k)) >= 0.0 || guard_value(ig.guard, xb(k)) < 0.0) continue;
        const double root =
            bisect([&](double t) { return guard_value(ig.guard, f.value(ig.osc, t)); }, ta, tb);
        t_event = std::min(t_event, root);
    }
    if (!std::isfinite(t_event)) {
        if (rec != nullptr) {
            rec->levels(f, ta, xa, tb, xb);
            rec->samples(f, tb, true);
        }
        return false;
    }
    out.event = true;
    out.t = t_event;
    out.x = f.state(t_event);
    out.fired.clear();
    for (const auto& ig : guards) {
        if (guard_value(ig.guard, out.x(static_cast<Eigen::Index>(ig.osc))) >= -tol) out.fired.push_back(ig.osc);
    }
    std::sort(out.fired.begin(), out.fired.end());
    if (rec != nullptr) {
        rec->levels(f, ta, xa, t_event, out.x);
        rec->samples(f, t_event, false);
    }
    return true;
}

std::vector<IndexedGuard> active_guards(const NetworkSpec& net, const StateVector& s) {
    std::vector<IndexedGuard> guards;
    guards.reserve(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) guards.push_back({i, net.oscillator(i).guard(s[i])});
    return guards;
}

// --- exact flow --------------------------------------------------------------

struct ExactFlow {
    const ModalFlow& modal;
    ModalFlow::Segment seg;
    double t0;

    double value(std::size_t i, double t) const { return modal.component(seg, i, t - t0); }
    Vector state(double t) const { return modal.state(seg, t - t0); }
};

StepOutcome walk_exact(const ModalFlow& modal, const Vector& x0, double t0, double t_lim,
                       const std::vector<IndexedGuard>& guards, double tol, Recorder* rec) {
    const ExactFlow flow{modal, modal.start(x0), t0};
    StepOutcome out;
    double ta = t0;
    Vector xa = x0;
    for (;;) {
        const double h = modal.grid_step(flow.seg, ta - t0);
        const double tb = (std::isfinite(h) && ta + h < t_lim) ? ta + h : t_lim;
        const Vector xb = flow.state(tb);
        if (process_bracket(flow, ta, xa, tb, xb, guards, tol, rec, out)) return out;
        if (tb >= t_lim) {
            out.t = t_lim;
            out.x = xb;
            out.converged = !std::isfinite(h);
            for (const auto& ig : guards) {
                if (modal.has_drift(flow.seg, ig.osc)) out.converged = false;
            }
            return out;
        }
        ta = tb;
        xa = xb;
    }
}

class ExactWalker {
public:
    explicit ExactWalker(const NetworkSpec& net) : net_(net) {}

    StepOutcome segment(const StateVector& s, double t0, const Vector& x0, double t_lim,
                        const std::vector<IndexedGuard>& guards, double tol, Recorder& rec) {
        return walk_exact(modal_for(s), x0, t0, t_lim, guards, tol, &rec);
    }

private:
    const ModalFlow& modal_for(const StateVector& s) {
        std::vector<int> key(s.size());
        std::transform(s.begin(), s.end(), key.begin(), to_bit);
        auto it = cache_.find(key);
        if (it == cache_.end()) it = cache_.emplace(std::move(key), ModalFlow(assemble(net_, s))).first;
        return it->second;
    }

    const NetworkSpec& net_;
    std::map<std::vector<int>, ModalFlow> cache_;
};

// --- adaptive Runge-Kutta -------------------------------------------------------

using RkState = std::vector<double>;
using DenseStepper = odeint::dense_output_runge_kutta<
    odeint::controlled_runge_kutta<odeint::runge_kutta_dopri5<RkState>>>;

struct AffineRhs {
    Matrix A;
    Vector b;
    void operator()(const RkState& x, RkState& dxdt, double /*t*/) const {
        const Eigen::Map<const Vector> xv(x.data(), static_cast<Eigen::Index>(x.size()));
        Eigen::Map<Vector> dv(dxdt.data(), static_cast<Eigen::Index>(dxdt.size()));
        dv.noalias() = A * xv + b;
    }
};

struct DenseFlow {
    DenseStepper& stepper;
    mutable RkState buf;

    double value(std::size_t i, double t) const {
        stepper.calc_state(t, buf);
        return buf[i];
    }
    Vector state(double t) const {
        stepper.calc_state(t, buf);
        return Eigen::Map<const Vector>(buf.data(), static_cast<Eigen::Index>(buf.size()));
    }
};

class RkWalker {
public:
    RkWalker(const NetworkSpec& net, const SimConfig& cfg) : net_(net), cfg_(cfg) {}

    StepOutcome segment(const StateVector& s, double t0, const Vector& x0, double t_lim,
                        const std::vector<IndexedGuard>& guards, double tol, Recorder& rec) {
        const AffineRhs& rhs = rhs_for(s);
        DenseStepper stepper = odeint::make_dense_output(cfg_.rk_atol, cfg_.rk_rtol,
                                                         odeint::runge_kutta_dopri5<RkState>());
        const double rate = std::max(rhs.A.cwiseAbs().rowwise().sum().maxCoeff(), 1e-3);
        RkState x(x0.data(), x0.data() + x0.size());
        stepper.initialize(x, t0, 1.0 / (kSamplesPerTimeConstant * rate));
        DenseFlow flow{stepper, RkState(x.size())};
        StepOutcome out;
        double ta = t0;
        Vector xa = x0;
        while (ta < t_lim) {
            stepper.do_step(std::cref(rhs));
            if (stepper.current_time_step() < kRkMinStep) {
                throw StepSizeUnderflow("simulate_adaptive: step size underflow at t=" +
                                        std::to_string(stepper.current_time()));
            }
            const double t_step_end = std::min(stepper.current_time(), t_lim);
            const double t_step_start = ta;
            for (int sub = 1; sub <= kRkSubdivisions; ++sub) {
                const double tb = sub == kRkSubdivisions
                                      ? t_step_end
                                      : t_step_start + (t_step_end - t_step_start) * sub / kRkSubdivisions;
                const Vector xb = flow.state(tb);
                if (process_bracket(flow, ta, xa, tb, xb, guards, tol, &rec, out)) return out;
                ta = tb;
                xa = xb;
            }
        }
        out.t = t_lim;
        out.x = xa;
        return out;
    }

private:
    const AffineRhs& rhs_for(const StateVector& s) {
        std::vector<int> key(s.size());
        std::transform(s.begin(), s.end(), key.begin(), to_bit);
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            const LinearSystem sys = assemble(net_, s);
            Eigen::LLT<Matrix> llt(sys.C);
            if (llt.info() != Eigen::Success) {
                throw SingularSystemError("simulate_adaptive: capacitance matrix is not positive definite");
            }
            it = cache_.emplace(std::move(key), AffineRhs{-llt.solve(sys.G), llt.solve(sys.P)}).first;
        }
        return it->second;
    }

    const NetworkSpec& net_;
    const SimConfig& cfg_;
    std::map<std::vector<int>, AffineRhs> cache_;
};

// --- shared hybrid driver -----------------------------------------------------------

void push_event(Trajectory& traj, double t, std::size_t osc, Transition tr, const Vector& x,
                std::size_t max_events) {
    traj.events.push_back({t, osc, tr, x});
    if (traj.events.size() > max_events) {
        const auto n = std::min<std::size_t>(10, traj.events.size());
        std::vector<EventRecord> last(traj.events.end() - static_cast<std::ptrdiff_t>(n), traj.events.end());
        std::ostringstream msg;
        msg << "simulate: more than " << max_events << " switching events before t=" << t
            << " (possible chattering)";
        throw MaxEventsExceeded(msg.str(), std::move(last));
    }
}

template <class Walker>
Trajectory drive(const NetworkSpec& net, const Vector& x0, const StateVector& s0, const SimConfig& cfg,
                 Walker& walker) {
    const std::size_t n = net.size();
    if (static_cast<std::size_t>(x0.size()) != n || s0.size() != n) {
        throw std::invalid_argument("simulate: x0 and s0 must have one entry per oscillator");
    }
    if (!x0.allFinite()) throw std::invalid_argument("simulate: x0 must be finite");
    cfg.validate(n);

    Trajectory traj;
    traj.t_end = cfg.t_end;
    for (std::size_t i = 0; i < n; ++i) {
        const auto check = validate_oscillation(net.oscillator(i));
        if (!check.ok) traj.warnings.push_back("oscillator " + std::to_string(i) + ": " + check.diagnostic);
    }
    traj.watch_levels = cfg.watch_levels;
    for (std::size_t i = 0; i < traj.watch_levels.size(); ++i) {
        traj.watch_initial.push_back(x0(static_cast<Eigen::Index>(i)) >= traj.watch_levels[i]);
    }

    double t = 0.0;
    Vector x = x0;
    StateVector s = s0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto next = net.oscillator(i).next_state(s[i], x(static_cast<Eigen::Index>(i)));
        if (next != s[i]) {
            s[i] = next;
            push_event(traj, 0.0, i,
                       next == ConductionState::Metallic ? Transition::ToMetallic : Transition::ToInsulating,
                       x, cfg.max_events);
        }
    }

    Recorder rec(traj, cfg);
    rec.set_state(s);
    rec.row(0.0, x, s);
    rec.skip_through(0.0);

    bool warned_rest = false;
    double last_event_t = -std::numeric_limits<double>::infinity();
    while (t < cfg.t_end) {
        const auto guards = active_guards(net, s);
        StepOutcome out = walker.segment(s, t, x, cfg.t_end, guards, cfg.event_tol, rec);
        if (!out.event) {
            t = cfg.t_end;
            x = out.x;
            if (out.converged && !warned_rest) {
                traj.warnings.push_back("flow reached a rest point without switching");
                warned_rest = true;
            }
            break;
        }
        t = std::max(out.t, last_event_t + kMinEventGap);
        x = out.x;
        last_event_t = t;
        for (const auto i : out.fired) {
            const Transition tr = net.oscillator(i).guard(s[i]).transition;
            s[i] = flipped(s[i]);
            push_event(traj, t, i, tr, x, cfg.max_events);
        }
        rec.row(t, x, s);
        rec.skip_through(t);
    }
    if (traj.times.back() < t) rec.row(t, x, s);

    traj.final_x = x;
    traj.final_s = s;
    traj.final_t = t;
    return traj;
}

}  // namespace

// --- public API ------------------------------------------------------------------------

void SimConfig::validate(std::size_t n) const {
    if (!(std::isfinite(t_end) && t_end >= 0.0)) throw std::invalid_argument("sim.t_end must be >= 0");
    if (!(event_tol > 0.0)) throw std::invalid_argument("sim.event_tol must be > 0");
    if (max_events == 0) throw std::invalid_argument("sim.max_events must be > 0");
    if (!std::isfinite(sample_dt)) throw std::invalid_argument("sim.sample_dt must be finite");
    if (!watch_levels.empty() && watch_levels.size() != n) {
        throw std::invalid_argument("sim.watch_levels must have one level per oscillator");
    }
    if (!(rk_rtol > 0.0 && rk_atol > 0.0)) throw std::invalid_argument("sim.rk tolerances must be > 0");
}

ModalFlow::ModalFlow(const LinearSystem& sys) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(sys.G, sys.C, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) {
        throw SingularSystemError("ModalFlow: capacitance matrix is not positive definite");
    }
    V_ = es.eigenvectors();
    lambda_ = es.eigenvalues();
    VtC_ = V_.transpose() * sys.C;
    q_ = V_.transpose() * sys.P;
    const double scale = std::max(lambda_.cwiseAbs().maxCoeff(), 1e-300);
    decaying_.resize(static_cast<std::size_t>(lambda_.size()));
    for (Eigen::Index k = 0; k < lambda_.size(); ++k) {
        decaying_[static_cast<std::size_t>(k)] = lambda_(k) > 1e-13 * scale;
    }
}

ModalFlow::Segment ModalFlow::start(const Vector& x0) const {
    const Vector y0 = VtC_ * x0;
    const auto n = y0.size();
    Segment seg{Vector::Zero(n), Vector::Zero(n), Vector::Zero(n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        if (decaying_[static_cast<std::size_t>(k)]) {
            seg.rest(k) = q_(k) / lambda_(k);
            seg.amplitude(k) = y0(k) - seg.rest(k);
        } else {
            seg.rest(k) = y0(k);
            seg.drift(k) = q_(k);
        }
    }
    return seg;
}

Vector ModalFlow::modal(const Segment& seg, double tau) const {
    Vector y = seg.rest + seg.drift * tau;
    for (Eigen::Index k = 0; k < y.size(); ++k) {
        if (seg.amplitude(k) != 0.0) y(k) += seg.amplitude(k) * std::exp(-lambda_(k) * tau);
    }
    return y;
}

Vector ModalFlow::state(const Segment& seg, double tau) const { return V_ * modal(seg, tau); }

double ModalFlow::component(const Segment& seg, std::size_t i, double tau) const {
    return V_.row(static_cast<Eigen::Index>(i)).dot(modal(seg, tau));
}

double ModalFlow::grid_step(const Segment& seg, double tau) const {
    double fastest = 0.0;
    for (Eigen::Index k = 0; k < lambda_.size(); ++k) {
        if (seg.amplitude(k) == 0.0 || lambda_(k) * tau >= kDecayHorizon) continue;
        fastest = std::max(fastest, lambda_(k));
    }
    if (fastest <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / (kSamplesPerTimeConstant * fastest);
}

bool ModalFlow::has_drift(const Segment& seg, std::size_t i) const {
    const auto row = V_.row(static_cast<Eigen::Index>(i));
    for (Eigen::Index k = 0; k < seg.drift.size(); ++k) {
        if (seg.drift(k) != 0.0 && row(k) != 0.0) return true;
    }
    return false;
}

StepOutcome step_exact(const LinearSystem& sys, const Vector& x0, const std::vector<IndexedGuard>& guards,
                       double t_max, double event_tol) {
    if (!x0.allFinite()) throw std::invalid_argument("step_exact: x0 must be finite");
    if (x0.size() != sys.C.rows()) throw std::invalid_argument("step_exact: x0 has wrong dimension");
    const ModalFlow modal(sys);
    return walk_exact(modal, x0, 0.0, t_max, guards, event_tol, nullptr);
}

Trajectory simulate(const NetworkSpec& net, const Vector& x0, const StateVector& s0, const SimConfig& cfg) {
    ExactWalker walker(net);
    return drive(net, x0, s0, cfg, walker);
}

Trajectory simulate_adaptive(const NetworkSpec& net, const Vector& x0, const StateVector& s0,
                             const SimConfig& cfg) {
    RkWalker walker(net, cfg);
    return drive(net, x0, s0, cfg, walker);
}

Trajectory run(const NetworkSpec& net, const Vector& x0, const StateVector& s0, const SimConfig& cfg) {
    return cfg.integrator == Integrator::ExactExp ? simulate(net, x0, s0, cfg)
                                                  : simulate_adaptive(net, x0, s0, cfg);
}

InitialCondition random_initial_condition(const NetworkSpec& net, std::uint64_t seed) {
    CounterRng rng(seed, 0x1c);
    InitialCondition ic{Vector(static_cast<Eigen::Index>(net.size())), StateVector(net.size())};
    for (std::size_t i = 0; i < net.size(); ++i) {
        const Band band = net.oscillator(i).operating_band();
        ic.x0(static_cast<Eigen::Index>(i)) = rng.uniform(band.lo, band.hi);
        ic.s0[i] = rng.uniform() < 0.5 ? ConductionState::Metallic : ConductionState::Insulating;
    }
    return ic;
}

}  // namespace imtosc
