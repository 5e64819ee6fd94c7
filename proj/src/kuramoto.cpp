#include "imtosc/kuramoto.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace imtosc {

void KuramotoConfig::validate() const {
    if (!(t_end >= 0.0)) throw std::invalid_argument("kuramoto.t_end must be >= 0");
    if (!(sample_dt > 0.0)) throw std::invalid_argument("kuramoto.sample_dt must be > 0");
    if (!(rtol > 0.0) || !(atol > 0.0)) throw std::invalid_argument("kuramoto tolerances must be > 0");
}

KuramotoTrajectory kuramoto_simulate(const std::vector<double>& omegas, double K, const std::vector<double>& theta0,
                                     const KuramotoConfig& cfg) {
    cfg.validate();
    if (!(K >= 0.0)) throw std::invalid_argument("kuramoto: K must be >= 0");
    if (omegas.empty() || omegas.size() != theta0.size()) {
        throw std::invalid_argument("kuramoto: omegas and theta0 must be non-empty and equally sized");
    }
    using State = std::vector<double>;
    namespace odeint = boost::numeric::odeint;
    const std::size_t n = omegas.size();
    const double scale = K / static_cast<double>(n);
    const auto rhs = [&](const State& th, State& d, double) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += std::sin(th[j] - th[i]);
            d[i] = omegas[i] + scale * acc;
        }
    };
    KuramotoTrajectory out;
    const auto record = [&](const State& th, double t) {
        out.times.push_back(t);
        out.unwrapped.push_back(th);
        State w(n);
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = std::fmod(th[i], 2.0 * std::numbers::pi);
            if (w[i] < 0.0) w[i] += 2.0 * std::numbers::pi;
        }
        out.phases.push_back(std::move(w));
    };
    State th = theta0;
    auto stepper = odeint::make_dense_output(cfg.atol, cfg.rtol, odeint::runge_kutta_dopri5<State>());
    const auto steps = static_cast<std::size_t>(std::floor(cfg.t_end / cfg.sample_dt + 1e-9));
    std::vector<double> grid;
    for (std::size_t k = 0; k <= steps; ++k) grid.push_back(static_cast<double>(k) * cfg.sample_dt);
    if (grid.back() < cfg.t_end) grid.push_back(cfg.t_end);
    if (grid.size() == 1) {
        record(th, 0.0);
        return out;
    }
    odeint::integrate_times(stepper, rhs, th, grid.begin(), grid.end(), cfg.sample_dt, record);
    return out;
}

}  // namespace imtosc
