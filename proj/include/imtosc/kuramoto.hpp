#pragma once

#include <cstddef>
#include <vector>

namespace imtosc {

struct KuramotoConfig {
    double t_end = 100.0;
    double sample_dt = 0.1;
    double rtol = 1e-10;
    double atol = 1e-12;

    void validate() const;
};

struct KuramotoTrajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> phases;     ///< wrapped to [0, 2pi)
    std::vector<std::vector<double>> unwrapped;  ///< continuous phases
};

/// Integrates theta_i' = omega_i + (K/N) sum_j sin(theta_j - theta_i) with an
/// adaptive Dormand-Prince pair, sampled every sample_dt (plus t_end).
[[nodiscard]] KuramotoTrajectory kuramoto_simulate(const std::vector<double>& omegas, double K,
                                                   const std::vector<double>& theta0, const KuramotoConfig& cfg);

}  // namespace imtosc
