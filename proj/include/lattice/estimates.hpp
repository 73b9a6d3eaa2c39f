#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lattice/forcing.hpp"
#include "lattice/integrator.hpp"
#include "lattice/state.hpp"

namespace lattice::estimates {

/// Derivative bound of the cubic smoothstep used as the cutoff profile.
inline constexpr double kCutoffDerivativeBound = 1.5;

/// Ball of radius M(T) from the Gronwall estimate, together with its T -> infinity limit.
struct AbsorbingBall {
    double radius = 0.0;
    double asymptotic_radius = 0.0;
    double horizon = 0.0;
    double lambda = 0.0;
    double alpha = 0.0;
    double forcing_bound = 0.0;
    double initial_norm = 0.0;
};

/// sqrt( e^{-(lambda+2 alpha) T} max(||v0||^2 - K, 0) + K ),  K = C^2 / (lambda (lambda + 2 alpha)).
/// Throws ErrorKind::Parameter for lambda <= 0, alpha < 0 or T < 0.
[[nodiscard]] double gronwall_bound(double lambda, double alpha, double C, double norm_v0, double T);

/// sqrt(C^2 / (lambda (lambda + 2 alpha)))
[[nodiscard]] double asymptotic_radius(double lambda, double alpha, double C);

[[nodiscard]] AbsorbingBall absorbing_ball(double lambda, double alpha, double C, double norm_v0, double T);

/// xi_k(s): 0 for s <= k, 1 for s >= 2k, cubic smoothstep 3 tau^2 - 2 tau^3 with tau = s/k - 1 between.
[[nodiscard]] double cutoff_eval(int k, double s);
[[nodiscard]] double cutoff_derivative(int k, double s);

/// max(0, ln(alpha ||Q||^2 / eps) / alpha). Throws ErrorKind::Parameter when alpha = 0
/// (the burn-in needs the strict dissipation margin).
[[nodiscard]] double burn_in_time(double alpha, double Q_norm_sq, double eps);

/// sum_{|i| >= k} w_i^2 over the stored indices of a center-aligned array. Empty (0) when
/// k exceeds the stored half-width.
[[nodiscard]] double tail_mass(std::span<const double> w, int k);
[[nodiscard]] double tail_mass(const PaddedState& w, int k);

/// Smallest k with nu 4 C0 ||Q||^2 / k + sup_t sum_{|i| >= k} |f_i(t)|^2 / alpha <= eps alpha / 2.
/// The forcing term is bounded by the amplitude tail, so k does not depend on any truncation order.
[[nodiscard]] int calibrate_tail_cutoff(double nu, double alpha, double Q_norm_sq, const QuasiPeriodicForcing& f,
                                        double eps);

struct EnergyViolation {
    std::size_t index = 0;  // sample pair (index, index + 1)
    double time = 0.0;
    double margin = 0.0;    // bound - y(t_{k+1}), negative
};

struct EnergyReport {
    std::size_t pairs_checked = 0;
    std::vector<EnergyViolation> violations;
    double worst_margin = 0.0;  // min over pairs of (bound - y(t_{k+1}))

    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
};

/// Checks y(t_{k+1}) <= y(t_k) e^{-(lambda+2 alpha) dt} + (C^2/lambda) dt (1 + margin) on
/// every consecutive sample pair of a trajectory, y = ||v||^2.
[[nodiscard]] EnergyReport verify_energy_decay(const Trajectory& traj, double lambda, double alpha, double C,
                                               double margin = 0.05);

}  // namespace lattice::estimates
