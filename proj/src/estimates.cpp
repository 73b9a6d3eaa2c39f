#include "lattice/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lattice/error.hpp"

namespace lattice::estimates {

namespace {

void require_rates(double lambda, double alpha) {
    if (!(lambda > 0.0)) fail(ErrorKind::Parameter, "lambda must be > 0");
    if (!(alpha >= 0.0)) fail(ErrorKind::Parameter, "alpha must be >= 0");
}

}  // namespace

double asymptotic_radius(double lambda, double alpha, double C) {
    require_rates(lambda, alpha);
    return std::sqrt(C * C / (lambda * (lambda + 2.0 * alpha)));
}

double gronwall_bound(double lambda, double alpha, double C, double norm_v0, double T) {
    require_rates(lambda, alpha);
    if (!(T >= 0.0)) fail(ErrorKind::Parameter, "horizon T must be >= 0");
    const double steady = C * C / (lambda * (lambda + 2.0 * alpha));
    const double excess = std::max(norm_v0 * norm_v0 - steady, 0.0);
    return std::sqrt(std::exp(-(lambda + 2.0 * alpha) * T) * excess + steady);
}

AbsorbingBall absorbing_ball(double lambda, double alpha, double C, double norm_v0, double T) {
    return AbsorbingBall{gronwall_bound(lambda, alpha, C, norm_v0, T),
                         asymptotic_radius(lambda, alpha, C),
                         T,
                         lambda,
                         alpha,
                         C,
                         norm_v0};
}

double cutoff_eval(int k, double s) {
    if (k < 1) fail(ErrorKind::Parameter, "cutoff index k must be >= 1");
    const double tau = std::clamp(s / k - 1.0, 0.0, 1.0);
    return tau * tau * (3.0 - 2.0 * tau);
}

double cutoff_derivative(int k, double s) {
    if (k < 1) fail(ErrorKind::Parameter, "cutoff index k must be >= 1");
    const double tau = s / k - 1.0;
    if (tau <= 0.0 || tau >= 1.0) return 0.0;
    return 6.0 * tau * (1.0 - tau) / k;
}

double burn_in_time(double alpha, double Q_norm_sq, double eps) {
    if (!(alpha > 0.0)) {
        fail(ErrorKind::Parameter, "burn-in time requires strict dissipation (alpha > 0)");
    }
    if (!(eps > 0.0) || !(Q_norm_sq > 0.0)) {
        fail(ErrorKind::Parameter, "burn-in time requires eps > 0 and ||Q||^2 > 0");
    }
    return std::max(0.0, std::log(alpha * Q_norm_sq / eps) / alpha);
}

double tail_mass(std::span<const double> w, int k) {
    if (w.size() % 2 == 0) fail(ErrorKind::Dimension, "tail_mass expects a center-aligned odd-length state");
    const int half = static_cast<int>(w.size() / 2);
    k = std::max(k, 0);
    double s = 0.0;
    for (int i = -half; i <= half; ++i) {
        if (std::abs(i) < k) continue;
        const double x = w[static_cast<std::size_t>(i + half)];
        s += x * x;
    }
    return s;
}

double tail_mass(const PaddedState& w, int k) { return tail_mass(w.values(), k); }

int calibrate_tail_cutoff(double nu, double alpha, double Q_norm_sq, const QuasiPeriodicForcing& f, double eps) {
    if (!(alpha > 0.0)) fail(ErrorKind::Parameter, "tail calibration requires alpha > 0");
    if (!(eps > 0.0)) fail(ErrorKind::Parameter, "tail calibration requires eps > 0");
    const double target = 0.5 * eps * alpha;
    const double coupling = nu * 4.0 * kCutoffDerivativeBound * Q_norm_sq;
    // the coupling term alone fixes a lower bound on k; the forcing tail is nonincreasing in k
    int k = 1;
    if (coupling > 0.0) {
        const double k_min = coupling / target;
        if (k_min > static_cast<double>(std::numeric_limits<int>::max() / 2)) {
            fail(ErrorKind::Parameter, "tail calibration: cutoff index overflows");
        }
        k = std::max(1, static_cast<int>(std::floor(k_min)));
    }
    auto lhs = [&](int kk) { return coupling / kk + f.amplitude_tail(kk) / alpha; };
    while (lhs(k) > target) {
        if (k > std::numeric_limits<int>::max() / 4) {
            fail(ErrorKind::Parameter, "tail calibration does not converge for this forcing");
        }
        ++k;
    }
    return k;
}

EnergyReport verify_energy_decay(const Trajectory& traj, double lambda, double alpha, double C, double margin) {
    require_rates(lambda, alpha);
    EnergyReport report;
    report.worst_margin = std::numeric_limits<double>::infinity();
    const double rate = lambda + 2.0 * alpha;
    for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
        const double dt = traj.times[k + 1] - traj.times[k];
        const double y0 = norm_sq(traj.states[k]);
        const double y1 = norm_sq(traj.states[k + 1]);
        const double bound = y0 * std::exp(-rate * dt) + C * C / lambda * dt * (1.0 + margin);
        const double slack = bound - y1;
        report.worst_margin = std::min(report.worst_margin, slack);
        if (slack < 0.0) report.violations.push_back({k, traj.times[k + 1], slack});
        ++report.pairs_checked;
    }
    if (report.pairs_checked == 0) report.worst_margin = 0.0;
    return report;
}

}  // namespace lattice::estimates
