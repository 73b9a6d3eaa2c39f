// Acceptance gate: one line per criterion, nonzero exit if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lattice/attractor.hpp"
#include "lattice/dynamics.hpp"
#include "lattice/estimates.hpp"
#include "lattice/forcing.hpp"
#include "lattice/integrator.hpp"
#include "lattice/operators.hpp"

using namespace lattice;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double limit_s;
    std::function<Outcome()> run;
};

std::string fmt(double x, int digits = 3) {
    std::ostringstream s;
    s.precision(digits);
    s << x;
    return s.str();
}

double euclid(const State& a, const State& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

// ---------------------------------------------------------------------------

Outcome matrix_identity() {
    int bad = 0;
    for (int m = 1; m <= 32; ++m) {
        const TruncationOrder n(m);
        const auto A = operators::materialize_laplacian(n);
        const auto B = operators::materialize_difference(n);
        const std::size_t d = n.dim();
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                std::int64_t btb = 0;
                std::int64_t bbt = 0;
                for (std::size_t k = 0; k < d; ++k) {
                    btb += B(k, i) * B(k, j);
                    bbt += B(i, k) * B(j, k);
                }
                if (A(i, j) != btb || A(i, j) != bbt) ++bad;
            }
        }
    }
    return {bad == 0, std::to_string(bad) + " mismatched entries over n = 1..32"};
}

Outcome equivariance() {
    std::map<int, Mode> modes;
    for (int i = -6; i <= 6; ++i) {
        modes[i] = Mode{std::pow(0.5, std::abs(i)), 1.0 + 0.37 * std::abs(i), 0.1 * i};
    }
    const QuasiPeriodicForcing f(modes, GeometricTail{std::pow(0.5, 7), 0.5, 1.0 / std::sqrt(2.0), 0.3, 7});

    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> order(1, 32);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    double worst_p = 0.0;
    double worst_h = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const TruncationOrder n(order(rng));
        const double h = u(rng);
        const double t = u(rng);
        // sigma(h, M f)(t) must equal M(sigma(h, f))(t) = (M f)(t + h)
        const PaddedState p_lhs = operators::project_forcing(f.shifted(h), n).eval(t, n.value());
        const PaddedState p_rhs = operators::project_forcing(f, n).eval(t + h, n.value());
        const PaddedState h_lhs = operators::wrap_forcing(f.shifted(h), n).eval(t, n.value());
        const PaddedState h_rhs = operators::wrap_forcing(f, n).eval(t + h, n.value());
        worst_p = std::max(worst_p, distance(p_lhs, p_rhs));
        worst_h = std::max(worst_h, distance(h_lhs, h_rhs));
    }
    return {worst_p < 1e-12 && worst_h < 1e-12,
            "max defect P_n " + fmt(worst_p) + ", H_n " + fmt(worst_h) + " over 100 triples"};
}

Outcome energy_bound() {
    const TruncationOrder n(16);
    const double lambda = 1.0;
    const double alpha = 1.0;
    const auto base = QuasiPeriodicForcing::geometric(std::sqrt(0.6), 0.5, 1.0, 0.2);
    const double C = uniform_bound(base);
    const auto f = operators::project_forcing(base, n);
    const FiniteSystem sys(LatticeParams(1.0, lambda, n), Nonlinearity::cubic(alpha), f);
    const auto ics = attractor::initial_conditions(n.dim(), 20, 2.0, 7);
    const double h = max_stable_step(sys.params(), sys.nonlinearity(), 2.1);
    const double burn_in = estimates::burn_in_time(alpha, 4.0, 1e-2);
    const double limit = std::sqrt(1.0 / 3.0) * 1.05;

    std::size_t violations = 0;
    std::size_t late_samples = 0;
    double worst_late = 0.0;
    for (const auto& v0 : ics) {
        if (norm(v0) > 2.0) return {false, "initial state outside the ball of radius 2"};
        const Trajectory traj = integrate(sys.rhs(), v0, 0.0, burn_in + 10.0, h);
        violations += estimates::verify_energy_decay(traj, lambda, alpha, C, 0.05).violations.size();
        for (std::size_t k = 0; k < traj.size(); ++k) {
            if (traj.times[k] >= burn_in) {
                worst_late = std::max(worst_late, norm(traj.states[k]));
                ++late_samples;
            }
        }
    }
    return {std::abs(C - 1.0) < 1e-12 && violations == 0 && late_samples > 0 && worst_late <= limit,
            "C = " + fmt(C) + ", " + std::to_string(violations) + " shadow violations, max norm after T = " +
                fmt(burn_in) + " is " + fmt(worst_late, 4) + " <= " + fmt(limit, 4)};
}

Outcome cocycle() {
    const TruncationOrder n(8);
    const auto f = operators::wrap_forcing(QuasiPeriodicForcing::geometric(1.0, 0.5, 1.3, 0.4), n);
    const FiniteSystem sys(LatticeParams(1.0, 1.0, n), Nonlinearity::linear(1.0), f);
    const State v0 = attractor::initial_conditions(n.dim(), 1, 2.0, 3).front();

    const double defect = cocycle_property_check(v0, sys, 1.0, 1.0, 1e-3);
    const std::vector<double> hs{1e-2, 5e-3, 2.5e-3};
    std::vector<double> d;
    for (double h : hs) d.push_back(cocycle_property_check(v0, sys, 1.0, 1.0, h));
    bool slopes_ok = true;
    std::string slopes;
    for (std::size_t i = 1; i < hs.size(); ++i) {
        const double s = std::log(d[i - 1] / d[i]) / std::log(hs[i - 1] / hs[i]);
        slopes_ok = slopes_ok && std::abs(s - 4.0) <= 0.3;
        slopes += (i > 1 ? ", " : "") + fmt(s);
    }
    return {defect < 1e-8 && slopes_ok, "defect at h = 1e-3: " + fmt(defect) + ", log-log slopes " + slopes};
}

Outcome tail_certificate() {
    const auto f = QuasiPeriodicForcing::geometric(1.0, 0.5, 1.0);
    const double nu = 1.0;
    const double lambda = 1.0;
    const auto F = Nonlinearity::cubic(1.0);
    attractor::SamplingOptions opts;
    opts.epsilon = 1e-8;
    opts.ic_count = 8;
    opts.sample_count = 4;

    std::vector<attractor::AttractorCloud> clouds;
    for (int n : {4, 8, 16}) {
        clouds.push_back(attractor::sample_finite(LatticeParams(nu, lambda, TruncationOrder(n)), F, f, opts, 16));
    }
    const double Q = clouds.front().absorbing_radius;
    const attractor::TailCalibration calib{nu, F.alpha(), Q * Q, f};
    const std::vector<double> eps{1e-2, 1e-3};
    const auto pooled = attractor::tail_certificate(clouds, eps, calib);

    // the same k(eps) must certify each cloud on its own
    bool per_cloud = true;
    for (const auto& c : clouds) {
        per_cloud = per_cloud && attractor::tail_certificate(std::span(&c, 1), eps, calib).ok();
    }
    std::string detail;
    for (const auto& e : pooled.entries) {
        detail += "eps " + fmt(e.eps) + ": k = " + std::to_string(e.k) + " worst tail " + fmt(e.worst_tail) +
                  (e.beyond_support ? " (k beyond stored width)" : "") + ", empirical k " +
                  std::to_string(e.empirical_k) + "; ";
    }
    detail += std::to_string(pooled.points) + " points over n = 4, 8, 16";
    return {pooled.ok() && per_cloud, detail};
}

Outcome convergence() {
    std::map<int, Mode> modes;
    for (int i = -2; i <= 2; ++i) modes[i] = Mode{1.0 / (1 + std::abs(i)), 1.0, 0.0};
    const QuasiPeriodicForcing f(modes);
    attractor::SamplingOptions opts;
    opts.epsilon = 1e-14;
    opts.ic_count = 8;
    opts.sample_count = 4;
    opts.step = 0.01;
    const std::vector<int> n_list{4, 8, 16};
    const auto report =
        attractor::convergence_study(f, 1.0, 1.0, Nonlinearity::linear(1.0), n_list, 64, opts, 1e-5);
    std::string detail = "beta:";
    for (const auto& row : report.rows) detail += " n=" + std::to_string(row.n) + " " + fmt(row.beta_to_ref);
    return {report.strictly_decreasing && report.passed, detail};
}

Outcome integrator_order() {
    const Rhs decay = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = -y[0]; };
    const double one_step = std::abs(integrate_to(decay, State{1.0}, 0.0, 0.1, 0.1)[0] - std::exp(-0.1));
    std::vector<double> errors;
    for (double h : {0.1, 0.05, 0.025, 0.0125}) {
        errors.push_back(std::abs(integrate_to(decay, State{1.0}, 0.0, 1.0, h)[0] - std::exp(-1.0)));
    }
    bool ok = one_step < 1e-7;
    std::string ratios;
    for (std::size_t i = 1; i < errors.size(); ++i) {
        const double r = errors[i - 1] / errors[i];
        ok = ok && std::abs(r / 16.0 - 1.0) <= 0.2;
        ratios += (i > 1 ? ", " : "") + fmt(r);
    }
    return {ok, "error at h = 0.1: " + fmt(one_step) + ", halving ratios " + ratios};
}

Outcome projection_convergence() {
    const double r = 0.5;
    const auto f = QuasiPeriodicForcing::geometric(1.0, r, 1.0);
    bool ok = true;
    double prev = INFINITY;
    double worst_ratio = 1.0;
    for (int n = 1; n <= 12; ++n) {
        double sup = 0.0;
        for (int k = 0; k <= 4000; ++k) {
            const double t = -10.0 + 20.0 * k / 4000;
            // components beyond n, summed directly until they are negligible
            double s = 0.0;
            for (int i = n + 1; i <= 200; ++i) {
                const double c = f.component(i, t);
                s += 2.0 * c * c;
            }
            sup = std::max(sup, s);
        }
        const double envelope = (8.0 / 3.0) * std::pow(4.0, -(n + 1));
        const double ratio = sup / envelope;
        worst_ratio = std::abs(std::log(ratio)) > std::abs(std::log(worst_ratio)) ? ratio : worst_ratio;
        ok = ok && ratio <= 2.0 && ratio >= 0.5 && sup < prev;
        prev = sup;
    }
    return {ok, "sup ||P_n f - f||^2 / (8/3) 4^-(n+1) stays within [0.5, 2] for n = 1..12 (extreme " +
                    fmt(worst_ratio, 6) + ")"};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "matrix identity A_n = B_n^T B_n", 1.0, matrix_identity},
        {2, "shift equivariance of P_n and H_n", 1.0, equivariance},
        {3, "energy shadow and absorbing radius", 30.0, energy_bound},
        {4, "cocycle law and fourth-order defect", 10.0, cocycle},
        {5, "tail certificate with one k(eps)", 120.0, tail_certificate},
        {6, "attractor convergence beta(I^n, I_ref)", 300.0, convergence},
        {7, "RK4 order on scalar decay", 1.0, integrator_order},
        {8, "P_n f -> f envelope", 5.0, projection_convergence},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.limit_s;
        const bool passed = outcome.passed && in_time;
        if (!passed) ++failures;
        std::printf("[%s] criterion %d: %s | %s | %.3f s (limit %.0f s%s)\n", passed ? "PASS" : "FAIL", c.id,
                    c.name.c_str(), outcome.detail.c_str(), secs, c.limit_s, in_time ? "" : ", exceeded");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
