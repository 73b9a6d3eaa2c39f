#include <doctest.h>

#include <cmath>
#include <random>

#include "lattice/dynamics.hpp"
#include "lattice/error.hpp"
#include "lattice/estimates.hpp"
#include "lattice/integrator.hpp"
#include "lattice/operators.hpp"

using namespace lattice;

namespace {

State random_state(std::mt19937_64& rng, std::size_t dim, double target_norm) {
    std::normal_distribution<double> g;
    State v(dim);
    for (auto& x : v) x = g(rng);
    const double s = target_norm / norm(v);
    for (auto& x : v) x *= s;
    return v;
}

double diff_norm(const State& a, const State& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

Rhs scalar_decay() {
    return [](double, std::span<const double> y, std::span<double> dy) { dy[0] = -y[0]; };
}

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(LatticeParams(1.0, 0.0, TruncationOrder(1)), Error);
    CHECK_THROWS_AS(LatticeParams(-1.0, 1.0, TruncationOrder(1)), Error);
    CHECK_NOTHROW(LatticeParams(0.0, 1.0, TruncationOrder(1)));
}

TEST_CASE("finite right-hand side") {
    const LatticeParams p(1.0, 1.0, TruncationOrder(1));
    const QuasiPeriodicForcing none;
    CHECK(rhs_finite(State(3, 0.0), 0.3, p, Nonlinearity::cubic(1.0), none) == State(3, 0.0));
    CHECK(rhs_finite(State{1.0, 0.0, 0.0}, 0.0, p, Nonlinearity::zero(), none) == State{-3.0, 1.0, 1.0});
    CHECK(rhs_finite(State{1.0, 0.0, 0.0}, 0.0, p, Nonlinearity::linear(1.0), none) == State{-4.0, 1.0, 1.0});

    // forcing must already live on |i| <= n
    const auto f = QuasiPeriodicForcing::geometric(1.0, 0.5, 1.0);
    CHECK_THROWS_AS((void)rhs_finite(State(3, 0.0), 0.0, p, Nonlinearity::zero(), f), Error);
    CHECK_THROWS_AS((void)rhs_finite(State(5, 0.0), 0.0, p, Nonlinearity::zero(), none), Error);
    CHECK_NOTHROW((void)rhs_finite(State(3, 0.0), 0.0, p, Nonlinearity::zero(),
                                   operators::wrap_forcing(f, TruncationOrder(1))));
}

TEST_CASE("dissipativity identity <-nu A v, v> = -nu ||B v||^2") {
    std::mt19937_64 rng(1);
    const TruncationOrder n(6);
    const LatticeParams p(0.7, 1.0, n);
    for (int trial = 0; trial < 30; ++trial) {
        const State v = random_state(rng, n.dim(), 1.0 + trial);
        // with lambda subtracted and F = 0, f = 0 the rhs is -nu A v - lambda v
        const State r = rhs_finite(v, 0.0, p, Nonlinearity::zero(), QuasiPeriodicForcing{});
        const double coupling = dot(r, v) + p.lambda() * norm_sq(v);
        const double expected = -p.nu() * norm_sq(operators::apply_difference(v, n));
        CHECK(coupling == doctest::Approx(expected).epsilon(1e-12));
        CHECK(coupling <= 1e-12);
    }
}

TEST_CASE("reference right-hand side") {
    const LatticeParams p(1.0, 1.0, TruncationOrder(3));
    CHECK(rhs_reference(PaddedState(3), 0.0, p, Nonlinearity::cubic(1.0), QuasiPeriodicForcing{}).norm_sq() == 0.0);

    const LatticeParams no_decay_like(1.0, 1e-300, TruncationOrder(3));
    PaddedState delta(3);
    delta[0] = 1.0;
    const PaddedState out = rhs_reference(delta, 0.0, no_decay_like, Nonlinearity::zero(), QuasiPeriodicForcing{});
    CHECK(out[-2] == 0.0);
    CHECK(out[-1] == 1.0);
    CHECK(out[0] == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(out[1] == 1.0);
    CHECK(out[2] == 0.0);

    CHECK_THROWS_AS((void)rhs_reference(PaddedState(2), 0.0, p, Nonlinearity::zero(), QuasiPeriodicForcing{}), Error);
}

TEST_CASE("reference and periodic systems agree away from the wrap") {
    std::mt19937_64 rng(2);
    const TruncationOrder n(5);
    const int N = 12;
    const auto f = QuasiPeriodicForcing::finite_geometric(1.0, 0.5, 3, 1.3, 0.2);
    const auto F = Nonlinearity::cubic(0.5);
    for (int trial = 0; trial < 10; ++trial) {
        State v(n.dim(), 0.0);
        std::normal_distribution<double> g;
        for (int i = -(n.value() - 1); i <= n.value() - 1; ++i) v[n.slot(i)] = g(rng);
        const double t = 0.37 * trial;
        const State fin = rhs_finite(v, t, LatticeParams(0.8, 1.2, n), F, operators::wrap_forcing(f, n));
        const PaddedState ref = rhs_reference(operators::embed(v, n, N), t, LatticeParams(0.8, 1.2, TruncationOrder(N)), F, f);
        for (int i = -(n.value() - 1); i <= n.value() - 1; ++i) {
            CHECK(fin[n.slot(i)] == doctest::Approx(ref[i]).epsilon(1e-14));
        }
    }
}

TEST_CASE("stable step") {
    CHECK(max_stable_step(LatticeParams(1.0, 1.0, TruncationOrder(1)), Nonlinearity::linear(1.0), 1.0) ==
          doctest::Approx(0.5 / 6.0));
    CHECK(max_stable_step(LatticeParams(0.0, 1.0, TruncationOrder(1)), Nonlinearity::zero(), 1.0) == 0.5);
    const double h1 = max_stable_step(LatticeParams(10.0, 1.0, TruncationOrder(1)), Nonlinearity::zero(), 1.0);
    const double h2 = max_stable_step(LatticeParams(20.0, 1.0, TruncationOrder(1)), Nonlinearity::zero(), 1.0);
    CHECK(h2 / h1 == doctest::Approx(0.5).epsilon(0.03));
    CHECK(max_stable_step(LatticeParams(1.0, 1.0, TruncationOrder(1)), Nonlinearity::cubic(1.0), 2.0) ==
          doctest::Approx(0.5 / (4.0 + 1.0 + 1.0 + 12.0)));
    CHECK_THROWS_AS((void)max_stable_step(LatticeParams(1.0, 1.0, TruncationOrder(1)), Nonlinearity::zero(), 0.0),
                    Error);
}

TEST_CASE("RK4 on the scalar decay test") {
    const State one_step = integrate_to(scalar_decay(), State{1.0}, 0.0, 0.1, 0.1);
    CHECK(one_step[0] == doctest::Approx(0.9048375).epsilon(1e-12));
    CHECK(std::abs(one_step[0] - std::exp(-0.1)) < 1e-7);

    // order: error ratio ~ 16 per halving
    double prev = 0.0;
    for (double h : {0.2, 0.1, 0.05, 0.025}) {
        const double err = std::abs(integrate_to(scalar_decay(), State{1.0}, 0.0, 2.0, h)[0] - std::exp(-2.0));
        if (prev > 0.0) CHECK(prev / err == doctest::Approx(16.0).epsilon(0.2));
        prev = err;
    }
}

TEST_CASE("integrator bookkeeping") {
    const Rhs zero = [](double, std::span<const double>, std::span<double> dy) {
        for (auto& x : dy) x = 0.0;
    };
    const Trajectory flat = integrate(zero, State{1.0, -2.0}, 0.0, 1.0, 0.3);
    CHECK(flat.times.size() == 5);
    CHECK(flat.times.back() == 1.0);
    for (const auto& s : flat.states) CHECK(s == State{1.0, -2.0});
    for (std::size_t k = 1; k < flat.times.size(); ++k) CHECK(flat.times[k] > flat.times[k - 1]);

    const Trajectory single = integrate(zero, State{3.0}, 2.0, 2.0, 0.1);
    CHECK(single.size() == 1);

    const Trajectory strided = integrate(scalar_decay(), State{1.0}, 0.0, 1.0, 0.1, 3);
    CHECK(strided.times.size() == 5);  // t = 0, 0.3, 0.6, 0.9, 1.0
    CHECK(strided.times[1] == doctest::Approx(0.3));
    const Trajectory ends = integrate(scalar_decay(), State{1.0}, 0.0, 1.0, 0.1, 0);
    CHECK(ends.times.size() == 2);

    CHECK(step_count(0.0, 1.0, 0.01) == 100);
    CHECK(step_count(0.0, 1.0, 0.005) == 200);
    CHECK(step_count(0.0, 1.05, 0.1) == 11);

    CHECK_THROWS_AS((void)integrate(zero, State{1.0}, 1.0, 0.0, 0.1), Error);
    CHECK_THROWS_AS((void)integrate(zero, State{1.0}, 0.0, 1.0, 0.0), Error);
}

TEST_CASE("divergence names the step") {
    const Rhs blowup = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = y[0] * y[0]; };
    try {
        (void)integrate(blowup, State{1.0}, 0.0, 5.0, 0.1);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.kind() == ErrorKind::Divergence);
        CHECK(e.step() > 0);
        CHECK(e.step() < 50);
        CHECK(std::string(e.what()).find("step " + std::to_string(e.step())) != std::string::npos);
    }
}

TEST_CASE("cocycle law") {
    std::mt19937_64 rng(4);
    const TruncationOrder n(4);
    const auto f = operators::wrap_forcing(QuasiPeriodicForcing::geometric(1.0, 0.5, 1.0, 0.3), n);
    const FiniteSystem sys(LatticeParams(1.0, 1.0, n), Nonlinearity::linear(1.0), f);
    const State v0 = random_state(rng, n.dim(), 1.0);

    CHECK(cocycle_property_check(v0, sys, 1.0, 0.0, 1e-2) == 0.0);
    CHECK(cocycle_property_check(v0, sys, 1.0, 1.0, 1e-3) < 1e-8);

    std::vector<double> hs{1e-2, 5e-3, 2.5e-3};
    std::vector<double> defects;
    for (double h : hs) defects.push_back(cocycle_property_check(v0, sys, 1.0, 1.0, h));
    for (std::size_t i = 1; i < hs.size(); ++i) {
        const double slope = std::log(defects[i - 1] / defects[i]) / std::log(hs[i - 1] / hs[i]);
        CHECK(slope == doctest::Approx(4.0).epsilon(0.075));
    }
}

TEST_CASE("translation identity of the forcing shift") {
    const TruncationOrder n(3);
    const auto f = operators::wrap_forcing(QuasiPeriodicForcing::geometric(0.9, 0.5, 1.7, 0.1), n);
    const FiniteSystem sys(LatticeParams(1.0, 1.0, n), Nonlinearity::cubic(1.0), f);
    const double s = 2.3;
    const State v0(n.dim(), 0.2);
    const State a = integrate_to(sys.with_forcing(f.shifted(s)).rhs(), v0, 0.0, 3.0, 0.01);
    const State b = integrate_to(sys.rhs(), v0, s, 3.0 + s, 0.01);
    CHECK(diff_norm(a, b) < 1e-12);
}

TEST_CASE("linear contraction at rate lambda + alpha") {
    std::mt19937_64 rng(6);
    const TruncationOrder n(8);
    const double lambda = 1.0;
    const double alpha = 0.5;
    const auto f = operators::wrap_forcing(QuasiPeriodicForcing::geometric(1.0, 0.5, 1.0), n);
    const FiniteSystem sys(LatticeParams(1.0, lambda, n), Nonlinearity::linear(alpha), f);
    const State a0 = random_state(rng, n.dim(), 2.0);
    const State b0 = random_state(rng, n.dim(), 1.0);
    const Trajectory ta = integrate(sys.rhs(), a0, 0.0, 6.0, 0.01, 10);
    const Trajectory tb = integrate(sys.rhs(), b0, 0.0, 6.0, 0.01, 10);
    const double d0 = diff_norm(a0, b0);
    for (std::size_t k = 0; k < ta.size(); ++k) {
        CHECK(diff_norm(ta.states[k], tb.states[k]) <= 1.05 * std::exp(-(lambda + alpha) * ta.times[k]) * d0);
    }
}

TEST_CASE("energy inequality along strict-mode trajectories") {
    std::mt19937_64 rng(9);
    const TruncationOrder n(10);
    const double lambda = 1.0;
    const double alpha = 1.0;
    const auto base = QuasiPeriodicForcing::geometric(1.0, 0.5, 1.0);
    const auto f = operators::wrap_forcing(base, n);
    const double C = uniform_bound(base);
    const FiniteSystem sys(LatticeParams(1.0, lambda, n), Nonlinearity::cubic(alpha), f);
    for (int trial = 0; trial < 5; ++trial) {
        const State v0 = random_state(rng, n.dim(), 0.5 + trial);
        const double h = max_stable_step(sys.params(), sys.nonlinearity(), std::max(norm(v0), 1.0));
        const Trajectory traj = integrate(sys.rhs(), v0, 0.0, 4.0, h);
        const auto report = estimates::verify_energy_decay(traj, lambda, alpha, C, 0.05);
        CHECK(report.ok());
        CHECK(report.pairs_checked == traj.size() - 1);
    }
}

TEST_CASE("nonlinearity catalog and contract sampling") {
    const auto lin = Nonlinearity::linear(2.0);
    CHECK(lin(1.5) == -3.0);
    CHECK(lin.lipschitz(10.0) == 2.0);
    const auto cub = Nonlinearity::cubic(1.0);
    CHECK(cub(2.0) == -10.0);
    CHECK(cub.lipschitz(2.0) == 13.0);
    CHECK(Nonlinearity::zero()(5.0) == 0.0);
    CHECK(Nonlinearity::zero().mode() == DissipationMode::Weak);

    CHECK(check_conditions(lin, 10.0).ok);
    CHECK(check_conditions(cub, 10.0).ok);
    CHECK(check_conditions(Nonlinearity::zero(), 10.0).ok);

    const auto bad = Nonlinearity::linear_with_slope(1.0, 1.0);
    const ConditionReport r = check_conditions(bad, 10.0);
    CHECK_FALSE(r.ok);
    CHECK(r.condition == "C3");
    try {
        register_nonlinearity(bad, 10.0);
        FAIL("expected condition violation");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConditionViolation);
        CHECK(std::string(e.what()).find("C3") != std::string::npos);
    }

    const auto offset = Nonlinearity::custom(
        "offset", [](double s) { return 1.0 - s; }, [](double) { return 1.0; }, 0.0, DissipationMode::Weak);
    CHECK(check_conditions(offset, 1.0).condition == "C2");

    const auto weak_bad = Nonlinearity::custom(
        "cube", [](double s) { return s * s * s; }, [](double rho) { return 3 * rho * rho; }, 0.0,
        DissipationMode::Weak);
    CHECK(check_conditions(weak_bad, 1.0).condition == "weak");

    const auto lying = Nonlinearity::custom(
        "steep", [](double s) { return -5.0 * s; }, [](double) { return 1.0; }, 1.0, DissipationMode::Strict);
    CHECK(check_conditions(lying, 1.0).condition == "lipschitz");

    CHECK_THROWS_AS((void)Nonlinearity::from_name("quartic", 1.0), Error);
    CHECK_THROWS_AS((void)Nonlinearity::from_name("zero", 1.0), Error);
    CHECK(Nonlinearity::from_name("cubic", 1.0).name() == "cubic");
}

TEST_CASE("reference boundary monitor") {
    const int N = 6;
    const auto f = QuasiPeriodicForcing::finite_geometric(1.0, 0.5, 1, 1.0);
    const ReferenceSystem wide(LatticeParams(1.0, 1.0, TruncationOrder(N)), Nonlinearity::linear(1.0), f, 1e-2);
    State u0(2 * N + 1, 0.0);
    CHECK_NOTHROW((void)integrate_to(wide.rhs(), u0, 0.0, 2.0, 0.05, wide.monitor()));

    const ReferenceSystem tight(LatticeParams(1.0, 1.0, TruncationOrder(N)), Nonlinearity::linear(1.0), f, 1e-12);
    try {
        (void)integrate_to(tight.rhs(), u0, 0.0, 2.0, 0.05, tight.monitor());
        FAIL("expected boundary contamination");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BoundaryContamination);
    }
}
