#include "lattice/integrator.hpp"

#include <cmath>
#include <string>

#include "lattice/error.hpp"

namespace lattice {

namespace {

class Rk4Stepper {
public:
    explicit Rk4Stepper(std::size_t dim) : k1_(dim), k2_(dim), k3_(dim), k4_(dim), tmp_(dim) {}

    void step(const Rhs& rhs, double t, double h, std::span<double> y) {
        const std::size_t d = y.size();
        rhs(t, y, k1_);
        for (std::size_t i = 0; i < d; ++i) tmp_[i] = y[i] + 0.5 * h * k1_[i];
        rhs(t + 0.5 * h, tmp_, k2_);
        for (std::size_t i = 0; i < d; ++i) tmp_[i] = y[i] + 0.5 * h * k2_[i];
        rhs(t + 0.5 * h, tmp_, k3_);
        for (std::size_t i = 0; i < d; ++i) tmp_[i] = y[i] + h * k3_[i];
        rhs(t + h, tmp_, k4_);
        for (std::size_t i = 0; i < d; ++i) {
            y[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
        }
    }

private:
    State k1_, k2_, k3_, k4_, tmp_;
};

bool all_finite(std::span<const double> y) {
    for (double x : y) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

void validate(double t0, double t1, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        fail(ErrorKind::Parameter, "integration step must be positive and finite");
    }
    if (!(t1 >= t0)) {
        fail(ErrorKind::Parameter, "integration needs t1 >= t0");
    }
}

template <typename OnStep>
void run(const Rhs& rhs, State& y, double t0, double t1, double h, const StepMonitor& monitor, OnStep on_step) {
    validate(t0, t1, h);
    const std::size_t steps = step_count(t0, t1, h);
    Rk4Stepper stepper(y.size());
    for (std::size_t k = 0; k < steps; ++k) {
        const double ta = t0 + static_cast<double>(k) * h;
        const bool last = k + 1 == steps;
        const double tb = last ? t1 : t0 + static_cast<double>(k + 1) * h;
        stepper.step(rhs, ta, tb - ta, y);
        if (!all_finite(y)) {
            throw DivergenceError(k, tb, "integration diverged at step " + std::to_string(k) + " (t = " +
                                             std::to_string(tb) + ")");
        }
        if (monitor) monitor(k, tb, y);
        on_step(k, tb, last);
    }
}

}  // namespace

std::size_t step_count(double t0, double t1, double h) {
    const double span = t1 - t0;
    if (span <= 0.0) return 0;
    // tolerate representation error in span/h so that exact multiples are not split
    const double ratio = span / h;
    auto steps = static_cast<std::size_t>(std::ceil(ratio - 1e-9 * std::max(1.0, ratio)));
    return steps == 0 ? 1 : steps;
}

Trajectory integrate(const Rhs& rhs, State y0, double t0, double t1, double h, std::size_t stride,
                     const StepMonitor& monitor) {
    Trajectory traj;
    traj.step = h;
    if (!all_finite(y0)) {
        throw DivergenceError(0, t0, "initial state is not finite");
    }
    traj.times.push_back(t0);
    traj.states.push_back(y0);
    State y = std::move(y0);
    run(rhs, y, t0, t1, h, monitor, [&](std::size_t k, double t, bool last) {
        if (last || (stride != 0 && (k + 1) % stride == 0)) {
            traj.times.push_back(t);
            traj.states.push_back(y);
        }
    });
    return traj;
}

State integrate_to(const Rhs& rhs, State y0, double t0, double t1, double h, const StepMonitor& monitor) {
    run(rhs, y0, t0, t1, h, monitor, [](std::size_t, double, bool) {});
    return y0;
}

}  // namespace lattice
