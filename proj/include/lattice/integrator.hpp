#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lattice/state.hpp"

namespace lattice {

/// dydt = rhs(t, y), written into the output span.
using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Called after every accepted step; may throw to abort the integration.
using StepMonitor = std::function<void(std::size_t step, double t, std::span<const double> y)>;

/// Time-stamped samples of one integration. Times are strictly increasing.
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    double step = 0.0;
    std::string scheme = "rk4";

    [[nodiscard]] const State& final_state() const { return states.back(); }
    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
};

/// Classical fixed-step RK4 from t0 to t1 (t1 >= t0). The last step is shortened so the
/// final sample lands exactly on t1. Samples are recorded every `stride` steps plus both
/// endpoints; stride 0 records the endpoints only.
///
/// Throws DivergenceError naming the first step that produced a non-finite state.
[[nodiscard]] Trajectory integrate(const Rhs& rhs, State y0, double t0, double t1, double h,
                                  std::size_t stride = 1, const StepMonitor& monitor = {});

/// Same scheme, returning only the state at t1.
[[nodiscard]] State integrate_to(const Rhs& rhs, State y0, double t0, double t1, double h,
                                 const StepMonitor& monitor = {});

/// Number of steps taken over [t0, t1] at nominal step h.
[[nodiscard]] std::size_t step_count(double t0, double t1, double h);

}  // namespace lattice
