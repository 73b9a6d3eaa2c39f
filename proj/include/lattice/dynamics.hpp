#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "lattice/forcing.hpp"
#include "lattice/integrator.hpp"
#include "lattice/state.hpp"

namespace lattice {

/// Coupling nu >= 0, decay lambda > 0, truncation half-width n.
class LatticeParams {
public:
    /// Throws ErrorKind::Parameter unless lambda > 0 and nu >= 0.
    LatticeParams(double nu, double lambda, TruncationOrder n);

    [[nodiscard]] double nu() const noexcept { return nu_; }
    [[nodiscard]] double lambda() const noexcept { return lambda_; }
    [[nodiscard]] TruncationOrder order() const noexcept { return n_; }

    [[nodiscard]] LatticeParams with_order(TruncationOrder n) const { return {nu_, lambda_, n}; }

private:
    double nu_;
    double lambda_;
    TruncationOrder n_;
};

enum class DissipationMode {
    Strict,  // s F(s) <= -alpha s^2
    Weak,    // s F(s) <= 0
};

/// Pointwise nonlinearity F with F(0) = 0 and its dissipation contract.
class Nonlinearity {
public:
    using Scalar = std::function<double(double)>;

    /// F(s) = -alpha s
    [[nodiscard]] static Nonlinearity linear(double alpha);
    /// F(s) = c s with declared margin alpha; violates the strict condition when c > -alpha.
    [[nodiscard]] static Nonlinearity linear_with_slope(double slope, double alpha);
    /// F(s) = -alpha s - s^3
    [[nodiscard]] static Nonlinearity cubic(double alpha);
    /// F = 0, weak mode
    [[nodiscard]] static Nonlinearity zero();
    /// Arbitrary map with a Lipschitz-on-ball witness rho -> L_F(rho).
    [[nodiscard]] static Nonlinearity custom(std::string name, Scalar f, Scalar lipschitz_on_ball, double alpha,
                                             DissipationMode mode);

    /// Catalog lookup: "linear", "cubic", "zero". Throws ErrorKind::Config on unknown names.
    [[nodiscard]] static Nonlinearity from_name(const std::string& name, double alpha,
                                                std::optional<double> slope = std::nullopt);

    [[nodiscard]] double operator()(double s) const;
    [[nodiscard]] double lipschitz(double rho) const;

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] DissipationMode mode() const noexcept { return mode_; }

private:
    enum class Kind { Linear, Cubic, Custom };

    Nonlinearity(std::string name, Kind kind, double coeff, double alpha, DissipationMode mode)
        : name_(std::move(name)), kind_(kind), coeff_(coeff), alpha_(alpha), mode_(mode) {}

    std::string name_;
    Kind kind_;
    double coeff_ = 0.0;
    double alpha_ = 0.0;
    DissipationMode mode_;
    Scalar custom_;
    Scalar custom_lipschitz_;
};

/// Outcome of sampling the nonlinearity contract on [-rho_max, rho_max].
struct ConditionReport {
    bool ok = true;
    std::string condition;  // "C2", "C3", "weak", "lipschitz" or empty
    double witness = 0.0;   // sample point where the violation occurred
    std::string message;
};

/// Samples F(0) = 0, the dissipation inequality for the declared mode and the Lipschitz
/// witness on a uniform grid of `grid` points.
[[nodiscard]] ConditionReport check_conditions(const Nonlinearity& f, double rho_max, int grid = 10000);

/// Runs check_conditions and throws ErrorKind::ConditionViolation naming the failed condition.
void register_nonlinearity(const Nonlinearity& f, double rho_max, int grid = 10000);

/// -nu A_n v - lambda v + F~(v) + f(t) for a forcing already projected or wrapped to |i| <= n.
[[nodiscard]] State rhs_finite(std::span<const double> v, double t, const LatticeParams& params,
                               const Nonlinearity& F, const QuasiPeriodicForcing& f);

/// Two-sided stencil nu(u_{i-1} - 2u_i + u_{i+1}) with zero ghost cells plus -lambda u + F~(u) + f(t)
/// on the window |i| <= N_work (= params.order()).
[[nodiscard]] PaddedState rhs_reference(const PaddedState& u, double t, const LatticeParams& params,
                                        const Nonlinearity& F, const QuasiPeriodicForcing& f);

/// The periodic (2n+1)-dimensional system as an integrator right-hand side.
class FiniteSystem {
public:
    /// Throws ErrorKind::Dimension if the forcing has support outside |i| <= n.
    FiniteSystem(LatticeParams params, Nonlinearity F, QuasiPeriodicForcing forcing);

    void operator()(double t, std::span<const double> v, std::span<double> out) const;

    [[nodiscard]] std::size_t dim() const noexcept { return params_.order().dim(); }
    [[nodiscard]] const LatticeParams& params() const noexcept { return params_; }
    [[nodiscard]] const Nonlinearity& nonlinearity() const noexcept { return F_; }
    [[nodiscard]] const QuasiPeriodicForcing& forcing() const noexcept { return forcing_; }

    [[nodiscard]] FiniteSystem with_forcing(QuasiPeriodicForcing forcing) const {
        return {params_, F_, std::move(forcing)};
    }
    [[nodiscard]] Rhs rhs() const;

private:
    LatticeParams params_;
    Nonlinearity F_;
    QuasiPeriodicForcing forcing_;
};

/// The lattice truncated to |i| <= N_work with zero ghost cells, standing in for the
/// infinite system. Boundary values are monitored against a floor.
class ReferenceSystem {
public:
    ReferenceSystem(LatticeParams params, Nonlinearity F, QuasiPeriodicForcing forcing,
                    double boundary_floor = 1e-8);

    void operator()(double t, std::span<const double> u, std::span<double> out) const;

    [[nodiscard]] std::size_t dim() const noexcept { return params_.order().dim(); }
    [[nodiscard]] int work_width() const noexcept { return params_.order().value(); }
    [[nodiscard]] const LatticeParams& params() const noexcept { return params_; }
    [[nodiscard]] const QuasiPeriodicForcing& forcing() const noexcept { return forcing_; }
    [[nodiscard]] double boundary_floor() const noexcept { return floor_; }

    [[nodiscard]] ReferenceSystem with_forcing(QuasiPeriodicForcing forcing) const {
        return {params_, F_, std::move(forcing), floor_};
    }
    [[nodiscard]] Rhs rhs() const;

    /// Throws ErrorKind::BoundaryContamination if |u_{+-N_work}| exceeds the floor.
    void check_boundary(std::size_t step, double t, std::span<const double> u) const;
    [[nodiscard]] StepMonitor monitor() const;

private:
    LatticeParams params_;
    Nonlinearity F_;
    QuasiPeriodicForcing forcing_;
    double floor_;
};

/// h = 0.5 / (4 nu + lambda + L_F(rho)), linearized stability of the explicit scheme on the
/// ball of radius rho (the periodic stencil has norm at most 4).
[[nodiscard]] double max_stable_step(const LatticeParams& params, const Nonlinearity& F, double rho);

/// || phi(t, phi(tau, v0, f), sigma(tau, f)) - phi(t + tau, v0, f) || for the finite system.
///
/// The pre-split leg over [0, tau] runs at step h/2 while the other legs use h; with identical
/// grids the RK4 map satisfies the composition law exactly and the defect would be pure
/// round-off. The defect is therefore O(h^4) over the horizon, and exactly 0 for tau = 0.
[[nodiscard]] double cocycle_property_check(std::span<const double> v0, const FiniteSystem& system, double t,
                                            double tau, double h);

}  // namespace lattice
