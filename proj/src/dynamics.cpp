#include "lattice/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "lattice/error.hpp"
#include "lattice/operators.hpp"

namespace lattice {

LatticeParams::LatticeParams(double nu, double lambda, TruncationOrder n) : nu_(nu), lambda_(lambda), n_(n) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        fail(ErrorKind::Parameter, "lambda must be > 0");
    }
    if (!(nu >= 0.0) || !std::isfinite(nu)) {
        fail(ErrorKind::Parameter, "nu must be >= 0");
    }
}

// ---------------------------------------------------------------------------
// Nonlinearity

namespace {

void require_margin(double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        fail(ErrorKind::Parameter, "nonlinearity margin alpha must be >= 0");
    }
}

std::string format_double(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

}  // namespace

Nonlinearity Nonlinearity::linear(double alpha) {
    require_margin(alpha);
    return {"linear", Kind::Linear, -alpha, alpha, DissipationMode::Strict};
}

Nonlinearity Nonlinearity::linear_with_slope(double slope, double alpha) {
    require_margin(alpha);
    return {"linear", Kind::Linear, slope, alpha, DissipationMode::Strict};
}

Nonlinearity Nonlinearity::cubic(double alpha) {
    require_margin(alpha);
    return {"cubic", Kind::Cubic, -alpha, alpha, DissipationMode::Strict};
}

Nonlinearity Nonlinearity::zero() { return {"zero", Kind::Linear, 0.0, 0.0, DissipationMode::Weak}; }

Nonlinearity Nonlinearity::custom(std::string name, Scalar f, Scalar lipschitz_on_ball, double alpha,
                                  DissipationMode mode) {
    require_margin(alpha);
    Nonlinearity out(std::move(name), Kind::Custom, 0.0, alpha, mode);
    out.custom_ = std::move(f);
    out.custom_lipschitz_ = std::move(lipschitz_on_ball);
    return out;
}

Nonlinearity Nonlinearity::from_name(const std::string& name, double alpha, std::optional<double> slope) {
    if (slope && name != "linear") {
        fail(ErrorKind::Config, "slope is only accepted by the linear nonlinearity");
    }
    if (name == "linear") return slope ? linear_with_slope(*slope, alpha) : linear(alpha);
    if (name == "cubic") return cubic(alpha);
    if (name == "zero") {
        if (alpha != 0.0) {
            fail(ErrorKind::Config, "the zero nonlinearity only supports alpha = 0 (weak mode)");
        }
        return zero();
    }
    fail(ErrorKind::Config, "unknown nonlinearity '" + name + "' (expected linear, cubic or zero)");
}

double Nonlinearity::operator()(double s) const {
    switch (kind_) {
        case Kind::Linear: return coeff_ * s;
        case Kind::Cubic: return coeff_ * s - s * s * s;
        case Kind::Custom: return custom_(s);
    }
    return 0.0;
}

double Nonlinearity::lipschitz(double rho) const {
    switch (kind_) {
        case Kind::Linear: return std::abs(coeff_);
        case Kind::Cubic: return std::abs(coeff_) + 3.0 * rho * rho;
        case Kind::Custom: return custom_lipschitz_(rho);
    }
    return 0.0;
}

ConditionReport check_conditions(const Nonlinearity& F, double rho_max, int grid) {
    if (!(rho_max > 0.0) || grid < 2) {
        fail(ErrorKind::Parameter, "condition sampling needs rho_max > 0 and at least 2 grid points");
    }
    ConditionReport report;
    auto violate = [&](std::string cond, double s, std::string msg) {
        report.ok = false;
        report.condition = std::move(cond);
        report.witness = s;
        report.message = std::move(msg);
        return report;
    };

    if (const double f0 = F(0.0); f0 != 0.0) {
        return violate("C2", 0.0, "C2 violated: F(0) = " + format_double(f0) + " != 0");
    }
    const double alpha = F.alpha();
    const double L = F.lipschitz(rho_max);
    const double ds = 2.0 * rho_max / (grid - 1);
    double prev_s = -rho_max;
    double prev_f = F(prev_s);
    for (int k = 0; k < grid; ++k) {
        const double s = -rho_max + k * ds;
        const double fs = F(s);
        const double sf = s * fs;
        if (F.mode() == DissipationMode::Strict) {
            const double bound = -alpha * s * s;
            if (sf > bound + 1e-12 * (std::abs(sf) + std::abs(bound))) {
                return violate("C3", s, "C3 violated: s F(s) = " + format_double(sf) + " > -alpha s^2 = " +
                                            format_double(bound) + " at s = " + format_double(s));
            }
        } else if (sf > 0.0) {
            return violate("weak", s, "weak dissipation violated: s F(s) = " + format_double(sf) +
                                          " > 0 at s = " + format_double(s));
        }
        if (k > 0) {
            const double slope = std::abs(fs - prev_f) / (s - prev_s);
            if (slope > L * (1.0 + 1e-9) + 1e-12) {
                return violate("lipschitz", s, "Lipschitz witness violated: local slope " + format_double(slope) +
                                                   " > L_F(rho) = " + format_double(L));
            }
        }
        prev_s = s;
        prev_f = fs;
    }
    return report;
}

void register_nonlinearity(const Nonlinearity& F, double rho_max, int grid) {
    const ConditionReport r = check_conditions(F, rho_max, grid);
    if (!r.ok) {
        fail(ErrorKind::ConditionViolation, "nonlinearity '" + F.name() + "': " + r.message);
    }
}

// ---------------------------------------------------------------------------
// Right-hand sides

FiniteSystem::FiniteSystem(LatticeParams params, Nonlinearity F, QuasiPeriodicForcing forcing)
    : params_(params), F_(std::move(F)), forcing_(std::move(forcing)) {
    const auto support = forcing_.support_half_width();
    if (!support || *support > params_.order().value()) {
        fail(ErrorKind::Dimension, "forcing must be projected or wrapped to |i| <= " +
                                       std::to_string(params_.order().value()) + " before use");
    }
}

void FiniteSystem::operator()(double t, std::span<const double> v, std::span<double> out) const {
    if (v.size() != dim() || out.size() != dim()) {
        fail(ErrorKind::Dimension, "finite system expects length " + std::to_string(dim()));
    }
    forcing_.eval_into(t, out);
    const double nu = params_.nu();
    const double lambda = params_.lambda();
    const std::size_t d = v.size();
    for (std::size_t i = 0; i < d; ++i) {
        const double left = v[i == 0 ? d - 1 : i - 1];
        const double right = v[i + 1 == d ? 0 : i + 1];
        out[i] += -nu * (2.0 * v[i] - left - right) - lambda * v[i] + F_(v[i]);
    }
}

Rhs FiniteSystem::rhs() const {
    return [self = *this](double t, std::span<const double> v, std::span<double> out) { self(t, v, out); };
}

State rhs_finite(std::span<const double> v, double t, const LatticeParams& params, const Nonlinearity& F,
                 const QuasiPeriodicForcing& f) {
    const FiniteSystem system(params, F, f);
    State out(system.dim());
    system(t, v, out);
    return out;
}

ReferenceSystem::ReferenceSystem(LatticeParams params, Nonlinearity F, QuasiPeriodicForcing forcing,
                                 double boundary_floor)
    : params_(params), F_(std::move(F)), forcing_(std::move(forcing)), floor_(boundary_floor) {
    if (!(boundary_floor > 0.0)) {
        fail(ErrorKind::Parameter, "boundary floor must be > 0");
    }
}

void ReferenceSystem::operator()(double t, std::span<const double> u, std::span<double> out) const {
    if (u.size() != dim() || out.size() != dim()) {
        fail(ErrorKind::Dimension, "reference system expects length " + std::to_string(dim()));
    }
    forcing_.eval_into(t, out);
    const double nu = params_.nu();
    const double lambda = params_.lambda();
    const std::size_t d = u.size();
    for (std::size_t i = 0; i < d; ++i) {
        const double left = i == 0 ? 0.0 : u[i - 1];
        const double right = i + 1 == d ? 0.0 : u[i + 1];
        out[i] += nu * (left - 2.0 * u[i] + right) - lambda * u[i] + F_(u[i]);
    }
}

Rhs ReferenceSystem::rhs() const {
    return [self = *this](double t, std::span<const double> u, std::span<double> out) { self(t, u, out); };
}

void ReferenceSystem::check_boundary(std::size_t step, double t, std::span<const double> u) const {
    const double edge = std::max(std::abs(u.front()), std::abs(u.back()));
    if (edge > floor_) {
        fail(ErrorKind::BoundaryContamination,
             "reference boundary |u_{+-" + std::to_string(work_width()) + "}| = " + format_double(edge) +
                 " exceeds floor " + format_double(floor_) + " at step " + std::to_string(step) + " (t = " +
                 format_double(t) + "); increase the working width");
    }
}

StepMonitor ReferenceSystem::monitor() const {
    return [self = *this](std::size_t step, double t, std::span<const double> u) { self.check_boundary(step, t, u); };
}

PaddedState rhs_reference(const PaddedState& u, double t, const LatticeParams& params, const Nonlinearity& F,
                          const QuasiPeriodicForcing& f) {
    if (u.half_width() != params.order().value()) {
        fail(ErrorKind::Dimension, "padded state width does not match the working width");
    }
    const ReferenceSystem system(params, F, f);
    PaddedState out(u.half_width());
    system(t, u.values(), out.values());
    return out;
}

double max_stable_step(const LatticeParams& params, const Nonlinearity& F, double rho) {
    if (!(rho > 0.0)) {
        fail(ErrorKind::Parameter, "max_stable_step needs rho > 0");
    }
    constexpr double kSafety = 0.5;
    return kSafety / (4.0 * params.nu() + params.lambda() + F.lipschitz(rho));
}

double cocycle_property_check(std::span<const double> v0, const FiniteSystem& system, double t, double tau,
                              double h) {
    if (!(t >= 0.0) || !(tau >= 0.0)) {
        fail(ErrorKind::Parameter, "cocycle check needs t, tau >= 0");
    }
    if (v0.size() != system.dim()) {
        fail(ErrorKind::Dimension, "initial state does not match the system dimension");
    }
    const State start(v0.begin(), v0.end());
    const State mid = integrate_to(system.rhs(), start, 0.0, tau, 0.5 * h);
    const FiniteSystem shifted = system.with_forcing(system.forcing().shifted(tau));
    const State composed = integrate_to(shifted.rhs(), mid, 0.0, t, h);
    const State direct = integrate_to(system.rhs(), start, 0.0, t + tau, h);
    double s = 0.0;
    for (std::size_t i = 0; i < composed.size(); ++i) {
        const double d = composed[i] - direct[i];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace lattice
