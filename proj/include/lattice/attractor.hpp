#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lattice/dynamics.hpp"
#include "lattice/forcing.hpp"
#include "lattice/state.hpp"

namespace lattice::attractor {

/// How a finite system sees the l2 forcing.
enum class ForcingTreatment {
    Wrap,     // H_n, periodic wrap of the boundary modes
    Project,  // P_n, plain truncation
};

struct SamplingOptions {
    double epsilon = 1e-10;   // burn-in accuracy fed to burn_in_time
    int ic_count = 8;
    int sample_count = 4;
    double window = 5.0;      // pullback horizons span [T, T + window)
    double step = 0.0;        // 0: max_stable_step on the initial-condition ball
    double ic_radius = 0.0;   // 0: asymptotic absorbing radius (1 for zero forcing)
    double fiber_shift = 0.0; // the cloud approximates the fiber at sigma(fiber_shift, f)
    std::uint64_t seed = 1;
    int threads = 1;
    int reference_ic_width = 0;  // reference initial conditions on |i| <= this; 0: width/4
    ForcingTreatment treatment = ForcingTreatment::Wrap;
};

/// Finite point sample of one fiber attractor, every point embedded at a common width.
struct AttractorCloud {
    std::optional<int> order;  // truncation order, or nullopt for the padded reference system
    int work_width = 0;
    double fiber_shift = 0.0;
    std::vector<PaddedState> points;
    double burn_in = 0.0;
    std::vector<double> pullback_times;
    double ic_radius = 0.0;
    double absorbing_radius = 0.0;  // asymptotic radius sqrt(C^2 / (lambda (lambda + 2 alpha)))
    double step = 0.0;
    std::uint64_t seed = 0;

    [[nodiscard]] double max_norm() const;
    [[nodiscard]] double diameter() const;
};

/// Pullback sampling of the fiber attractor of the periodic (2n+1)-system:
/// for each initial condition x_k in the absorbing ball and each horizon tau_j in
/// [T, T + window) the point phi(tau_j, x_k, sigma(-tau_j, g)) with g = sigma(fiber_shift, f),
/// i.e. the state at time 0 of the integration started at time -tau_j.
/// T = burn_in_time(alpha, R^2, epsilon) with R the initial-condition radius.
///
/// `params.order()` is the truncation order; points are embedded at `work_width`.
/// Throws ErrorKind::Parameter for alpha = 0, and rethrows integration failures with the
/// offending initial-condition index.
[[nodiscard]] AttractorCloud sample_finite(const LatticeParams& params, const Nonlinearity& F,
                                           const QuasiPeriodicForcing& f, const SamplingOptions& opts,
                                           int work_width);

/// Same sampling for the padded reference system of half-width params.order().
[[nodiscard]] AttractorCloud sample_reference(const LatticeParams& params, const Nonlinearity& F,
                                              const QuasiPeriodicForcing& f, const SamplingOptions& opts,
                                              double boundary_floor = 1e-8);

/// Initial conditions used by the samplers: stratified radii (k + 1/2) R / count with
/// seeded Gaussian directions.
[[nodiscard]] std::vector<State> initial_conditions(std::size_t dim, int count, double radius,
                                                    std::uint64_t seed);

/// beta(A, B) = max_{a in A} min_{b in B} ||a - b||. Throws ErrorKind::Domain on an empty cloud.
[[nodiscard]] double hausdorff_semidistance(std::span<const PaddedState> A, std::span<const PaddedState> B);
[[nodiscard]] double hausdorff_semidistance(const AttractorCloud& A, const AttractorCloud& B);

struct ConvergenceRow {
    int n = 0;
    double beta_to_ref = 0.0;
    double beta_from_ref = 0.0;
    double seconds = 0.0;
    std::size_t points = 0;
    std::size_t reference_points = 0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    int reference_width = 0;
    double threshold = 0.0;
    double reference_seconds = 0.0;
    bool strictly_decreasing = false;
    bool passed = false;  // final beta_to_ref < threshold
};

/// Samples I^n for each n in n_list and the reference cloud at width n_ref, and reports
/// beta(I^n, I_ref) and beta(I_ref, I^n). A row with n == n_ref compares the reference
/// cloud with itself.
[[nodiscard]] ConvergenceReport convergence_study(const QuasiPeriodicForcing& f, double nu, double lambda,
                                                  const Nonlinearity& F, std::span<const int> n_list, int n_ref,
                                                  const SamplingOptions& opts, double threshold,
                                                  double boundary_floor = 1e-8);

/// Constants entering the cutoff calibration k(eps).
struct TailCalibration {
    double nu = 0.0;
    double alpha = 0.0;
    double Q_norm_sq = 0.0;
    QuasiPeriodicForcing forcing;
};

struct TailCertificateEntry {
    double eps = 0.0;
    int k = 0;                  // calibrated, independent of n
    double worst_tail = 0.0;    // max over points of tail_mass(w, k)
    double margin = 0.0;        // eps - worst_tail
    bool ok = false;
    bool beyond_support = false;  // k exceeds every cloud's stored width
    int empirical_k = 0;        // smallest k with every tail <= eps
};

struct TailCertificate {
    std::vector<TailCertificateEntry> entries;
    std::size_t points = 0;

    [[nodiscard]] bool ok() const;
};

/// For each eps: calibrates k(eps) once and checks tail_mass(w, k(eps)) <= eps for every point
/// of every cloud (pass several clouds for the pooled union-of-attractors check).
[[nodiscard]] TailCertificate tail_certificate(std::span<const AttractorCloud> clouds,
                                               std::span<const double> eps_list, const TailCalibration& calib);

}  // namespace lattice::attractor
