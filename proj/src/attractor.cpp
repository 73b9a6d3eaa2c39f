#include "lattice/attractor.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include "lattice/error.hpp"
#include "lattice/estimates.hpp"
#include "lattice/operators.hpp"

namespace lattice::attractor {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Runs task(i) for i in [0, count) on up to `threads` workers. The first failing index
/// (lowest i) determines the rethrown exception, so failures are deterministic.
template <typename Task>
void parallel_for(std::size_t count, int threads, Task task) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto workers = static_cast<std::size_t>(std::clamp(threads, 1, 64));
    if (workers == 1 || count < 2) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < std::min(workers, count); ++w) pool.emplace_back(worker);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

struct SamplingPlan {
    double ic_radius = 0.0;
    double absorbing = 0.0;
    double burn_in = 0.0;
    double step = 0.0;
    std::vector<double> horizons;
};

SamplingPlan plan_sampling(const LatticeParams& params, const Nonlinearity& F, const QuasiPeriodicForcing& f,
                           const SamplingOptions& opts) {
    if (opts.ic_count < 1 || opts.sample_count < 1) {
        fail(ErrorKind::Parameter, "sampling needs ic_count >= 1 and sample_count >= 1");
    }
    if (!(opts.window >= 0.0)) fail(ErrorKind::Parameter, "sampling window must be >= 0");
    if (!(F.alpha() > 0.0) || F.mode() != DissipationMode::Strict) {
        fail(ErrorKind::Parameter, "attractor sampling requires strict dissipation (alpha > 0)");
    }
    SamplingPlan plan;
    const double C = uniform_bound(f);
    plan.absorbing = estimates::asymptotic_radius(params.lambda(), F.alpha(), C);
    plan.ic_radius = opts.ic_radius > 0.0 ? opts.ic_radius : (plan.absorbing > 0.0 ? plan.absorbing : 1.0);
    plan.burn_in = estimates::burn_in_time(F.alpha(), plan.ic_radius * plan.ic_radius, opts.epsilon);
    const double rho = 1.05 * std::max(plan.ic_radius, plan.absorbing);
    plan.step = opts.step > 0.0 ? opts.step : max_stable_step(params, F, rho);
    for (int j = 0; j < opts.sample_count; ++j) {
        plan.horizons.push_back(plan.burn_in + opts.window * j / opts.sample_count);
    }
    return plan;
}

template <typename Integrate>
AttractorCloud run_sampling(std::size_t dim, const SamplingPlan& plan, const SamplingOptions& opts, int work_width,
                            std::optional<int> order, Integrate integrate_one) {
    const std::vector<State> ics = initial_conditions(dim, opts.ic_count, plan.ic_radius, opts.seed);
    const std::size_t per_ic = plan.horizons.size();
    std::vector<PaddedState> points(ics.size() * per_ic);
    parallel_for(points.size(), opts.threads, [&](std::size_t task) {
        const std::size_t k = task / per_ic;
        const double tau = plan.horizons[task % per_ic];
        try {
            points[task] = integrate_one(ics[k], tau);
        } catch (const DivergenceError& e) {
            throw DivergenceError(e.step(), e.time(),
                                  "initial condition " + std::to_string(k) + " (seed " + std::to_string(opts.seed) +
                                      "): " + e.what());
        } catch (const Error& e) {
            throw Error(e.kind(), "initial condition " + std::to_string(k) + " (seed " +
                                      std::to_string(opts.seed) + "): " + e.what());
        }
    });
    AttractorCloud cloud;
    cloud.order = order;
    cloud.work_width = work_width;
    cloud.fiber_shift = opts.fiber_shift;
    cloud.points = std::move(points);
    cloud.burn_in = plan.burn_in;
    cloud.pullback_times = plan.horizons;
    cloud.ic_radius = plan.ic_radius;
    cloud.absorbing_radius = plan.absorbing;
    cloud.step = plan.step;
    cloud.seed = opts.seed;
    return cloud;
}

}  // namespace

double AttractorCloud::max_norm() const {
    double m = 0.0;
    for (const auto& p : points) m = std::max(m, p.norm());
    return m;
}

double AttractorCloud::diameter() const {
    double d = 0.0;
    for (std::size_t a = 0; a < points.size(); ++a) {
        for (std::size_t b = a + 1; b < points.size(); ++b) d = std::max(d, distance(points[a], points[b]));
    }
    return d;
}

std::vector<State> initial_conditions(std::size_t dim, int count, double radius, std::uint64_t seed) {
    std::vector<State> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int k = 0; k < count; ++k) {
        std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(k))));
        std::normal_distribution<double> gauss(0.0, 1.0);
        State x(dim);
        double s = 0.0;
        do {
            s = 0.0;
            for (auto& xi : x) {
                xi = gauss(rng);
                s += xi * xi;
            }
        } while (s == 0.0);
        const double r = radius * (k + 0.5) / count;
        const double scale = r / std::sqrt(s);
        for (auto& xi : x) xi *= scale;
        out.push_back(std::move(x));
    }
    return out;
}

AttractorCloud sample_finite(const LatticeParams& params, const Nonlinearity& F, const QuasiPeriodicForcing& f,
                             const SamplingOptions& opts, int work_width) {
    const TruncationOrder n = params.order();
    const QuasiPeriodicForcing fiber = f.shifted(opts.fiber_shift);
    QuasiPeriodicForcing local = opts.treatment == ForcingTreatment::Wrap ? operators::wrap_forcing(fiber, n)
                                                                          : operators::project_forcing(fiber, n);
    const FiniteSystem system(params, F, std::move(local));
    const SamplingPlan plan = plan_sampling(params, F, f, opts);
    const Rhs rhs = system.rhs();
    return run_sampling(n.dim(), plan, opts, work_width, n.value(), [&](const State& x, double tau) {
        return operators::embed(integrate_to(rhs, x, -tau, 0.0, plan.step), n, work_width);
    });
}

AttractorCloud sample_reference(const LatticeParams& params, const Nonlinearity& F, const QuasiPeriodicForcing& f,
                                const SamplingOptions& opts, double boundary_floor) {
    const ReferenceSystem system(params, F, f.shifted(opts.fiber_shift), boundary_floor);
    const SamplingPlan plan = plan_sampling(params, F, f, opts);
    const Rhs rhs = system.rhs();
    const StepMonitor monitor = system.monitor();
    const int width = system.work_width();
    const int support = opts.reference_ic_width > 0 ? std::min(opts.reference_ic_width, width - 1)
                                                    : std::max(1, width / 4);
    // initial conditions live on |i| <= support so the boundary monitor starts clean
    const TruncationOrder ic_order(support);
    return run_sampling(ic_order.dim(), plan, opts, width, std::nullopt, [&](const State& x, double tau) {
        const PaddedState start = operators::embed(x, ic_order, width);
        const State y0(start.values().begin(), start.values().end());
        return PaddedState(width, integrate_to(rhs, y0, -tau, 0.0, plan.step, monitor));
    });
}

double hausdorff_semidistance(std::span<const PaddedState> A, std::span<const PaddedState> B) {
    if (A.empty() || B.empty()) fail(ErrorKind::Domain, "Hausdorff semi-distance of an empty cloud");
    int width = 0;
    for (const auto& p : A) width = std::max(width, p.half_width());
    for (const auto& p : B) width = std::max(width, p.half_width());
    auto common = [width](std::span<const PaddedState> cloud) {
        std::vector<PaddedState> out;
        out.reserve(cloud.size());
        for (const auto& p : cloud) out.push_back(p.half_width() == width ? p : p.repad(width));
        return out;
    };
    const auto a_pts = common(A);
    const auto b_pts = common(B);

    double worst = 0.0;  // squared
    for (const auto& a : a_pts) {
        const auto av = a.values();
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& b : b_pts) {
            const auto bv = b.values();
            double s = 0.0;
            for (std::size_t i = 0; i < av.size() && s < nearest; ++i) {
                const double d = av[i] - bv[i];
                s += d * d;
            }
            nearest = std::min(nearest, s);
            if (nearest <= worst) break;  // this a cannot raise the maximum
        }
        worst = std::max(worst, nearest);
    }
    return std::sqrt(worst);
}

double hausdorff_semidistance(const AttractorCloud& A, const AttractorCloud& B) {
    return hausdorff_semidistance(std::span<const PaddedState>(A.points), std::span<const PaddedState>(B.points));
}

ConvergenceReport convergence_study(const QuasiPeriodicForcing& f, double nu, double lambda, const Nonlinearity& F,
                                    std::span<const int> n_list, int n_ref, const SamplingOptions& opts,
                                    double threshold, double boundary_floor) {
    if (n_list.empty()) fail(ErrorKind::Parameter, "convergence study needs a nonempty n_list");
    for (int n : n_list) {
        if (n > n_ref) {
            fail(ErrorKind::Parameter, "every n in n_list must be <= n_ref (" + std::to_string(n_ref) + ")");
        }
    }
    using Clock = std::chrono::steady_clock;
    ConvergenceReport report;
    report.reference_width = n_ref;
    report.threshold = threshold;

    const LatticeParams ref_params(nu, lambda, TruncationOrder(n_ref));
    const auto ref_start = Clock::now();
    const AttractorCloud reference = sample_reference(ref_params, F, f, opts, boundary_floor);
    report.reference_seconds = std::chrono::duration<double>(Clock::now() - ref_start).count();

    for (int n : n_list) {
        const auto start = Clock::now();
        ConvergenceRow row;
        row.n = n;
        if (n == n_ref) {
            row.beta_to_ref = hausdorff_semidistance(reference, reference);
            row.beta_from_ref = row.beta_to_ref;
            row.points = reference.points.size();
        } else {
            const AttractorCloud cloud = sample_finite(ref_params.with_order(TruncationOrder(n)), F, f, opts, n_ref);
            row.beta_to_ref = hausdorff_semidistance(cloud, reference);
            row.beta_from_ref = hausdorff_semidistance(reference, cloud);
            row.points = cloud.points.size();
        }
        row.reference_points = reference.points.size();
        row.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        report.rows.push_back(row);
    }
    report.strictly_decreasing = true;
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        if (!(report.rows[i].beta_to_ref < report.rows[i - 1].beta_to_ref)) report.strictly_decreasing = false;
    }
    report.passed = report.rows.back().beta_to_ref < threshold;
    return report;
}

bool TailCertificate::ok() const {
    return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.ok; });
}

TailCertificate tail_certificate(std::span<const AttractorCloud> clouds, std::span<const double> eps_list,
                                 const TailCalibration& calib) {
    std::size_t total = 0;
    int max_width = 0;
    for (const auto& c : clouds) {
        if (c.points.empty()) fail(ErrorKind::Domain, "tail certificate of an empty cloud");
        total += c.points.size();
        max_width = std::max(max_width, c.work_width);
    }
    if (total == 0) fail(ErrorKind::Domain, "tail certificate needs at least one cloud");

    TailCertificate cert;
    cert.points = total;
    for (double eps : eps_list) {
        TailCertificateEntry e;
        e.eps = eps;
        e.k = estimates::calibrate_tail_cutoff(calib.nu, calib.alpha, calib.Q_norm_sq, calib.forcing, eps);
        e.beyond_support = e.k > max_width;
        int empirical = 0;
        for (const auto& c : clouds) {
            for (const auto& w : c.points) {
                e.worst_tail = std::max(e.worst_tail, estimates::tail_mass(w, e.k));
                int kk = empirical;
                while (estimates::tail_mass(w, kk) > eps) ++kk;
                empirical = kk;
            }
        }
        e.empirical_k = empirical;
        e.margin = eps - e.worst_tail;
        e.ok = e.worst_tail <= eps;
        cert.entries.push_back(e);
    }
    return cert;
}

}  // namespace lattice::attractor
