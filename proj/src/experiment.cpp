#include "lattice/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>

#include "lattice/attractor.hpp"
#include "lattice/dynamics.hpp"
#include "lattice/estimates.hpp"
#include "lattice/integrator.hpp"
#include "lattice/operators.hpp"

namespace lattice::experiment {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void say(const RunContext& ctx, LogLevel level, const std::string& msg) {
    if (ctx.log && ctx.level != LogLevel::Quiet && static_cast<int>(level) <= static_cast<int>(ctx.level)) {
        *ctx.log << "[lattice] " << msg << '\n';
    }
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
    return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

std::string index_header(const std::string& first, int half_width) {
    std::string h = first;
    for (int i = -half_width; i <= half_width; ++i) {
        if (!h.empty()) h += ',';
        h += "u_" + std::to_string(i);
    }
    return h;
}

void write_row(std::ostream& out, std::span<const double> values, std::optional<double> lead = std::nullopt) {
    bool first = true;
    if (lead) {
        out << format_number(*lead);
        first = false;
    }
    for (double v : values) {
        if (!first) out << ',';
        out << format_number(v);
        first = false;
    }
    out << '\n';
}

json check(const std::string& name, bool passed, double value, double threshold, const std::string& detail = {}) {
    json j{{"name", name}, {"passed", passed}, {"value", value}, {"threshold", threshold}};
    if (!detail.empty()) j["detail"] = detail;
    return j;
}

json base_report(const std::string& command, const ExperimentConfig& cfg) {
    return json{{"schema_version", kSchemaVersion}, {"command", command}, {"config", config_to_json(cfg)},
                {"checks", json::array()}, {"artifacts", json::array()}};
}

void write_report(RunResult& result, const std::string& command, const RunContext& ctx) {
    result.report["exit_code"] = result.exit_code;
    const auto path = ctx.out_dir / (command + "_report.json");
    auto out = open_output(path);
    out << result.report.dump(2) << '\n';
    finish_output(out, path);
}

void add_artifact(RunResult& result, const std::filesystem::path& path) {
    result.artifacts.push_back(path);
    result.report["artifacts"].push_back(path.filename().string());
}

bool all_passed(const json& report) {
    for (const auto& c : report["checks"]) {
        if (!c["passed"].get<bool>()) return false;
    }
    return true;
}

Nonlinearity make_nonlinearity(const ExperimentConfig& cfg) {
    return Nonlinearity::from_name(cfg.nonlinearity, cfg.alpha, cfg.slope);
}

QuasiPeriodicForcing local_forcing(const QuasiPeriodicForcing& f, TruncationOrder n,
                                   attractor::ForcingTreatment treatment) {
    return treatment == attractor::ForcingTreatment::Wrap ? operators::wrap_forcing(f, n)
                                                          : operators::project_forcing(f, n);
}

State initial_state(const ExperimentConfig& cfg, TruncationOrder n) {
    State v(n.dim(), 0.0);
    switch (cfg.initial) {
        case InitialKind::Zero: break;
        case InitialKind::Delta: v[n.slot(0)] = cfg.initial_norm; break;
        case InitialKind::Constant: {
            const double c = cfg.initial_norm / std::sqrt(static_cast<double>(n.dim()));
            for (auto& x : v) x = c;
            break;
        }
        case InitialKind::Random: {
            // a single initial condition on the sphere of the requested norm
            auto ics = attractor::initial_conditions(n.dim(), 1, 2.0 * cfg.initial_norm, cfg.seed);
            v = std::move(ics.front());
            break;
        }
    }
    return v;
}

double auto_step(const ExperimentConfig& cfg, const LatticeParams& params, const Nonlinearity& F,
                 const QuasiPeriodicForcing& f, double initial_norm) {
    const double steady = estimates::asymptotic_radius(params.lambda(), F.alpha(), uniform_bound(f));
    const double rho = std::max({initial_norm, steady, 1e-3}) * 1.05;
    const double h_max = max_stable_step(params, F, rho);
    if (cfg.step == 0.0) return h_max;
    if (cfg.step > h_max) {
        fail(ErrorKind::Parameter, "integrator.step = " + format_number(cfg.step) + " exceeds the stable step " +
                                       format_number(h_max));
    }
    return cfg.step;
}

operators::IntMatrix multiply(const operators::IntMatrix& a, const operators::IntMatrix& b, bool transpose_a,
                              bool transpose_b) {
    const std::size_t rows = transpose_a ? a.cols : a.rows;
    const std::size_t inner = transpose_a ? a.rows : a.cols;
    const std::size_t cols = transpose_b ? b.rows : b.cols;
    operators::IntMatrix c(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            std::int64_t s = 0;
            for (std::size_t k = 0; k < inner; ++k) {
                s += (transpose_a ? a(k, i) : a(i, k)) * (transpose_b ? b(j, k) : b(k, j));
            }
            c(i, j) = s;
        }
    }
    return c;
}

double forcing_defect(const QuasiPeriodicForcing& a, const QuasiPeriodicForcing& b, int n, double t) {
    double s = 0.0;
    for (int i = -n; i <= n; ++i) {
        const double d = a.component(i, t) - b.component(i, t);
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Config:
        case ErrorKind::Parameter:
        case ErrorKind::ConditionViolation:
        case ErrorKind::UnsupportedForcing:
        case ErrorKind::Capacity:
        case ErrorKind::Dimension:
        case ErrorKind::Domain: return kConfigError;
        case ErrorKind::Divergence:
        case ErrorKind::BoundaryContamination: return kDivergence;
        case ErrorKind::Io: return kIoError;
    }
    return kConfigError;
}

LogLevel parse_log_level(const char* value) noexcept {
    if (value == nullptr) return LogLevel::Info;
    const std::string v(value);
    if (v == "quiet") return LogLevel::Quiet;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Info;
}

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["params"] = {{"nu", cfg.nu}, {"lambda", cfg.lambda}, {"n", cfg.n}, {"n_list", cfg.n_list},
                   {"work_width", cfg.work_width}};
    j["params"]["n_ref"] = cfg.n_ref ? json(*cfg.n_ref) : json(nullptr);
    j["nonlinearity"] = {{"name", cfg.nonlinearity}, {"alpha", cfg.alpha}, {"rho_max", cfg.rho_max}};
    if (cfg.slope) j["nonlinearity"]["slope"] = *cfg.slope;
    j["forcing"] = {{"amplitude0", cfg.forcing.amplitude0},
                    {"decay_rate", cfg.forcing.decay_rate},
                    {"support", cfg.forcing.support == ForcingSpec::Support::Finite ? "finite" : "geometric"},
                    {"support_width", cfg.forcing.support_width},
                    {"frequencies", cfg.forcing.frequencies},
                    {"phases", cfg.forcing.phases},
                    {"treatment", cfg.treatment == attractor::ForcingTreatment::Wrap ? "wrap" : "project"}};
    j["integrator"] = {{"step", cfg.step}, {"t0", cfg.t0}, {"t1", cfg.t1}, {"stride", cfg.stride}};
    j["attractor"] = {{"system", cfg.system == AttractorSystem::Finite ? "finite" : "reference"},
                      {"epsilon", cfg.epsilon},
                      {"ic_count", cfg.ic_count},
                      {"sample_count", cfg.sample_count},
                      {"window", cfg.window},
                      {"ic_radius", cfg.ic_radius},
                      {"fiber_shift", cfg.fiber_shift},
                      {"tail_eps", cfg.tail_eps},
                      {"threshold", cfg.threshold},
                      {"boundary_floor", cfg.boundary_floor}};
    j["run"] = {{"seed", cfg.seed}, {"threads", cfg.threads}};
    return j;
}

// ---------------------------------------------------------------------------

RunResult cmd_simulate(const ExperimentConfig& cfg, const RunContext& ctx) {
    validate(cfg);
    const auto start = Clock::now();
    const TruncationOrder n(cfg.n);
    const LatticeParams params(cfg.nu, cfg.lambda, n);
    const Nonlinearity F = make_nonlinearity(cfg);
    register_nonlinearity(F, cfg.rho_max);
    const QuasiPeriodicForcing f = make_forcing(cfg.forcing);
    const FiniteSystem system(params, F, local_forcing(f, n, cfg.treatment));

    const State v0 = initial_state(cfg, n);
    const double h = auto_step(cfg, params, F, f, norm(v0));
    say(ctx, LogLevel::Info, "simulate: n = " + std::to_string(cfg.n) + ", h = " + format_number(h));
    const Trajectory traj = integrate(system.rhs(), v0, cfg.t0, cfg.t1, h, static_cast<std::size_t>(cfg.stride));

    RunResult result;
    result.report = base_report("simulate", cfg);
    const auto traj_path = ctx.out_dir / "trajectory.csv";
    const auto norms_path = ctx.out_dir / "norms.csv";
    {
        auto out = open_output(traj_path);
        out << index_header("t", cfg.n) << '\n';
        for (std::size_t k = 0; k < traj.size(); ++k) write_row(out, traj.states[k], traj.times[k]);
        finish_output(out, traj_path);
    }
    {
        auto out = open_output(norms_path);
        out << "t,norm_sq\n";
        for (std::size_t k = 0; k < traj.size(); ++k) {
            out << format_number(traj.times[k]) << ',' << format_number(norm_sq(traj.states[k])) << '\n';
        }
        finish_output(out, norms_path);
    }
    add_artifact(result, traj_path);
    add_artifact(result, norms_path);

    result.report["step"] = h;
    result.report["samples"] = traj.size();
    result.report["initial_norm"] = norm(v0);
    result.report["final_norm"] = norm(traj.final_state());
    if (F.mode() == DissipationMode::Strict) {
        const auto energy = estimates::verify_energy_decay(traj, cfg.lambda, F.alpha(), uniform_bound(f), 0.05);
        result.report["checks"].push_back(check("energy_decay", energy.ok(), energy.worst_margin, 0.0,
                                                std::to_string(energy.violations.size()) + " violations in " +
                                                    std::to_string(energy.pairs_checked) + " pairs"));
    }
    result.report["timing"] = {{"total_s", seconds_since(start)}};
    result.exit_code = all_passed(result.report) ? kOk : kCheckFailed;
    write_report(result, "simulate", ctx);
    return result;
}

RunResult cmd_verify(const ExperimentConfig& cfg, const RunContext& ctx) {
    validate(cfg);
    const auto start = Clock::now();
    RunResult result;
    result.report = base_report("verify", cfg);
    auto& checks = result.report["checks"];
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    {
        bool ok = true;
        int first_bad = 0;
        for (int m = 1; m <= cfg.max_matrix_order && ok; ++m) {
            const TruncationOrder order(m);
            const auto A = operators::materialize_laplacian(order);
            const auto B = operators::materialize_difference(order);
            ok = A == multiply(B, B, true, false) && A == multiply(B, B, false, true);
            if (!ok) first_bad = m;
        }
        checks.push_back(check("matrix_identity", ok, ok ? 0.0 : first_bad, 0.0,
                               "A_n == B_n^T B_n == B_n B_n^T for n = 1.." + std::to_string(cfg.max_matrix_order)));
    }
    {
        const TruncationOrder order(cfg.n);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            State v(order.dim());
            for (auto& x : v) x = unit(rng);
            const double lhs = dot(operators::apply_laplacian(v, order), v);
            const double rhs = norm_sq(operators::apply_difference(v, order));
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, rhs));
        }
        checks.push_back(check("laplacian_energy_identity", worst <= 1e-12, worst, 1e-12, "<A v, v> = ||B v||^2"));
    }

    const QuasiPeriodicForcing f = make_forcing(cfg.forcing);
    {
        double worst_p = 0.0;
        double worst_h = 0.0;
        std::uniform_int_distribution<int> order_dist(1, 32);
        for (int trial = 0; trial < cfg.equivariance_trials; ++trial) {
            const TruncationOrder order(order_dist(rng));
            const double h = 50.0 * unit(rng);
            const double t = 50.0 * unit(rng);
            const auto shifted = f.shifted(h);
            worst_p = std::max(worst_p, forcing_defect(operators::project_forcing(shifted, order),
                                                       operators::project_forcing(f, order).shifted(h),
                                                       order.value(), t));
            worst_h = std::max(worst_h, forcing_defect(operators::wrap_forcing(shifted, order),
                                                       operators::wrap_forcing(f, order).shifted(h),
                                                       order.value(), t));
        }
        checks.push_back(check("projection_equivariance", worst_p < 1e-12, worst_p, 1e-12));
        checks.push_back(check("wrap_equivariance", worst_h < 1e-12, worst_h, 1e-12));
    }

    const Nonlinearity F = make_nonlinearity(cfg);
    const ConditionReport cond = check_conditions(F, cfg.rho_max);
    checks.push_back(check("nonlinearity_conditions", cond.ok, cond.witness, 0.0,
                           cond.ok ? "C2 and dissipation conditions hold on the sample grid" : cond.message));
    if (!cond.ok) say(ctx, LogLevel::Info, "verify: " + cond.message);

    const TruncationOrder n(cfg.n);
    const LatticeParams params(cfg.nu, cfg.lambda, n);
    const FiniteSystem system(params, F, local_forcing(f, n, cfg.treatment));
    if (cond.ok) {
        const State v0 = initial_state(cfg, n);
        const double defect = cocycle_property_check(v0, system, cfg.cocycle_t, cfg.cocycle_tau, cfg.cocycle_step);
        checks.push_back(check("cocycle_defect", defect < 1e-8, defect, 1e-8));

        if (F.mode() == DissipationMode::Strict) {
            const double C = uniform_bound(f);
            const auto ics = attractor::initial_conditions(n.dim(), cfg.energy_trials, 2.0 * cfg.initial_norm,
                                                           cfg.seed);
            double worst = std::numeric_limits<double>::infinity();
            std::size_t violations = 0;
            for (const auto& v0i : ics) {
                const double h = auto_step(cfg, params, F, f, norm(v0i));
                const auto traj = integrate(system.rhs(), v0i, 0.0, cfg.energy_horizon, h);
                const auto rep = estimates::verify_energy_decay(traj, cfg.lambda, F.alpha(), C, cfg.energy_margin);
                worst = std::min(worst, rep.worst_margin);
                violations += rep.violations.size();
            }
            checks.push_back(check("energy_decay", violations == 0, worst, 0.0,
                                   std::to_string(violations) + " violating sample pairs"));
        }
    }

    result.report["timing"] = {{"total_s", seconds_since(start)}};
    result.exit_code = all_passed(result.report) ? kOk : kCheckFailed;
    for (const auto& c : checks) {
        say(ctx, LogLevel::Debug, "verify: " + c["name"].get<std::string>() + " " +
                                      (c["passed"].get<bool>() ? "pass" : "FAIL"));
    }
    write_report(result, "verify", ctx);
    return result;
}

RunResult cmd_attractor(const ExperimentConfig& cfg, const RunContext& ctx) {
    validate(cfg);
    const auto start = Clock::now();
    const Nonlinearity F = make_nonlinearity(cfg);
    if (!(F.alpha() > 0.0) || F.mode() != DissipationMode::Strict) {
        fail(ErrorKind::Parameter, "the attractor command requires strict dissipation (alpha > 0)");
    }
    register_nonlinearity(F, cfg.rho_max);
    const QuasiPeriodicForcing f = make_forcing(cfg.forcing);
    const int width = std::max(cfg.work_width, cfg.n);
    const auto opts = sampling_options(cfg);

    attractor::AttractorCloud cloud;
    if (cfg.system == AttractorSystem::Finite) {
        cloud = attractor::sample_finite(LatticeParams(cfg.nu, cfg.lambda, TruncationOrder(cfg.n)), F, f, opts, width);
    } else {
        cloud = attractor::sample_reference(LatticeParams(cfg.nu, cfg.lambda, TruncationOrder(width)), F, f, opts,
                                            cfg.boundary_floor);
    }
    say(ctx, LogLevel::Info, "attractor: " + std::to_string(cloud.points.size()) + " points, burn-in " +
                                 format_number(cloud.burn_in));

    RunResult result;
    result.report = base_report("attractor", cfg);
    const double C = uniform_bound(f);
    const double bound = estimates::gronwall_bound(cfg.lambda, F.alpha(), C, cloud.ic_radius, cloud.burn_in);
    const double max_norm = cloud.max_norm();
    result.report["checks"].push_back(check("absorbing_bound", max_norm <= 1.05 * bound, max_norm, 1.05 * bound));
    result.report["cloud"] = {{"points", cloud.points.size()}, {"work_width", cloud.work_width},
                              {"diameter", cloud.diameter()}, {"max_norm", max_norm},
                              {"burn_in", cloud.burn_in}, {"step", cloud.step},
                              {"absorbing_radius", cloud.absorbing_radius}, {"ic_radius", cloud.ic_radius},
                              {"pullback_times", cloud.pullback_times}};

    const attractor::TailCalibration calib{cfg.nu, F.alpha(), bound * bound, f};
    const auto cert = attractor::tail_certificate(std::span(&cloud, 1), cfg.tail_eps, calib);
    json tail = {{"schema_version", kSchemaVersion}, {"points", cert.points}, {"entries", json::array()}};
    for (const auto& e : cert.entries) {
        tail["entries"].push_back({{"eps", e.eps}, {"k", e.k}, {"worst_tail", e.worst_tail}, {"margin", e.margin},
                                   {"passed", e.ok}, {"k_beyond_support", e.beyond_support},
                                   {"empirical_k", e.empirical_k}});
    }
    result.report["checks"].push_back(check("tail_certificate", cert.ok(), cert.points, 0.0));

    const auto cloud_path = ctx.out_dir / "cloud.csv";
    {
        auto out = open_output(cloud_path);
        out << index_header("", cloud.work_width) << '\n';
        for (const auto& p : cloud.points) write_row(out, p.values());
        finish_output(out, cloud_path);
    }
    const auto tail_path = ctx.out_dir / "tail_report.json";
    {
        auto out = open_output(tail_path);
        out << tail.dump(2) << '\n';
        finish_output(out, tail_path);
    }
    add_artifact(result, cloud_path);
    add_artifact(result, tail_path);
    result.report["tail_certificate"] = tail;
    result.report["timing"] = {{"total_s", seconds_since(start)}};
    result.exit_code = all_passed(result.report) ? kOk : kCheckFailed;
    write_report(result, "attractor", ctx);
    return result;
}

RunResult cmd_converge(const ExperimentConfig& cfg, const RunContext& ctx) {
    validate(cfg);
    if (cfg.n_list.empty()) fail(ErrorKind::Config, "converge needs params.n_list");
    if (!cfg.n_ref) fail(ErrorKind::Config, "converge needs params.n_ref");
    const auto start = Clock::now();
    const Nonlinearity F = make_nonlinearity(cfg);
    if (!(F.alpha() > 0.0) || F.mode() != DissipationMode::Strict) {
        fail(ErrorKind::Parameter, "the converge command requires strict dissipation (alpha > 0)");
    }
    register_nonlinearity(F, cfg.rho_max);
    const QuasiPeriodicForcing f = make_forcing(cfg.forcing);
    const auto report = attractor::convergence_study(f, cfg.nu, cfg.lambda, F, cfg.n_list, *cfg.n_ref,
                                                     sampling_options(cfg), cfg.threshold, cfg.boundary_floor);

    RunResult result;
    result.report = base_report("converge", cfg);
    const auto csv_path = ctx.out_dir / "convergence.csv";
    {
        auto out = open_output(csv_path);
        out << "n,beta_n_to_ref,beta_ref_to_n,runtime_s\n";
        for (const auto& row : report.rows) {
            out << row.n << ',' << format_number(row.beta_to_ref) << ',' << format_number(row.beta_from_ref) << ','
                << format_number(row.seconds) << '\n';
        }
        finish_output(out, csv_path);
    }
    add_artifact(result, csv_path);
    json rows = json::array();
    for (const auto& row : report.rows) {
        rows.push_back({{"n", row.n}, {"beta_n_to_ref", row.beta_to_ref}, {"beta_ref_to_n", row.beta_from_ref},
                        {"points", row.points}, {"reference_points", row.reference_points}});
    }
    result.report["rows"] = rows;
    result.report["strictly_decreasing"] = report.strictly_decreasing;
    const double final_beta = report.rows.back().beta_to_ref;
    result.report["checks"].push_back(check("final_beta_below_threshold", report.passed, final_beta, cfg.threshold));
    result.report["timing"] = {{"total_s", seconds_since(start)}, {"reference_s", report.reference_seconds}};
    result.exit_code = report.passed ? kOk : kCheckFailed;
    if (ctx.console) {
        *ctx.console << (report.passed ? "PASS" : "FAIL") << " converge: beta(I^" << report.rows.back().n
                     << ", I_ref) = " << format_number(final_beta) << " (threshold " << format_number(cfg.threshold)
                     << ")\n";
    }
    write_report(result, "converge", ctx);
    return result;
}

}  // namespace lattice::experiment
