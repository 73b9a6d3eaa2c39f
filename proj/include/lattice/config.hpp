#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lattice/attractor.hpp"
#include "lattice/forcing.hpp"

namespace lattice {

enum class InitialKind { Random, Delta, Constant, Zero };
enum class AttractorSystem { Finite, Reference };

/// Experiment description read from an INI-style file. Sections and keys:
///
///   [params]       nu, lambda, n, n_list, n_ref, work_width
///   [nonlinearity] name, alpha, slope, rho_max
///   [forcing]      amplitude0, decay_rate, support, support_width, frequency_rule, phase_rule, treatment
///   [integrator]   step, t0, t1, stride
///   [initial]      kind, norm
///   [attractor]    system, epsilon, ic_count, sample_count, window, ic_radius, fiber_shift,
///                  tail_eps, threshold, boundary_floor, reference_ic_width
///   [verify]       max_matrix_order, equivariance_trials, cocycle_t, cocycle_tau, cocycle_step,
///                  energy_margin, energy_trials, energy_horizon
///   [run]          seed, threads
///
/// Unknown sections or keys are rejected.
struct ExperimentConfig {
    // params
    double nu = 1.0;
    double lambda = 1.0;
    int n = 8;
    std::vector<int> n_list;
    std::optional<int> n_ref;
    int work_width = 0;  // 0: same as n

    // nonlinearity
    std::string nonlinearity = "cubic";
    double alpha = 1.0;
    std::optional<double> slope;
    double rho_max = 10.0;

    // forcing
    ForcingSpec forcing;
    attractor::ForcingTreatment treatment = attractor::ForcingTreatment::Wrap;

    // integrator
    double step = 0.0;  // 0: automatic
    double t0 = 0.0;
    double t1 = 10.0;
    int stride = 1;

    // initial state
    InitialKind initial = InitialKind::Random;
    double initial_norm = 1.0;

    // attractor
    AttractorSystem system = AttractorSystem::Finite;
    double epsilon = 1e-10;
    int ic_count = 8;
    int sample_count = 4;
    double window = 5.0;
    double ic_radius = 0.0;
    double fiber_shift = 0.0;
    std::vector<double> tail_eps{1e-2, 1e-3};
    double threshold = 1e-5;
    double boundary_floor = 1e-8;
    int reference_ic_width = 0;

    // verify
    int max_matrix_order = 32;
    int equivariance_trials = 100;
    double cocycle_t = 1.0;
    double cocycle_tau = 1.0;
    double cocycle_step = 1e-3;
    double energy_margin = 0.05;
    int energy_trials = 5;
    double energy_horizon = 5.0;

    // run
    std::uint64_t seed = 1;
    int threads = 1;
};

/// Throws ErrorKind::Config for syntax errors, unknown keys and malformed values, and
/// ErrorKind::Parameter for values outside their documented ranges.
[[nodiscard]] ExperimentConfig parse_config(std::istream& in);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

/// Range checks shared by every command.
void validate(const ExperimentConfig& cfg);

[[nodiscard]] attractor::SamplingOptions sampling_options(const ExperimentConfig& cfg);

}  // namespace lattice
