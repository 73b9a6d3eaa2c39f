#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "lattice/state.hpp"

namespace lattice {

/// One sinusoidal mode a*sin(omega*t + phi).
struct Mode {
    double amplitude = 0.0;
    double frequency = 0.0;
    double phase = 0.0;

    friend bool operator==(const Mode&, const Mode&) = default;
};

/// Closed-form family a0*r^{|i|}*sin(omega*t + phi) for every |i| >= start.
/// Stored symbolically so tail sums are exact series.
struct GeometricTail {
    double amplitude0 = 0.0;
    double ratio = 0.0;  // 0 <= ratio < 1
    double frequency = 0.0;
    double phase = 0.0;
    int start = 0;

    [[nodiscard]] double amplitude(int i) const noexcept;
    /// sum of amplitude(i)^2 over |i| >= max(k, start)
    [[nodiscard]] double square_sum_from(int k) const noexcept;

    friend bool operator==(const GeometricTail&, const GeometricTail&) = default;
};

/// Quasi-periodic l2-valued forcing f(t) = (f_i(t))_{i in Z} with square-summable
/// amplitudes. Explicit modes cover a finite index set; an optional geometric tail
/// covers |i| >= tail.start and must not overlap the explicit indices.
///
/// Time shifts are stored as an accumulated offset, so that
/// shifted(h).component(i, t) evaluates exactly the same expression as component(i, t + h).
class QuasiPeriodicForcing {
public:
    QuasiPeriodicForcing() = default;
    explicit QuasiPeriodicForcing(std::map<int, Mode> modes, std::optional<GeometricTail> tail = std::nullopt,
                                  double time_offset = 0.0);

    /// a_i = a0*r^{|i|} for all i with a common frequency and phase.
    [[nodiscard]] static QuasiPeriodicForcing geometric(double amplitude0, double ratio, double frequency,
                                                        double phase = 0.0);
    /// a_i = a0*r^{|i|} on |i| <= half_width, zero elsewhere.
    [[nodiscard]] static QuasiPeriodicForcing finite_geometric(double amplitude0, double ratio, int half_width,
                                                               double frequency, double phase = 0.0);

    [[nodiscard]] double component(int i, double t) const;
    /// Amplitude/frequency/phase of index i, ignoring the time offset.
    [[nodiscard]] Mode mode(int i) const;

    /// (f_i(t))_{|i| <= window} as a padded state.
    [[nodiscard]] PaddedState eval(double t, int window) const;
    /// Writes f_i(t) for |i| <= (out.size()-1)/2 into out (center aligned).
    void eval_into(double t, std::span<double> out) const;

    /// sigma(h, f): t -> f(t + h).
    [[nodiscard]] QuasiPeriodicForcing shifted(double h) const;

    [[nodiscard]] double time_offset() const noexcept { return offset_; }
    [[nodiscard]] const std::map<int, Mode>& explicit_modes() const noexcept { return modes_; }
    [[nodiscard]] const std::optional<GeometricTail>& tail() const noexcept { return tail_; }

    /// Largest |i| with a nonzero amplitude, or nullopt for an infinite geometric tail.
    [[nodiscard]] std::optional<int> support_half_width() const;
    [[nodiscard]] bool is_zero() const;

    /// sum_i a_i^2
    [[nodiscard]] double square_sum() const;
    /// sum_{|i| >= k} a_i^2, the supremum over t of the tail when all phases agree.
    [[nodiscard]] double amplitude_tail(int k) const;
    /// sum_i a_i^2 omega_i^2
    [[nodiscard]] double frequency_weighted_sum() const;

    friend bool operator==(const QuasiPeriodicForcing&, const QuasiPeriodicForcing&) = default;

private:
    std::map<int, Mode> modes_;
    std::optional<GeometricTail> tail_;
    double offset_ = 0.0;
};

/// Tail functional R_n(f)(t) = sum_{|i| >= n+1} |f_i(t)|^2, exact for both representations.
[[nodiscard]] double tail(const QuasiPeriodicForcing& f, int n, double t);

/// Grid approximation of the compact-open (Bebutov) distance
///   sup_{L > 0} min( max_{|t| <= L} ||f(t) - g(t)||, 1/L )
/// with L and t on the grid {k*dt : k*dt <= L_max}. The inner maximum is approximated
/// from below by its grid samples.
[[nodiscard]] double bebutov_distance(const QuasiPeriodicForcing& f, const QuasiPeriodicForcing& g, double L_max,
                                      double dt);

/// ||f(t) - g(t)||^2 over all indices; geometric tails are summed until the remainder is negligible.
[[nodiscard]] double difference_norm_sq(const QuasiPeriodicForcing& f, const QuasiPeriodicForcing& g, double t);

/// C = (sum_i a_i^2)^{1/2}; bounds ||g(t)|| for every shift and every truncation/wrap of f.
[[nodiscard]] double uniform_bound(const QuasiPeriodicForcing& f);

/// delta = eps / (sum_i a_i^2 omega_i^2)^{1/2} from the global Lipschitz bound; +inf when
/// the forcing is constant in time. Throws ErrorKind::UnsupportedForcing if the weighted sum
/// is not finite.
[[nodiscard]] double equicontinuity_modulus(const QuasiPeriodicForcing& f, double eps);

/// Forcing description as read from an experiment config.
struct ForcingSpec {
    enum class Support { Finite, Geometric };

    double amplitude0 = 1.0;
    double decay_rate = 0.5;
    Support support = Support::Geometric;
    int support_width = 0;  // finite support: modes on |i| <= support_width
    /// Indexed by |i|; the last entry repeats for larger |i|. A single entry means constant.
    std::vector<double> frequencies{1.0};
    std::vector<double> phases{0.0};
};

/// Throws ErrorKind::UnsupportedForcing for decay_rate outside [0, 1) or empty rules.
[[nodiscard]] QuasiPeriodicForcing make_forcing(const ForcingSpec& spec);

}  // namespace lattice
