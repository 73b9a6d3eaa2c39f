#include "lattice/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "lattice/error.hpp"

namespace lattice {

namespace {

int max_explicit_index(const std::map<int, Mode>& modes) {
    int w = 0;
    for (const auto& [i, m] : modes) w = std::max(w, std::abs(i));
    return w;
}

double rule_value(const std::vector<double>& rule, int abs_index) {
    const auto k = static_cast<std::size_t>(abs_index);
    return k < rule.size() ? rule[k] : rule.back();
}

}  // namespace

double GeometricTail::amplitude(int i) const noexcept {
    return amplitude0 * std::pow(ratio, std::abs(i));
}

double GeometricTail::square_sum_from(int k) const noexcept {
    const int m = std::max({k, start, 0});
    const double q = ratio * ratio;
    const double a2 = amplitude0 * amplitude0;
    // indices +-m, +-(m+1), ... ; index 0 counted once
    const double both_sides = 2.0 * a2 * std::pow(q, m == 0 ? 1 : m) / (1.0 - q);
    return m == 0 ? a2 + both_sides : both_sides;
}

QuasiPeriodicForcing::QuasiPeriodicForcing(std::map<int, Mode> modes, std::optional<GeometricTail> tail,
                                           double time_offset)
    : modes_(std::move(modes)), tail_(tail), offset_(time_offset) {
    std::erase_if(modes_, [](const auto& kv) { return kv.second.amplitude == 0.0; });
    for (const auto& [i, m] : modes_) {
        if (!std::isfinite(m.amplitude) || !std::isfinite(m.frequency) || !std::isfinite(m.phase)) {
            fail(ErrorKind::UnsupportedForcing, "non-finite mode at index " + std::to_string(i));
        }
    }
    if (tail_) {
        if (!(tail_->ratio >= 0.0 && tail_->ratio < 1.0)) {
            fail(ErrorKind::UnsupportedForcing, "geometric tail needs decay ratio in [0, 1)");
        }
        if (tail_->start < 0) {
            fail(ErrorKind::UnsupportedForcing, "geometric tail start must be >= 0");
        }
        for (const auto& [i, m] : modes_) {
            if (std::abs(i) >= tail_->start) {
                fail(ErrorKind::UnsupportedForcing,
                     "explicit mode at index " + std::to_string(i) + " overlaps the geometric tail");
            }
        }
        if (tail_->amplitude0 == 0.0) tail_.reset();
    }
}

QuasiPeriodicForcing QuasiPeriodicForcing::geometric(double amplitude0, double ratio, double frequency,
                                                     double phase) {
    return QuasiPeriodicForcing({}, GeometricTail{amplitude0, ratio, frequency, phase, 0});
}

QuasiPeriodicForcing QuasiPeriodicForcing::finite_geometric(double amplitude0, double ratio, int half_width,
                                                            double frequency, double phase) {
    const GeometricTail shape{amplitude0, ratio, frequency, phase, 0};
    std::map<int, Mode> modes;
    for (int i = -half_width; i <= half_width; ++i) {
        modes[i] = Mode{shape.amplitude(i), frequency, phase};
    }
    return QuasiPeriodicForcing(std::move(modes));
}

Mode QuasiPeriodicForcing::mode(int i) const {
    if (auto it = modes_.find(i); it != modes_.end()) return it->second;
    if (tail_ && std::abs(i) >= tail_->start) {
        return Mode{tail_->amplitude(i), tail_->frequency, tail_->phase};
    }
    return Mode{};
}

double QuasiPeriodicForcing::component(int i, double t) const {
    const Mode m = mode(i);
    if (m.amplitude == 0.0) return 0.0;
    return m.amplitude * std::sin(m.frequency * (t + offset_) + m.phase);
}

PaddedState QuasiPeriodicForcing::eval(double t, int window) const {
    PaddedState out(window);
    eval_into(t, out.values());
    return out;
}

void QuasiPeriodicForcing::eval_into(double t, std::span<double> out) const {
    if (out.size() % 2 == 0) {
        fail(ErrorKind::Dimension, "forcing evaluation needs an odd-length buffer");
    }
    const int w = static_cast<int>(out.size() / 2);
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& [i, m] : modes_) {
        if (std::abs(i) > w) continue;
        out[static_cast<std::size_t>(i + w)] = m.amplitude * std::sin(m.frequency * (t + offset_) + m.phase);
    }
    if (tail_ && tail_->start <= w) {
        const double s = std::sin(tail_->frequency * (t + offset_) + tail_->phase);
        for (int i = tail_->start; i <= w; ++i) {
            const double a = tail_->amplitude(i);
            out[static_cast<std::size_t>(w + i)] = a * s;
            out[static_cast<std::size_t>(w - i)] = a * s;
        }
    }
}

QuasiPeriodicForcing QuasiPeriodicForcing::shifted(double h) const {
    QuasiPeriodicForcing out = *this;
    out.offset_ = offset_ + h;
    return out;
}

std::optional<int> QuasiPeriodicForcing::support_half_width() const {
    if (tail_) return std::nullopt;
    return max_explicit_index(modes_);
}

bool QuasiPeriodicForcing::is_zero() const { return modes_.empty() && !tail_; }

double QuasiPeriodicForcing::square_sum() const { return amplitude_tail(0); }

double QuasiPeriodicForcing::amplitude_tail(int k) const {
    double s = 0.0;
    for (const auto& [i, m] : modes_) {
        if (std::abs(i) >= k) s += m.amplitude * m.amplitude;
    }
    if (tail_) s += tail_->square_sum_from(k);
    return s;
}

double QuasiPeriodicForcing::frequency_weighted_sum() const {
    double s = 0.0;
    for (const auto& [i, m] : modes_) s += m.amplitude * m.amplitude * m.frequency * m.frequency;
    if (tail_) s += tail_->square_sum_from(0) * tail_->frequency * tail_->frequency;
    return s;
}

double tail(const QuasiPeriodicForcing& f, int n, double t) {
    double s = 0.0;
    for (const auto& [i, m] : f.explicit_modes()) {
        if (std::abs(i) <= n) continue;
        const double v = f.component(i, t);
        s += v * v;
    }
    if (const auto& g = f.tail()) {
        const double sn = std::sin(g->frequency * (t + f.time_offset()) + g->phase);
        s += g->square_sum_from(n + 1) * sn * sn;
    }
    return s;
}

double difference_norm_sq(const QuasiPeriodicForcing& f, const QuasiPeriodicForcing& g, double t) {
    constexpr double kNegligible = 1e-34;
    constexpr int kMaxWindow = 1 << 16;
    int w = std::max(max_explicit_index(f.explicit_modes()), max_explicit_index(g.explicit_modes()));
    for (const auto* x : {&f, &g}) {
        if (const auto& tl = x->tail()) {
            w = std::max(w, tl->start);
            while (w < kMaxWindow && tl->square_sum_from(w + 1) > kNegligible) ++w;
        }
    }
    double s = 0.0;
    for (int i = -w; i <= w; ++i) {
        const double d = f.component(i, t) - g.component(i, t);
        s += d * d;
    }
    return s;
}

double bebutov_distance(const QuasiPeriodicForcing& f, const QuasiPeriodicForcing& g, double L_max, double dt) {
    if (!(L_max > 0.0) || !(dt > 0.0)) {
        fail(ErrorKind::Parameter, "bebutov_distance needs L_max > 0 and dt > 0");
    }
    const auto steps = static_cast<long>(std::floor(L_max / dt));
    double running_max = std::sqrt(difference_norm_sq(f, g, 0.0));
    double best = 0.0;
    for (long k = 1; k <= steps; ++k) {
        const double L = static_cast<double>(k) * dt;
        running_max = std::max({running_max, std::sqrt(difference_norm_sq(f, g, L)),
                                std::sqrt(difference_norm_sq(f, g, -L))});
        best = std::max(best, std::min(running_max, 1.0 / L));
    }
    return best;
}

double uniform_bound(const QuasiPeriodicForcing& f) { return std::sqrt(f.square_sum()); }

double equicontinuity_modulus(const QuasiPeriodicForcing& f, double eps) {
    if (!(eps > 0.0)) {
        fail(ErrorKind::Parameter, "equicontinuity_modulus needs eps > 0");
    }
    const double weighted = f.frequency_weighted_sum();
    if (!std::isfinite(weighted)) {
        fail(ErrorKind::UnsupportedForcing, "frequency-weighted amplitude sum diverges");
    }
    if (weighted == 0.0) return std::numeric_limits<double>::infinity();
    return eps / std::sqrt(weighted);
}

QuasiPeriodicForcing make_forcing(const ForcingSpec& spec) {
    if (spec.frequencies.empty() || spec.phases.empty()) {
        fail(ErrorKind::UnsupportedForcing, "frequency and phase rules must be nonempty");
    }
    if (!std::isfinite(spec.amplitude0) || !(spec.decay_rate >= 0.0)) {
        fail(ErrorKind::UnsupportedForcing, "amplitude0 must be finite and decay_rate >= 0");
    }
    const GeometricTail shape{spec.amplitude0, spec.decay_rate, 0.0, 0.0, 0};
    std::map<int, Mode> modes;
    if (spec.support == ForcingSpec::Support::Finite) {
        if (spec.support_width < 0) {
            fail(ErrorKind::UnsupportedForcing, "support_width must be >= 0");
        }
        for (int i = -spec.support_width; i <= spec.support_width; ++i) {
            modes[i] = Mode{shape.amplitude(i), rule_value(spec.frequencies, std::abs(i)),
                            rule_value(spec.phases, std::abs(i))};
        }
        return QuasiPeriodicForcing(std::move(modes));
    }
    if (spec.decay_rate >= 1.0) {
        fail(ErrorKind::UnsupportedForcing, "geometric support needs decay_rate < 1 for square summability");
    }
    const std::size_t rule_len = std::max(spec.frequencies.size(), spec.phases.size());
    const int head = rule_len > 1 ? static_cast<int>(rule_len) : 0;
    for (int i = -head + 1; i < head; ++i) {
        modes[i] = Mode{shape.amplitude(i), rule_value(spec.frequencies, std::abs(i)),
                        rule_value(spec.phases, std::abs(i))};
    }
    const GeometricTail tl{spec.amplitude0, spec.decay_rate, spec.frequencies.back(), spec.phases.back(), head};
    return QuasiPeriodicForcing(std::move(modes), tl);
}

}  // namespace lattice
