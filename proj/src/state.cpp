#include "lattice/state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lattice/error.hpp"

namespace lattice {

TruncationOrder::TruncationOrder(int n) : n_(n) {
    if (n < 1) {
        fail(ErrorKind::Parameter, "truncation order must be >= 1, got " + std::to_string(n));
    }
}

int TruncationOrder::wrap(int i) const noexcept {
    const int m = 2 * n_ + 1;
    int r = (i + n_) % m;
    if (r < 0) r += m;
    return r - n_;
}

PaddedState::PaddedState(int half_width)
    : half_width_(half_width), values_(static_cast<std::size_t>(2 * half_width + 1), 0.0) {
    if (half_width < 0) {
        fail(ErrorKind::Capacity, "padded width must be >= 0");
    }
}

PaddedState::PaddedState(int half_width, std::vector<double> values)
    : half_width_(half_width), values_(std::move(values)) {
    if (half_width < 0 || values_.size() != static_cast<std::size_t>(2 * half_width + 1)) {
        fail(ErrorKind::Dimension, "padded state needs 2N+1 values for N = " + std::to_string(half_width));
    }
}

double PaddedState::at_or_zero(int i) const noexcept {
    if (i < -half_width_ || i > half_width_) return 0.0;
    return values_[slot(i)];
}

double PaddedState::norm_sq() const noexcept { return lattice::norm_sq(values_); }

double PaddedState::norm() const noexcept { return std::sqrt(norm_sq()); }

bool PaddedState::is_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

PaddedState PaddedState::repad(int half_width) const {
    PaddedState out(half_width);
    for (int i = -half_width_; i <= half_width_; ++i) {
        const double x = values_[slot(i)];
        if (i < -half_width || i > half_width) {
            if (x != 0.0) {
                fail(ErrorKind::Capacity, "repad to width " + std::to_string(half_width) +
                                              " would drop nonzero entry at index " + std::to_string(i));
            }
            continue;
        }
        out[i] = x;
    }
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        fail(ErrorKind::Dimension, "dot: length mismatch");
    }
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm_sq(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

double norm(std::span<const double> v) { return std::sqrt(norm_sq(v)); }

double distance(const PaddedState& a, const PaddedState& b) {
    const int w = std::max(a.half_width(), b.half_width());
    double s = 0.0;
    for (int i = -w; i <= w; ++i) {
        const double d = a.at_or_zero(i) - b.at_or_zero(i);
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace lattice
