#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lattice {

/// Dense state of the (2n+1)-dimensional system, storage index i+n holds logical index i.
using State = std::vector<double>;

/// Half-width n of a periodic truncation; the system dimension is 2n+1.
class TruncationOrder {
public:
    /// Throws ErrorKind::Parameter for n < 1.
    explicit TruncationOrder(int n);

    [[nodiscard]] int value() const noexcept { return n_; }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(2 * n_ + 1); }

    /// Storage slot of logical index i in [-n, n].
    [[nodiscard]] std::size_t slot(int i) const noexcept { return static_cast<std::size_t>(i + n_); }

    /// Logical index reduced into [-n, n] modulo 2n+1.
    [[nodiscard]] int wrap(int i) const noexcept;

    friend bool operator==(TruncationOrder, TruncationOrder) = default;

private:
    int n_;
};

/// Center-aligned two-sided array with logical indices -N..N, the image of the
/// zero-padding embedding of R^{2n+1} into l2.
class PaddedState {
public:
    PaddedState() = default;
    explicit PaddedState(int half_width);
    PaddedState(int half_width, std::vector<double> values);

    [[nodiscard]] int half_width() const noexcept { return half_width_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

    [[nodiscard]] double operator[](int i) const { return values_[slot(i)]; }
    [[nodiscard]] double& operator[](int i) { return values_[slot(i)]; }

    /// Entry at logical index i, or 0 outside the stored range.
    [[nodiscard]] double at_or_zero(int i) const noexcept;

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<double> values() noexcept { return values_; }

    [[nodiscard]] double norm_sq() const noexcept;
    [[nodiscard]] double norm() const noexcept;
    [[nodiscard]] bool is_finite() const noexcept;

    /// Same sequence stored at a larger width. Throws ErrorKind::Capacity when shrinking
    /// would drop a nonzero entry.
    [[nodiscard]] PaddedState repad(int half_width) const;

    friend bool operator==(const PaddedState&, const PaddedState&) = default;

private:
    [[nodiscard]] std::size_t slot(int i) const noexcept { return static_cast<std::size_t>(i + half_width_); }

    int half_width_ = 0;
    std::vector<double> values_ = std::vector<double>(1, 0.0);
};

[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b);
[[nodiscard]] double norm_sq(std::span<const double> v);
[[nodiscard]] double norm(std::span<const double> v);

/// l2 distance of two padded sequences of possibly different widths.
[[nodiscard]] double distance(const PaddedState& a, const PaddedState& b);

}  // namespace lattice
