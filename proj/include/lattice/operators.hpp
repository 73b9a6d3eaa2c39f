#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lattice/forcing.hpp"
#include "lattice/state.hpp"

namespace lattice::operators {

/// Dense integer matrix, row-major. Only used to materialize the stencils for checks.
struct IntMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::int64_t> data;

    IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}

    [[nodiscard]] std::int64_t operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    [[nodiscard]] std::int64_t& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }

    friend bool operator==(const IntMatrix&, const IntMatrix&) = default;
};

/// (A_n v)_i = 2 v_i - v_{i-1} - v_{i+1}, indices taken modulo 2n+1. Matrix free.
[[nodiscard]] State apply_laplacian(std::span<const double> v, TruncationOrder n);
void apply_laplacian(std::span<const double> v, std::span<double> out);

/// (B_n v)_i = v_{i+1} - v_i with the last row wrapping to v_{-n}.
[[nodiscard]] State apply_difference(std::span<const double> v, TruncationOrder n);
/// (B_n^T v)_i = v_{i-1} - v_i with the first row wrapping to v_n.
[[nodiscard]] State apply_difference_transpose(std::span<const double> v, TruncationOrder n);

/// Columns obtained by applying the matrix-free operators to unit vectors.
[[nodiscard]] IntMatrix materialize_laplacian(TruncationOrder n);
[[nodiscard]] IntMatrix materialize_difference(TruncationOrder n);

/// Zero-padding embedding of R^{2n+1} into the width-N_work window of l2.
/// Throws ErrorKind::Capacity when work_width < n.
[[nodiscard]] PaddedState embed(std::span<const double> v, TruncationOrder n, int work_width);
/// Indices -n..n of a padded state; throws ErrorKind::Capacity when the state is narrower.
[[nodiscard]] State restrict_to(const PaddedState& u, TruncationOrder n);

/// P_n: keeps the modes with |i| <= n.
[[nodiscard]] QuasiPeriodicForcing project_forcing(const QuasiPeriodicForcing& f, TruncationOrder n);

/// H_n: interior |i| <= n-1 unchanged, index n takes f_{-n-1}, index -n takes f_{n+1}.
[[nodiscard]] QuasiPeriodicForcing wrap_forcing(const QuasiPeriodicForcing& f, TruncationOrder n);

}  // namespace lattice::operators
