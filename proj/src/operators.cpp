#include "lattice/operators.hpp"

#include <cmath>
#include <string>

#include "lattice/error.hpp"

namespace lattice::operators {

namespace {

void require_dim(std::span<const double> v, TruncationOrder n) {
    if (v.size() != n.dim()) {
        fail(ErrorKind::Dimension, "expected state of length " + std::to_string(n.dim()) + ", got " +
                                       std::to_string(v.size()));
    }
}

template <typename Apply>
IntMatrix materialize(TruncationOrder n, Apply apply) {
    const std::size_t d = n.dim();
    IntMatrix m(d, d);
    State e(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        e[j] = 1.0;
        const State col = apply(e, n);
        for (std::size_t i = 0; i < d; ++i) m(i, j) = std::llround(col[i]);
        e[j] = 0.0;
    }
    return m;
}

}  // namespace

void apply_laplacian(std::span<const double> v, std::span<double> out) {
    const std::size_t d = v.size();
    if (out.size() != d || d < 3 || d % 2 == 0) {
        fail(ErrorKind::Dimension, "laplacian needs matching odd lengths >= 3");
    }
    out[0] = 2.0 * v[0] - v[d - 1] - v[1];
    for (std::size_t i = 1; i + 1 < d; ++i) {
        out[i] = 2.0 * v[i] - v[i - 1] - v[i + 1];
    }
    out[d - 1] = 2.0 * v[d - 1] - v[d - 2] - v[0];
}

State apply_laplacian(std::span<const double> v, TruncationOrder n) {
    require_dim(v, n);
    State out(v.size());
    apply_laplacian(v, out);
    return out;
}

State apply_difference(std::span<const double> v, TruncationOrder n) {
    require_dim(v, n);
    const std::size_t d = v.size();
    State out(d);
    for (std::size_t i = 0; i + 1 < d; ++i) out[i] = v[i + 1] - v[i];
    out[d - 1] = v[0] - v[d - 1];
    return out;
}

State apply_difference_transpose(std::span<const double> v, TruncationOrder n) {
    require_dim(v, n);
    const std::size_t d = v.size();
    State out(d);
    out[0] = v[d - 1] - v[0];
    for (std::size_t i = 1; i < d; ++i) out[i] = v[i - 1] - v[i];
    return out;
}

IntMatrix materialize_laplacian(TruncationOrder n) {
    return materialize(n, [](const State& e, TruncationOrder m) { return apply_laplacian(e, m); });
}

IntMatrix materialize_difference(TruncationOrder n) {
    return materialize(n, [](const State& e, TruncationOrder m) { return apply_difference(e, m); });
}

PaddedState embed(std::span<const double> v, TruncationOrder n, int work_width) {
    require_dim(v, n);
    if (work_width < n.value()) {
        fail(ErrorKind::Capacity, "working width " + std::to_string(work_width) + " < truncation order " +
                                      std::to_string(n.value()));
    }
    PaddedState out(work_width);
    for (int i = -n.value(); i <= n.value(); ++i) out[i] = v[n.slot(i)];
    return out;
}

State restrict_to(const PaddedState& u, TruncationOrder n) {
    if (u.half_width() < n.value()) {
        fail(ErrorKind::Capacity, "padded state narrower than truncation order");
    }
    State out(n.dim());
    for (int i = -n.value(); i <= n.value(); ++i) out[n.slot(i)] = u[i];
    return out;
}

QuasiPeriodicForcing project_forcing(const QuasiPeriodicForcing& f, TruncationOrder n) {
    std::map<int, Mode> modes;
    for (int i = -n.value(); i <= n.value(); ++i) modes[i] = f.mode(i);
    return QuasiPeriodicForcing(std::move(modes), std::nullopt, f.time_offset());
}

QuasiPeriodicForcing wrap_forcing(const QuasiPeriodicForcing& f, TruncationOrder n) {
    const int m = n.value();
    std::map<int, Mode> modes;
    for (int i = -m + 1; i <= m - 1; ++i) modes[i] = f.mode(i);
    modes[m] = f.mode(-m - 1);
    modes[-m] = f.mode(m + 1);
    return QuasiPeriodicForcing(std::move(modes), std::nullopt, f.time_offset());
}

}  // namespace lattice::operators
