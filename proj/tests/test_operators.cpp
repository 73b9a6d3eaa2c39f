#include <doctest.h>

#include <cmath>
#include <random>

#include "lattice/error.hpp"
#include "lattice/operators.hpp"

using namespace lattice;
using namespace lattice::operators;

namespace {

// Independent oracle: integer product of explicit matrices.
IntMatrix product_transpose_left(const IntMatrix& b) {
    IntMatrix c(b.cols, b.cols);
    for (std::size_t i = 0; i < b.cols; ++i)
        for (std::size_t j = 0; j < b.cols; ++j)
            for (std::size_t k = 0; k < b.rows; ++k) c(i, j) += b(k, i) * b(k, j);
    return c;
}

State random_state(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> g;
    State v(dim);
    for (auto& x : v) x = g(rng);
    return v;
}

}  // namespace

TEST_CASE("laplacian of a unit vector matches the first matrix row") {
    const State v{1.0, 0.0, 0.0};
    CHECK(apply_laplacian(v, TruncationOrder(1)) == State{2.0, -1.0, -1.0});
}

TEST_CASE("laplacian annihilates constants") {
    for (int n : {1, 2, 7, 30}) {
        const TruncationOrder order(n);
        const State ones(order.dim(), 1.0);
        for (double x : apply_laplacian(ones, order)) CHECK(x == 0.0);
    }
}

TEST_CASE("materialized A_1 equals B_1^T B_1") {
    const TruncationOrder n(1);
    const IntMatrix B = materialize_difference(n);
    IntMatrix expected_B(3, 3);
    expected_B.data = {-1, 1, 0, 0, -1, 1, 1, 0, -1};
    CHECK(B == expected_B);
    IntMatrix expected_A(3, 3);
    expected_A.data = {2, -1, -1, -1, 2, -1, -1, -1, 2};
    CHECK(materialize_laplacian(n) == expected_A);
    CHECK(product_transpose_left(B) == expected_A);
}

TEST_CASE("A_n = B_n^T B_n exactly, symmetric, rows sum to zero, for n <= 64") {
    for (int n = 1; n <= 64; ++n) {
        const TruncationOrder order(n);
        const IntMatrix A = materialize_laplacian(order);
        const IntMatrix B = materialize_difference(order);
        REQUIRE(A == product_transpose_left(B));
        bool symmetric = true;
        bool zero_rows = true;
        bool b_symmetric = true;
        for (std::size_t i = 0; i < A.rows; ++i) {
            std::int64_t s = 0;
            for (std::size_t j = 0; j < A.cols; ++j) {
                s += A(i, j);
                symmetric = symmetric && A(i, j) == A(j, i);
                b_symmetric = b_symmetric && B(i, j) == B(j, i);
            }
            zero_rows = zero_rows && s == 0;
        }
        CHECK(symmetric);
        CHECK(zero_rows);
        CHECK_FALSE(b_symmetric);
    }
}

TEST_CASE("difference operator") {
    CHECK(apply_difference(State{1.0, 0.0, 0.0}, TruncationOrder(1)) == State{-1.0, 0.0, 1.0});
    for (double x : apply_difference(State(9, 3.5), TruncationOrder(4))) CHECK(x == 0.0);

    std::mt19937_64 rng(7);
    const TruncationOrder n(3);
    for (int trial = 0; trial < 50; ++trial) {
        const State v = random_state(rng, n.dim());
        const double lhs = dot(apply_laplacian(v, n), v);
        const double rhs = norm_sq(apply_difference(v, n));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * rhs);
        // transpose really is the adjoint
        const State w = random_state(rng, n.dim());
        CHECK(dot(apply_difference(v, n), w) == doctest::Approx(dot(v, apply_difference_transpose(w, n))).epsilon(1e-12));
    }
}

TEST_CASE("laplacian is PSD, bounded by 4 and commutes with reflection") {
    std::mt19937_64 rng(11);
    for (int n : {1, 2, 5, 16, 40}) {
        const TruncationOrder order(n);
        for (int trial = 0; trial < 20; ++trial) {
            State v = random_state(rng, order.dim());
            const State Av = apply_laplacian(v, order);
            CHECK(dot(Av, v) >= 0.0);
            CHECK(norm(Av) <= 4.0 * norm(v) * (1 + 1e-14));
            // symmetrize v under i -> -i and check the image stays symmetric
            for (int i = 1; i <= n; ++i) v[order.slot(-i)] = v[order.slot(i)];
            const State As = apply_laplacian(v, order);
            for (int i = 1; i <= n; ++i) CHECK(As[order.slot(-i)] == doctest::Approx(As[order.slot(i)]).epsilon(1e-14));
        }
    }
}

TEST_CASE("dimension errors") {
    const State v(4, 0.0);
    CHECK_THROWS_AS((void)apply_laplacian(v, TruncationOrder(1)), Error);
    CHECK_THROWS_AS((void)apply_difference(v, TruncationOrder(2)), Error);
    try {
        (void)apply_laplacian(v, TruncationOrder(1));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Dimension);
    }
    CHECK_THROWS_AS(TruncationOrder(0), Error);
}

TEST_CASE("embedding") {
    const State v{1.0, 2.0, 3.0};
    const PaddedState u = embed(v, TruncationOrder(1), 3);
    CHECK(u.half_width() == 3);
    CHECK(std::vector<double>(u.values().begin(), u.values().end()) ==
          std::vector<double>{0, 0, 1, 2, 3, 0, 0});
    CHECK(restrict_to(u, TruncationOrder(1)) == v);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const TruncationOrder n(1 + trial % 6);
        const State w = random_state(rng, n.dim());
        const PaddedState e = embed(w, n, n.value() + trial);
        CHECK(e.norm_sq() == norm_sq(w));
        CHECK(restrict_to(e, n) == w);
    }

    try {
        (void)embed(v, TruncationOrder(1), 0);
        FAIL("expected capacity error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Capacity);
    }
}

TEST_CASE("projection P_n truncates the mode table") {
    const auto f = QuasiPeriodicForcing::geometric(1.0, 0.5, 1.0);
    const auto p = project_forcing(f, TruncationOrder(1));
    CHECK(p.support_half_width() == 1);
    CHECK(p.mode(-1).amplitude == 0.5);
    CHECK(p.mode(0).amplitude == 1.0);
    CHECK(p.mode(1).amplitude == 0.5);
    CHECK(p.mode(2).amplitude == 0.0);
    CHECK(uniform_bound(p) <= uniform_bound(f));
}

TEST_CASE("sup over |t| <= L of ||P_n f - f||^2 equals the sup tail") {
    const auto f = QuasiPeriodicForcing::geometric(1.0, 0.5, 1.0);
    const TruncationOrder n(2);
    const auto p = project_forcing(f, n);
    const double expected = 8.0 / 3.0 * std::pow(4.0, -3);  // attained at the phase peak t = pi/2
    double sup = 0.0;
    for (double t = -10.0; t <= 10.0; t += 1e-3) sup = std::max(sup, difference_norm_sq(p, f, t));
    sup = std::max(sup, difference_norm_sq(p, f, M_PI / 2));
    CHECK(sup == doctest::Approx(expected).epsilon(1e-12));
    CHECK(difference_norm_sq(p, f, M_PI / 2) == doctest::Approx(tail(f, 2, M_PI / 2)).epsilon(1e-12));
}

TEST_CASE("wrap H_n relocates the boundary modes") {
    std::map<int, Mode> modes;
    for (int i = -4; i <= 4; ++i) modes[i] = Mode{1.0 + 0.1 * i, 1.0 + 0.01 * i, 0.2 * i};
    const QuasiPeriodicForcing f(modes);

    const auto h2 = wrap_forcing(f, TruncationOrder(2));
    for (int i : {-1, 0, 1}) CHECK(h2.mode(i) == f.mode(i));
    CHECK(h2.mode(2) == f.mode(-3));
    CHECK(h2.mode(-2) == f.mode(3));
    CHECK(h2.support_half_width() == 2);

    // support strictly inside: wrap pulls zeros, same as projection
    const auto narrow = QuasiPeriodicForcing::finite_geometric(1.0, 0.5, 1, 2.0, 0.3);
    const TruncationOrder three(3);
    CHECK(wrap_forcing(narrow, three) == project_forcing(narrow, three));
}

TEST_CASE("P_n and H_n commute with time shifts") {
    const auto f = make_forcing(ForcingSpec{1.3, 0.6, ForcingSpec::Support::Geometric, 0,
                                            {1.0, 1.7, 0.4, 2.2}, {0.0, 0.5, -1.0}});
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    std::uniform_int_distribution<int> order(1, 20);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const TruncationOrder n(order(rng));
        const double h = u(rng);
        const double t = u(rng);
        const auto ph = project_forcing(f.shifted(h), n);
        const auto hp = project_forcing(f, n).shifted(h);
        const auto wh = wrap_forcing(f.shifted(h), n);
        const auto hw = wrap_forcing(f, n).shifted(h);
        for (int i = -n.value(); i <= n.value(); ++i) {
            worst = std::max(worst, std::abs(ph.component(i, t) - hp.component(i, t)));
            worst = std::max(worst, std::abs(wh.component(i, t) - hw.component(i, t)));
        }
    }
    CHECK(worst < 1e-12);
}
