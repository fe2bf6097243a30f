#include <doctest.h>

#include <cmath>
#include <vector>

#include "zadi/rng.hpp"
#include "zadi/solvers.hpp"
#include "zadi/stencils.hpp"

using namespace zadi;

namespace {

// dense Gaussian elimination with partial pivoting; the test-side oracle
std::vector<double> dense_solve(std::vector<std::vector<double>> a,
                                std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (int r = c + 1; r < n; ++r) {
            const double m = a[r][c] / a[c][c];
            for (int q = c; q < n; ++q) a[r][q] -= m * a[c][q];
            b[r] -= m * b[c];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int q = r + 1; q < n; ++q) s -= a[r][q] * x[q];
        x[r] = s / a[r][r];
    }
    return x;
}

std::vector<std::vector<double>> tridiag_dense(const Tridiag& m) {
    const int n = m.n();
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        a[i][i] = m.diag[i];
        if (i > 0) a[i][i - 1] = m.lower[i];
        if (i + 1 < n) a[i][i + 1] = m.upper[i];
    }
    return a;
}

}  // namespace

TEST_CASE("thomas_solve basic cases") {
    SUBCASE("identity") {
        const Tridiag m({0, 0, 0}, {1, 1, 1}, {0, 0, 0});
        const std::vector<double> rhs{3.0, -1.0, 0.5};
        const auto x = thomas_solve(m, rhs);
        for (int i = 0; i < 3; ++i) CHECK(x[i] == rhs[i]);
    }
    SUBCASE("2x2 by hand") {
        const Tridiag m({0, 1}, {2, 2}, {1, 0});
        const auto x = thomas_solve(m, std::vector<double>{3.0, 3.0});
        CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("residual on a random dominant system") {
        const int n = 64;
        Rng rng(21);
        std::vector<double> lo(n), di(n), up(n), rhs(n);
        for (int i = 0; i < n; ++i) {
            lo[i] = rng.normal();
            up[i] = rng.normal();
            di[i] = 4.0 + std::abs(rng.normal());
            rhs[i] = rng.normal();
        }
        lo[0] = up[n - 1] = 0.0;
        const Tridiag m(lo, di, up);
        CHECK(m.diagonally_dominant);
        const auto x = thomas_solve(m, rhs);
        double worst = 0.0, rmax = 0.0;
        for (int i = 0; i < n; ++i) {
            double r = m.diag[i] * x[i] - rhs[i];
            if (i > 0) r += m.lower[i] * x[i - 1];
            if (i + 1 < n) r += m.upper[i] * x[i + 1];
            worst = std::max(worst, std::abs(r));
            rmax = std::max(rmax, std::abs(rhs[i]));
        }
        CHECK(worst < 1e-12 * (1.0 + rmax));
    }
    SUBCASE("matches the dense oracle on moderate systems") {
        for (int n : {8, 32, 128}) {
            Rng rng(1000 + n);
            std::vector<double> lo(n), di(n), up(n), rhs(n);
            for (int i = 0; i < n; ++i) {
                lo[i] = rng.normal();
                up[i] = rng.normal();
                di[i] = 3.5 + std::abs(rng.normal());
                rhs[i] = rng.normal();
            }
            lo[0] = up[n - 1] = 0.0;
            const Tridiag m(lo, di, up);
            const auto x = thomas_solve(m, rhs);
            const auto xd = dense_solve(tridiag_dense(m), rhs);
            for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(xd[i]).epsilon(1e-9));
        }
    }
    SUBCASE("near-zero pivot names the row") {
        // elimination makes row 1 pivot exactly zero: 1 - 1*1 = 0
        const Tridiag m({0, 1, 0}, {1, 1, 1}, {1, 0, 0});
        try {
            (void)thomas_solve(m, std::vector<double>{1.0, 1.0, 1.0});
            FAIL("expected TridiagSingularError");
        } catch (const TridiagSingularError& e) {
            CHECK(e.row == 1);
        }
    }
}

TEST_CASE("factored solve equals the plain sweep") {
    const int n = 40;
    Rng rng(6);
    std::vector<double> lo(n), di(n), up(n), rhs(n);
    for (int i = 0; i < n; ++i) {
        lo[i] = 0.3 * rng.normal();
        up[i] = 0.3 * rng.normal();
        di[i] = 2.0 + std::abs(rng.normal());
        rhs[i] = rng.normal();
    }
    lo[0] = up[n - 1] = 0.0;
    const Tridiag m(lo, di, up);
    const TridiagFactor f(m);
    auto x = rhs;
    f.solve_inplace(x.data());
    const auto ref = thomas_solve(m, rhs);
    for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(ref[i]).epsilon(1e-13));
}

TEST_CASE("ADI factor dominance for scheme-scale parameters") {
    for (double k : {0.25, 0.015625, 0.0009765625})
        for (double h : {1.0, 0.125, 0.03125})
            for (double mu : {0.0, 0.0809, 0.5}) {
                const double adv = mu * k / (2.0 * h), dif = k / (2.0 * h * h);
                const int n = 16;
                std::vector<double> lo(n, -adv - dif), di(n, 1.0 + 2.0 * dif),
                    up(n, adv - dif);
                lo[0] = up[n - 1] = 0.0;
                CHECK(Tridiag(lo, di, up).diagonally_dominant);
            }
}

TEST_CASE("solve_unfactored") {
    const Grid2D g = Grid2D::from_counts(0.0, 1.0, 0.0, 1.0, 8, 8);

    SUBCASE("identity operator returns the rhs") {
        Rng rng(3);
        Field rhs(g);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) rhs(i, j) = rng.normal();
        FieldOp op = [](const Field& v) { return v; };
        const Field x = solve_unfactored(op, rhs, 1e-12, 100);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j)
                CHECK(x(i, j) == doctest::Approx(rhs(i, j)).epsilon(1e-14));
    }

    SUBCASE("diffusion operator matches the dense oracle") {
        const double k = 0.01;
        const double cx = k / (2.0 * g.h_x * g.h_x), cy = k / (2.0 * g.h_y * g.h_y);
        FieldOp op = [&](const Field& v) {
            Field out(g);
            const Field dxx = apply_dxx(v), dyy = apply_dyy(v);
            for (int i = 0; i < 8; ++i)
                for (int j = 0; j < 8; ++j)
                    out(i, j) = v(i, j) - cx * dxx(i, j) - cy * dyy(i, j);
            return out;
        };
        Rng rng(8);
        Field rhs(g);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) rhs(i, j) = rng.normal();

        const Field x = solve_unfactored(op, rhs, 1e-12, 1000);

        // dense assembly of the same operator
        const int n = 64;
        std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
        std::vector<double> b(n);
        auto id = [&](int i, int j) { return i * 8 + j; };
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) {
                const int r = id(i, j);
                a[r][r] = 1.0 + 2.0 * cx + 2.0 * cy;
                if (i > 0) a[r][id(i - 1, j)] = -cx;
                if (i < 7) a[r][id(i + 1, j)] = -cx;
                if (j > 0) a[r][id(i, j - 1)] = -cy;
                if (j < 7) a[r][id(i, j + 1)] = -cy;
                b[r] = rhs(i, j);
            }
        const auto xd = dense_solve(a, b);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j)
                CHECK(x(i, j) == doctest::Approx(xd[id(i, j)]).epsilon(1e-9));
    }

    SUBCASE("residual log is monotone for a symmetric operator") {
        FieldOp op = [&](const Field& v) {
            Field out(g);
            const Field dxx = apply_dxx(v), dyy = apply_dyy(v);
            for (int i = 0; i < 8; ++i)
                for (int j = 0; j < 8; ++j)
                    out(i, j) = v(i, j) - 0.1 * (dxx(i, j) + dyy(i, j));
            return out;
        };
        Field rhs(g);
        rhs(4, 4) = 1.0;
        std::vector<double> log;
        (void)solve_unfactored(op, rhs, 1e-12, 500, nullptr, nullptr, &log);
        REQUIRE(log.size() > 2);
        for (std::size_t i = 1; i < log.size(); ++i)
            CHECK(log[i] <= log[i - 1] * (1.0 + 1e-12));
    }

    SUBCASE("iteration failure carries the last residual") {
        FieldOp op = [&](const Field& v) {
            Field out(g);
            const Field dxx = apply_dxx(v);
            for (int i = 0; i < 8; ++i)
                for (int j = 0; j < 8; ++j) out(i, j) = v(i, j) - 0.5 * dxx(i, j);
            return out;
        };
        Field rhs(g);
        rhs(4, 4) = 1.0;
        try {
            (void)solve_unfactored(op, rhs, 1e-30, 1);
            FAIL("expected IterationFailure");
        } catch (const IterationFailure& e) {
            CHECK(e.last_residual > 0.0);
            CHECK(e.iterations >= 1);
        }
    }
}
