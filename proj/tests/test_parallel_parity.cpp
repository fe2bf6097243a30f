#include <doctest.h>

#include "zadi/rng.hpp"
#include "zadi/solvers.hpp"
#include "zadi/stencils.hpp"

using namespace zadi;

// The OpenMP kernels partition work over nodes and independent lines only, so
// they must agree bitwise with the serial reference at any thread count.

namespace {

Field random_field(const Grid2D& g, std::uint64_t seed) {
    Rng rng(seed);
    Field f(g);
    for (int i = 0; i < g.n_x; ++i)
        for (int j = 0; j < g.n_y; ++j) f(i, j) = rng.normal();
    return f;
}

bool bitwise_equal(const Field& a, const Field& b) {
    for (std::size_t q = 0; q < a.size(); ++q)
        if (a.data()[q] != b.data()[q]) return false;
    return true;
}

}  // namespace

TEST_CASE("stencil kernels match the serial reference bitwise") {
    set_threads(4);
    const Grid2D g = Grid2D::from_counts(-8.0, 12.0, -8.0, 12.0, 127, 93);
    const Field f = random_field(g, 77);

    CHECK(bitwise_equal(apply_dx(f), ref::apply_dx(f)));
    CHECK(bitwise_equal(apply_dy(f), ref::apply_dy(f)));
    CHECK(bitwise_equal(apply_dxx(f), ref::apply_dxx(f)));
    CHECK(bitwise_equal(apply_dyy(f), ref::apply_dyy(f)));
    CHECK(bitwise_equal(apply_dxy(f), ref::apply_dxy(f)));
    CHECK(bitwise_equal(apply_dx2(f), ref::apply_dx2(f)));
    CHECK(bitwise_equal(apply_dy2(f), ref::apply_dy2(f)));
    set_threads(0);
}

TEST_CASE("tridiagonal sweeps match the serial reference bitwise") {
    set_threads(4);
    const Grid2D g = Grid2D::from_counts(-8.0, 12.0, -8.0, 12.0, 64, 48);

    {
        const int n = g.n_x;
        std::vector<double> lo(n, -0.4), di(n, 2.2), up(n, -0.35);
        lo[0] = up[n - 1] = 0.0;
        const TridiagFactor fac{Tridiag(lo, di, up)};
        Field a = random_field(g, 5), b = a;
        solve_rows_x(fac, a);
        ref::solve_rows_x(fac, b);
        CHECK(bitwise_equal(a, b));
    }
    {
        const int n = g.n_y;
        std::vector<double> lo(n, -0.4), di(n, 2.2), up(n, -0.35);
        lo[0] = up[n - 1] = 0.0;
        const TridiagFactor fac{Tridiag(lo, di, up)};
        Field a = random_field(g, 6), b = a;
        solve_cols_y(fac, a);
        ref::solve_cols_y(fac, b);
        CHECK(bitwise_equal(a, b));
    }
    set_threads(0);
}
