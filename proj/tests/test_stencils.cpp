#include <doctest.h>

#include "zadi/rng.hpp"
#include "zadi/stencils.hpp"

using namespace zadi;

namespace {

Field random_field(const Grid2D& g, std::uint64_t seed) {
    Rng rng(seed);
    Field f(g);
    for (int i = 0; i < g.n_x; ++i)
        for (int j = 0; j < g.n_y; ++j) f(i, j) = rng.normal();
    return f;
}

Grid2D grid9() { return Grid2D::from_counts(0.0, 1.0, 0.0, 1.0, 9, 9); }

}  // namespace

TEST_CASE("constant field has zero first differences away from the boundary") {
    const Grid2D g = grid9();
    Field f(g);
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) f(i, j) = 3.5;
    const Field dx = apply_dx(f);
    const Field dy = apply_dy(f);
    for (int i = 1; i < 8; ++i)
        for (int j = 1; j < 8; ++j) {
            CHECK(dx(i, j) == 0.0);
            CHECK(dy(i, j) == 0.0);
        }
}

TEST_CASE("spike maps to the transposed stencil") {
    const Grid2D g = grid9();
    Field f(g);
    f(4, 4) = 1.0;
    const Field dxx = apply_dxx(f);
    CHECK(dxx(3, 4) == 1.0);
    CHECK(dxx(4, 4) == -2.0);
    CHECK(dxx(5, 4) == 1.0);
    CHECK(dxx(4, 3) == 0.0);

    const Field dx2 = apply_dx2(f);
    CHECK(dx2(2, 4) == 1.0);
    CHECK(dx2(4, 4) == -2.0);
    CHECK(dx2(6, 4) == 1.0);
    CHECK(dx2(3, 4) == 0.0);
}

TEST_CASE("cross stencil on f(i,j) = i*j") {
    const Grid2D g = Grid2D::from_counts(0.0, 1.0, 0.0, 1.0, 5, 5);
    Field f(g);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) f(i, j) = static_cast<double>(i * j);
    const Field dxy = apply_dxy(f);
    CHECK(dxy(2, 2) == 4.0);  // (i+1)(j+1)-(i-1)(j+1)-(i+1)(j-1)+(i-1)(j-1)
}

TEST_CASE("linearity") {
    const Grid2D g = grid9();
    const Field f = random_field(g, 1), h = random_field(g, 2);
    const double a = 1.75, b = -0.4;
    Field combo(g);
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) combo(i, j) = a * f(i, j) + b * h(i, j);

    using StencilFn = Field (*)(const Field&);
    for (StencilFn op : {static_cast<StencilFn>(apply_dx), apply_dy, apply_dxx, apply_dyy,
                         apply_dxy, apply_dx2, apply_dy2}) {
        const Field lhs = op(combo);
        const Field rf = op(f), rh = op(h);
        for (int i = 0; i < 9; ++i)
            for (int j = 0; j < 9; ++j)
                CHECK(lhs(i, j) ==
                      doctest::Approx(a * rf(i, j) + b * rh(i, j)).epsilon(1e-13));
    }
}

TEST_CASE("wide stencil equals the composition away from the boundary") {
    const Grid2D g = grid9();
    const Field f = random_field(g, 3);
    const Field wide = apply_dx2(f);
    const Field comp = apply_dx(apply_dx(f));
    for (int i = 2; i < 7; ++i)
        for (int j = 0; j < 9; ++j) CHECK(wide(i, j) == comp(i, j));
    const Field wide_y = apply_dy2(f);
    const Field comp_y = apply_dy(apply_dy(f));
    for (int i = 0; i < 9; ++i)
        for (int j = 2; j < 7; ++j) CHECK(wide_y(i, j) == comp_y(i, j));
}

TEST_CASE("summation by parts: Dx is anti-self-adjoint for interior support") {
    const Grid2D g = grid9();
    Field f(g), h(g);
    Rng rng(4);
    // support at distance >= 1 from the boundary so no ghost term enters
    for (int i = 1; i < 8; ++i)
        for (int j = 1; j < 8; ++j) {
            f(i, j) = rng.normal();
            h(i, j) = rng.normal();
        }
    const Field df = apply_dx(f), dh = apply_dx(h);
    double lhs = 0.0, rhs = 0.0;
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) {
            lhs += h(i, j) * df(i, j);
            rhs += dh(i, j) * f(i, j);
        }
    CHECK(lhs == doctest::Approx(-rhs).epsilon(1e-12));
}
