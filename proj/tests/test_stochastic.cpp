#include <doctest.h>

#include <cmath>

#include "zadi/stochastic.hpp"

using namespace zadi;

TEST_CASE("draw_path basics") {
    SUBCASE("rho_xy = 1 degenerates to z_y~ = z_x") {
        const BrownianPath p = draw_path(64, 1.0, 42);
        for (const auto& s : p.steps) CHECK(s.z_y_tilde == s.z_x);
    }
    SUBCASE("same seed gives bitwise-identical paths") {
        const BrownianPath a = draw_path(256, 0.45, 9001);
        const BrownianPath b = draw_path(256, 0.45, 9001);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a.steps[i].z_x == b.steps[i].z_x);
            CHECK(a.steps[i].z_y_tilde == b.steps[i].z_y_tilde);
        }
    }
    SUBCASE("sample correlation of independent drivers is near zero") {
        const std::size_t n = 100000;
        const BrownianPath p = draw_path(n, 0.0, 7);
        double sxy = 0.0, sxx = 0.0, syy = 0.0;
        for (const auto& s : p.steps) {
            sxy += s.z_x * s.z_y_tilde;
            sxx += s.z_x * s.z_x;
            syy += s.z_y_tilde * s.z_y_tilde;
        }
        const double corr = sxy / std::sqrt(sxx * syy);
        CHECK(std::abs(corr) < 3.0 / std::sqrt(static_cast<double>(n)));
        // marginals standard normal: second moments near 1
        CHECK(sxx / n == doctest::Approx(1.0).epsilon(0.02));
        CHECK(syy / n == doctest::Approx(1.0).epsilon(0.02));
    }
    SUBCASE("target correlation is realised") {
        const std::size_t n = 100000;
        const BrownianPath p = draw_path(n, 0.45, 11);
        double sxy = 0.0;
        for (const auto& s : p.steps) sxy += s.z_x * s.z_y_tilde;
        CHECK(sxy / n == doctest::Approx(0.45).epsilon(0.05));
    }
    SUBCASE("invalid rho_xy") {
        CHECK_THROWS_AS((void)draw_path(8, 1.5, 1), std::invalid_argument);
    }
}

TEST_CASE("ito_diagonal") {
    CHECK(ito_diagonal(std::sqrt(0.25), 0.25) == 0.0);
    CHECK(ito_diagonal(0.0, 0.25) == -0.125);
    // E int (M-M_t) dM = 0: Monte Carlo since E[Z^2] = 1
    Rng rng(5);
    const double k = 0.0625;
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = ito_diagonal(std::sqrt(k) * rng.normal(), k);
        s += v;
        s2 += v * v;
    }
    const double mean = s / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::abs(mean) < 3.0 * se);
}

TEST_CASE("sub_step_count") {
    CHECK(sub_step_count(0.25) == 4);
    CHECK(sub_step_count(1.0) == 1);
    CHECK(sub_step_count(0.001) == 1000);
    CHECK(sub_step_count(4.0) == 1);
}

TEST_CASE("levy_area") {
    SUBCASE("m_sub = 1 sees no accumulated increment") {
        const LevyAreaSample s = levy_area(0.25, 1, 0.0, 3);
        CHECK(s.a_xy == 0.0);
        CHECK(s.a_yx == 0.0);
    }
    SUBCASE("discrete Abel identity holds exactly") {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const int m = 1 + static_cast<int>(seed % 128);
            const LevyAreaSample s = levy_area(0.0625, m, 0.3, seed);
            double dot = 0.0;
            for (int i = 0; i < m; ++i) dot += s.dw[i] * s.db[i];
            const double lhs = s.a_xy + s.a_yx;
            const double rhs = s.delta_w * s.delta_b - dot;
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
    SUBCASE("mean and variance against the discrete oracle") {
        const double k = 0.0625;
        const int m = 64, n = 100000;
        double s1 = 0.0, s2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const LevyAreaSample s = levy_area(k, m, 0.0, derive_stream(77, i));
            s1 += s.a_xy;
            s2 += s.a_xy * s.a_xy;
        }
        const double mean = s1 / n;
        const double var = s2 / n - mean * mean;
        const double se = std::sqrt(var / n);
        CHECK(std::abs(mean) < 3.0 * se);
        // exact second moment sum_i (i-1) (k/m)^2 = k^2 (m-1)/(2m)
        const double oracle = k * k * (m - 1) / (2.0 * m);
        CHECK(var == doctest::Approx(oracle).epsilon(0.05));
    }
    SUBCASE("diagonal case: sub-sum is (dW^2 - sum dw_i^2)/2 exactly") {
        const double k = 0.125;
        for (int m : {4, 64, 4096}) {
            const LevyAreaSample s = levy_area(k, m, 1.0, 99);  // rho = 1: B = W
            double sq = 0.0;
            for (int i = 0; i < m; ++i) sq += s.dw[i] * s.dw[i];
            const double expect = 0.5 * (s.delta_w * s.delta_w - sq);
            CHECK(s.a_xy == doctest::Approx(expect).epsilon(1e-12));
        }
        // converges to ito_diagonal in mean square at rate k^2/(2m)
        const int m = 1024, n = 500;
        double ms = 0.0;
        for (int i = 0; i < n; ++i) {
            const LevyAreaSample s = levy_area(k, m, 1.0, derive_stream(4, i));
            const double d = s.a_xy - ito_diagonal(s.delta_w, k);
            ms += d * d;
        }
        ms /= n;
        CHECK(ms < 3.0 * k * k / (2.0 * m));
    }
    SUBCASE("conditioned draw matches the given step") {
        const double k = 0.0625;
        const PathStep st{0.37, -1.2};
        const LevyAreaSample s = levy_area(st, k, 32, 0.5, 123);
        CHECK(s.delta_w == doctest::Approx(std::sqrt(k) * st.z_x).epsilon(1e-12));
        CHECK(s.delta_b == doctest::Approx(std::sqrt(k) * st.z_y_tilde).epsilon(1e-12));
        double dot = 0.0;
        for (int i = 0; i < 32; ++i) dot += s.dw[i] * s.db[i];
        CHECK(s.a_xy + s.a_yx ==
              doctest::Approx(s.delta_w * s.delta_b - dot).epsilon(1e-12));
    }
    SUBCASE("parameter errors") {
        CHECK_THROWS_AS((void)levy_area(0.25, 0, 0.0, 1), std::invalid_argument);
        CHECK_THROWS_AS((void)levy_area(0.25, 4, 2.0, 1), std::invalid_argument);
    }
}

TEST_CASE("path lattice aggregation is consistent with direct sums") {
    const PathLattice lat = draw_lattice(256, 1.0 / 256, 0.5, 31);
    // window sums agree with elementwise accumulation
    double w = 0.0;
    for (int i = 64; i < 96; ++i) w += lat.dw[i];
    CHECK(lat.sum_dw(64, 32) == doctest::Approx(w).epsilon(1e-15));
    // Euler sum over a window equals the sample built from the same increments
    double acc = 0.0, a = 0.0;
    for (int i = 64; i < 96; ++i) {
        a += acc * lat.db[i];
        acc += lat.dw[i];
    }
    CHECK(lat.levy_xy(64, 32) == doctest::Approx(a).epsilon(1e-15));
}

TEST_CASE("stream derivation is stable across calls") {
    CHECK(derive_stream(1, 0) == derive_stream(1, 0));
    CHECK(derive_stream(1, 0) != derive_stream(1, 1));
    CHECK(derive_stream(1, 0) != derive_stream(2, 0));
}
