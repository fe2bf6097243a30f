// Timing comparison of the OpenMP kernels against the serial reference:
// stencil application, batched ADI sweeps, and a full ADI Milstein step.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "zadi/schemes.hpp"
#include "zadi/solvers.hpp"
#include "zadi/stencils.hpp"

using namespace zadi;

namespace {

double seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_best(F&& fn, int reps = 7) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = seconds();
        fn();
        best = std::min(best, seconds() - t0);
    }
    return best;
}

Field make_field(int n) {
    Grid2D g = Grid2D::from_counts(-8.0, 12.0, -8.0, 12.0, n, n);
    Field f(g);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            f(i, j) = std::sin(0.37 * i) * std::cos(0.11 * j);
    return f;
}

void row(const char* name, double serial, double parallel) {
    std::printf("%-28s %10.3f ms %10.3f ms %8.2fx\n", name, serial * 1e3, parallel * 1e3,
                serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 1023;
    std::printf("grid %d x %d interior nodes\n", n, n);
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    Field f = make_field(n);

    row("dx stencil", time_best([&] { (void)ref::apply_dx(f); }),
        time_best([&] { (void)apply_dx(f); }));
    row("dxy stencil", time_best([&] { (void)ref::apply_dxy(f); }),
        time_best([&] { (void)apply_dxy(f); }));
    row("dx2 stencil", time_best([&] { (void)ref::apply_dx2(f); }),
        time_best([&] { (void)apply_dx2(f); }));

    const double k = 1.0 / 1024.0;
    ModelParams p{0.0809, 0.0809, 0.2, 0.2, 0.45};
    {
        std::vector<double> lo(n, -1.0), di(n, 4.0), up(n, -1.0);
        lo[0] = up[n - 1] = 0.0;
        TridiagFactor fac{Tridiag(lo, di, up)};
        Field a = f, b = f;
        row("tridiag x sweep", time_best([&] { ref::solve_rows_x(fac, a); }),
            time_best([&] { solve_rows_x(fac, b); }));
        row("tridiag y sweep", time_best([&] { ref::solve_cols_y(fac, a); }),
            time_best([&] { solve_cols_y(fac, b); }));
    }
    {
        PathStep s{0.7, -0.3};
        set_threads(1);
        const double t_serial = time_best([&] { (void)step_adi_milstein(f, p, k, s); });
        set_threads(0);
        const double t_par = time_best([&] { (void)step_adi_milstein(f, p, k, s); });
        row("adi milstein step", t_serial, t_par);
    }
    return 0;
}
