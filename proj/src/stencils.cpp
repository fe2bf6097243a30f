#include "zadi/stencils.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace zadi {

void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0)
        omp_set_num_threads(n);
    else
        omp_set_num_threads(omp_get_num_procs());
#else
    (void)n;
#endif
}

namespace {

template <typename NodeOp>
Field map_nodes(const Field& f, NodeOp op) {
    Field out(f.grid());
    const int nx = f.nx(), ny = f.ny();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) out(i, j) = op(f, i, j);
    return out;
}

template <typename NodeOp>
Field map_nodes_serial(const Field& f, NodeOp op) {
    Field out(f.grid());
    const int nx = f.nx(), ny = f.ny();
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) out(i, j) = op(f, i, j);
    return out;
}

inline double dx_at(const Field& f, int i, int j) {
    return f.at_or_zero(i + 1, j) - f.at_or_zero(i - 1, j);
}
inline double dy_at(const Field& f, int i, int j) {
    return f.at_or_zero(i, j + 1) - f.at_or_zero(i, j - 1);
}
inline double dxx_at(const Field& f, int i, int j) {
    return f.at_or_zero(i + 1, j) - 2.0 * f(i, j) + f.at_or_zero(i - 1, j);
}
inline double dyy_at(const Field& f, int i, int j) {
    return f.at_or_zero(i, j + 1) - 2.0 * f(i, j) + f.at_or_zero(i, j - 1);
}
inline double dxy_at(const Field& f, int i, int j) {
    return f.at_or_zero(i + 1, j + 1) - f.at_or_zero(i - 1, j + 1) -
           f.at_or_zero(i + 1, j - 1) + f.at_or_zero(i - 1, j - 1);
}
inline double dx2_at(const Field& f, int i, int j) {
    return f.at_or_zero(i + 2, j) - 2.0 * f(i, j) + f.at_or_zero(i - 2, j);
}
inline double dy2_at(const Field& f, int i, int j) {
    return f.at_or_zero(i, j + 2) - 2.0 * f(i, j) + f.at_or_zero(i, j - 2);
}

}  // namespace

Field apply_dx(const Field& f) { return map_nodes(f, [](const Field& g, int i, int j) { return dx_at(g, i, j); }); }
Field apply_dy(const Field& f) { return map_nodes(f, [](const Field& g, int i, int j) { return dy_at(g, i, j); }); }
Field apply_dxx(const Field& f) { return map_nodes(f, [](const Field& g, int i, int j) { return dxx_at(g, i, j); }); }
Field apply_dyy(const Field& f) { return map_nodes(f, [](const Field& g, int i, int j) { return dyy_at(g, i, j); }); }
Field apply_dxy(const Field& f) { return map_nodes(f, [](const Field& g, int i, int j) { return dxy_at(g, i, j); }); }
Field apply_dx2(const Field& f) { return map_nodes(f, [](const Field& g, int i, int j) { return dx2_at(g, i, j); }); }
Field apply_dy2(const Field& f) { return map_nodes(f, [](const Field& g, int i, int j) { return dy2_at(g, i, j); }); }

namespace ref {
Field apply_dx(const Field& f) { return map_nodes_serial(f, [](const Field& g, int i, int j) { return dx_at(g, i, j); }); }
Field apply_dy(const Field& f) { return map_nodes_serial(f, [](const Field& g, int i, int j) { return dy_at(g, i, j); }); }
Field apply_dxx(const Field& f) { return map_nodes_serial(f, [](const Field& g, int i, int j) { return dxx_at(g, i, j); }); }
Field apply_dyy(const Field& f) { return map_nodes_serial(f, [](const Field& g, int i, int j) { return dyy_at(g, i, j); }); }
Field apply_dxy(const Field& f) { return map_nodes_serial(f, [](const Field& g, int i, int j) { return dxy_at(g, i, j); }); }
Field apply_dx2(const Field& f) { return map_nodes_serial(f, [](const Field& g, int i, int j) { return dx2_at(g, i, j); }); }
Field apply_dy2(const Field& f) { return map_nodes_serial(f, [](const Field& g, int i, int j) { return dy2_at(g, i, j); }); }
}  // namespace ref

}  // namespace zadi
