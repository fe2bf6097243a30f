#pragma once

#include <cstdint>
#include <vector>

#include "zadi/rng.hpp"

namespace zadi {

// One time step of the correlated pair of drivers:
//   z_y_tilde = rho_xy * z_x + sqrt(1 - rho_xy^2) * z_y
// with z_x, z_y independent standard normals.
struct PathStep {
    double z_x;
    double z_y_tilde;
};

struct BrownianPath {
    std::vector<PathStep> steps;
    std::uint64_t seed = 0;
    double k = 1.0;  // timestep the increments scale with: dM = sqrt(k) * Z

    std::size_t size() const { return steps.size(); }

    // Terminal Brownian values M_T = sqrt(k) * sum Z, shared with the
    // exact-solution oracle so scheme and oracle see one noise realisation.
    double terminal_m_x() const;
    double terminal_m_y() const;
};

BrownianPath draw_path(std::size_t n_steps, double rho_xy, std::uint64_t seed,
                       double k = 1.0);

// Ito iterated integral of a driver against itself:
// int (M_s - M_t) dM_s = (delta_m^2 - k) / 2.
inline double ito_diagonal(double delta_m, double k) {
    return 0.5 * (delta_m * delta_m - k);
}

// Euler sub-stepped approximation of the pair of cross iterated integrals
// over one step of length k:
//   a_xy ~ int (W_s - W_t) dB_s,   a_yx ~ int (B_s - B_t) dW_s.
// Sub-increments are retained; the discrete Abel identity
//   a_xy + a_yx = dW*dB - sum_i dw_i*db_i
// holds exactly for every sample.
struct LevyAreaSample {
    double a_xy = 0.0;
    double a_yx = 0.0;
    int sub_steps = 1;
    double delta_w = 0.0;  // sum of sub-increments, the step's dW
    double delta_b = 0.0;
    std::vector<double> dw;  // per-sub-step increments
    std::vector<double> db;

    PathStep coarse_step(double k) const;
};

// Sub-increments drawn first; the coarse increments are their sums.
// rho is the correlation of the two drivers.
LevyAreaSample levy_area(double k, int m_sub, double rho, std::uint64_t seed);

// Variant conditioned on a pre-drawn coarse step: the sub-increments are
// mean-shifted so that they sum to the given step's dW = sqrt(k) z_x and
// dB = sqrt(k) z_y_tilde (equivalent in law to the unconditioned draw).
LevyAreaSample levy_area(const PathStep& step, double k, int m_sub, double rho,
                         std::uint64_t seed);

// O(k^-1) sub-steps per interval: ceil(1/k), floored at 1.
int sub_step_count(double k);

// Brownian pair sampled on a fine uniform lattice of n cells of width delta.
// Coarser paths are derived by summing cells, and the Euler Levy-area sums
// over any cell window are available directly, so solutions with different
// timesteps share one filtration.
struct PathLattice {
    double delta = 0.0;
    std::vector<double> dw;
    std::vector<double> db;

    std::size_t cells() const { return dw.size(); }
    // Increments over the window [first, first+count).
    double sum_dw(std::size_t first, std::size_t count) const;
    double sum_db(std::size_t first, std::size_t count) const;
    // Euler approximation of int (W_s - W_t) dB_s over the window.
    double levy_xy(std::size_t first, std::size_t count) const;
    double levy_yx(std::size_t first, std::size_t count) const;
};

PathLattice draw_lattice(std::size_t n_cells, double delta, double rho,
                         std::uint64_t seed);

}  // namespace zadi
