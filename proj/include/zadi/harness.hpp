#pragma once

#include <cstdint>
#include <vector>

#include "zadi/exact.hpp"
#include "zadi/model.hpp"
#include "zadi/schemes.hpp"
#include "zadi/stochastic.hpp"

namespace zadi {

enum class InitialKind { Dirac, Gaussian };

// Constant-coefficient test problem: parameters, initial-datum location and
// truncation box.
struct SpdeProblem {
    ModelParams params;
    double T = 1.0;
    double x0 = 2.0, y0 = 2.0;
    double x_min = -8.0, x_max = 12.0, y_min = -8.0, y_max = 12.0;
    InitialKind initial = InitialKind::Dirac;

    Grid2D grid(double h_x, double h_y) const {
        return Grid2D::from_spacing(x_min, x_max, y_min, y_max, h_x, h_y);
    }
    Field initial_field(const Grid2D& g) const;
};

struct HestonProblem {
    HestonSpdeParams params;
    double T = 1.0;
    double x0 = 2.0, y0 = 1.4;
    double x_min = -3.0, x_max = 7.0, y_min = 0.0, y_max = 1.5;

    Grid2D grid(double h_x, double h_y) const {
        return Grid2D::from_spacing(x_min, x_max, y_min, y_max, h_x, h_y);
    }
};

// sqrt( sum h_x h_y (num - ref)^2 ); the fields must share one grid.
double l2_error(const Field& num, const Field& ref);
double field_l2(const Field& f);

struct LevelResult {
    double h_x, h_y, k;
    double error;
    double seconds;
};

// levels plus a least-squares fit of log2(error) against log2 of the varying
// refinement parameter (h or k), with its standard error. Levels whose error
// sits below 1e3 * eps * reference-norm are excluded from the fit.
struct ExperimentResult {
    std::vector<LevelResult> levels;
    double fitted_slope = 0.0;
    double slope_stderr = 0.0;
};

// Empirical-mean L2 error over L independent Brownian paths; scheme and
// closed-form solution share each path.
double mc_l2_error(SchemeKind kind, const SpdeProblem& prob, const Grid2D& g,
                   const TimeGrid& tg, int L, std::uint64_t master_seed);

ExperimentResult convergence_in_h(SchemeKind kind, const SpdeProblem& prob,
                                  double k_fixed, const std::vector<double>& h_levels,
                                  int L, std::uint64_t seed);

// k levels must divide T and nest (each N a multiple of the coarser ones);
// paths are coupled across levels by summing fine-step normals.
ExperimentResult convergence_in_k(SchemeKind kind, const SpdeProblem& prob,
                                  double h_fixed, const std::vector<double>& k_levels,
                                  int L, std::uint64_t seed);

// One fixed path, k fixed and large, h_x refined with h_y held; the reference
// is the closed-form solution (shifted in time for the Gaussian datum).
ExperimentResult divergence_study(const SpdeProblem& prob, double k_fixed,
                                  const std::vector<double>& hx_levels,
                                  double hy_fixed, std::uint64_t seed);

struct SweepRow {
    double rho_x, rho_y, rho_xy;
    double error;
};

// L2 error per correlation cell on one fixed path (raw normals shared, the
// correlation applied per cell).
std::vector<SweepRow> correlation_sweep(const std::vector<ModelParams>& rho_cells,
                                        const SpdeProblem& base, double h, double k,
                                        std::uint64_t seed);

// Coupled refinement proxies for the Heston SPDE (no exact solution):
// grids h and h/2 (nested nodes), or timesteps k and k/4, sharing one path
// drawn on a fine lattice.
double proxy_error_h(SchemeKind kind, const HestonProblem& prob, double k_fixed,
                     double hx_coarse, double hy_coarse, int L, std::uint64_t seed);
double proxy_error_k(SchemeKind kind, const HestonProblem& prob, double hx_fixed,
                     double hy_fixed, double k_coarse, int L, std::uint64_t seed);

ExperimentResult proxy_convergence_h(SchemeKind kind, const HestonProblem& prob,
                                     double k_fixed, double hx0, double hy0,
                                     int n_levels, int L, std::uint64_t seed);
ExperimentResult proxy_convergence_k(SchemeKind kind, const HestonProblem& prob,
                                     double hx, double hy, double k0, int n_levels,
                                     int L, std::uint64_t seed);

struct CostRow {
    SchemeKind kind;
    int level;
    double h_x, h_y, k;
    double seconds;
};

// Wall time of one-path simulations under the joint refinement k/4, h/2 per
// level, starting from the coarsest Heston level.
std::vector<CostRow> cost_study(const std::vector<SchemeKind>& kinds,
                                const HestonProblem& prob, int level_count,
                                std::uint64_t seed);

// Least-squares slope of log2(error) vs log2(param); helper shared by the
// experiments and the acceptance suite.
void fit_slope(const std::vector<double>& param, const std::vector<double>& error,
               double floor, double& slope, double& stderr_out);

// Heston path bundle on a shared fine lattice: per-step draws plus the Euler
// sub-simulated cross integrals for a given coarse step size.
HestonPath heston_path_from_lattice(const PathLattice& lat, double T, double k);

}  // namespace zadi
