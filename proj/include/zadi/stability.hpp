#pragma once

#include <array>
#include <vector>

#include "zadi/model.hpp"
#include "zadi/schemes.hpp"

namespace zadi {

// Fourier symbols of the difference operators at wavenumbers (xi, eta):
//   a_x = -2 sin^2(xi h_x/2) / h_x^2      (Dxx / h^2 symbol, <= 0)
//   b_x = -sin^2(xi h_x) / (2 h_x^2)
//   c_x =  sin(xi h_x) / h_x
//   d   = -sin(xi h_x) sin(eta h_y) / (h_x h_y)
// They satisfy c_x c_y + d = 0, 4 b_x b_y = d^2 and b_x = cos^2(xi h_x/2) a_x.
struct WaveCoefficients {
    double a_x, a_y, b_x, b_y, c_x, c_y, d;
};

WaveCoefficients wave_coefficients(double xi, double eta, double h_x, double h_y);

struct AssumptionCheck {
    bool pass;
    std::array<double, 3> lhs;  // the three left-hand sides, all must be < 1
};

// 2 rho_x^2 (1+2|rho_xy|) < 1, 2 rho_y^2 (1+2|rho_xy|) < 1,
// 2 rho_x rho_y (3 rho_xy^2 + 2|rho_xy| + 1) < 1.
AssumptionCheck check_assumption(const ModelParams& p);

// Mean-square CFL bounds of the explicit scheme: largest admissible k/h_x^2
// and k/h_y^2.
std::array<double, 2> explicit_cfl_bounds(const ModelParams& p);

struct AmplificationReport {
    double xi, eta;
    double moment2;  // E|C_n|^2
    bool stable;     // moment2 < 1
};

// Closed-form second moment of the per-wavenumber amplification factor,
// assembled from the Gaussian moment identities
//   E[Zx^2 Zy~^2] = 1 + 2 rho_xy^2, E[Zx Zy~] = rho_xy, E[Zx^3 Zy~] = 3 rho_xy
// and divided by the squared scheme denominator. Supports ExplicitMilstein,
// ImplicitMilstein and AdiMilstein.
AmplificationReport amplification_moment2(const ModelParams& p, double k,
                                          double h_x, double h_y, double xi,
                                          double eta, SchemeKind kind);

// Supremum of moment2 over a lattice_n x lattice_n wavenumber lattice spanning
// the Nyquist box endpoints included, excluding the origin where the moment is
// identically 1.
double sup_moment2_lattice(const ModelParams& p, double k, double h_x, double h_y,
                           SchemeKind kind, int lattice_n = 101);

struct RegionCell {
    double rho_x, rho_y, rho_xy;
    bool assumption_pass;
    double sup_moment2;
    bool stable;
};

std::vector<RegionCell> stability_region_sweep(const std::vector<ModelParams>& cells,
                                               double k, double h, SchemeKind kind,
                                               int lattice_n = 101);

// beta = min{1-rho_x, 1-rho_y, 1-2rho_x^2(1+2|rho_xy|),
//            1-2rho_y^2(1+2|rho_xy|), 1-2rho_x rho_y(1+2|rho_xy|+3rho_xy^2)},
// theta0 = 1 - beta/2, theta = sqrt(theta0).
struct StabilityMargins {
    double beta;
    double theta0;
    double theta;
};

StabilityMargins margins(const ModelParams& p);

// Advisory timestep bound k <= T log2(1/theta) / (C0 + (4+beta) log2(1/h_min))
// with user-supplied constants (the analysis leaves them unspecified).
double advisory_timestep(const ModelParams& p, double T, double h_min,
                         double c0 = 1.0, double beta_exp = 1.0);

}  // namespace zadi
