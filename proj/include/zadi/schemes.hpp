#pragma once

#include <array>
#include <vector>

#include "zadi/model.hpp"
#include "zadi/solvers.hpp"
#include "zadi/stochastic.hpp"

namespace zadi {

enum class SchemeKind {
    ExplicitMilstein,
    ImplicitMilstein,
    AdiMilstein,
    SemiImplicitEuler,
    AdiMilsteinGeneral,
    AdiMilsteinHeston,
    AdiMilsteinHestonModified,
    AdiEulerHeston,
};

const char* to_string(SchemeKind kind);
SchemeKind scheme_from_string(const std::string& name);

// Parameters of the stochastic-volatility SPDE (Heston-type limit SPDE of a
// large defaultable portfolio).
struct HestonSpdeParams {
    double kappa1 = 2.0;    // mean reversion speed
    double theta1 = 0.4;    // mean reversion level
    double xi1 = 0.5;       // vol of vol
    double r1 = 0.05;       // rate
    double rho_11 = 0.3;    // asset loading on the common asset factor W
    double rho_21 = 0.2;    // variance loading on the common variance factor B
    double rho_3 = 0.5;     // correlation of W and B

    void validate() const;
};

// Node-wise coefficients of the general Zakai SPDE for d = 2, m = 2:
//   dv = ( 1/2 sum_ij d_i d_j [a_ij v] - sum_i d_i [b_i v] ) dt
//        - sum_l sum_i d_i [gamma_il v] dM_l.
// gamma[i][l] couples spatial direction i to driver l.
struct CoefficientFields {
    explicit CoefficientFields(const Grid2D& g)
        : a11(g), a22(g), a12(g), a21(g), b1(g), b2(g),
          gamma{{{Field(g), Field(g)}, {Field(g), Field(g)}}} {}

    Field a11, a22, a12, a21;
    Field b1, b2;
    std::array<std::array<Field, 2>, 2> gamma;

    // Constant coefficients matching the two-driver representation of the
    // constant-coefficient SPDE (drivers independent in this mapping).
    static CoefficientFields from_model(const Grid2D& g, const ModelParams& p);
};

// Iterated Ito integrals of the two drivers over one step:
// v[l][p] = int_t^{t+k} (M_p(s) - M_p(t)) dM_l(s).
struct IteratedIntegrals {
    double v[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

    // Exact diagonal entries plus an even split of the (exact) off-diagonal
    // sum delta_1*delta_2 for independent drivers.
    static IteratedIntegrals exact_independent(double dm1, double dm2, double k);
    // Euler sub-stepped off-diagonals from a LevyAreaSample, exact diagonals.
    static IteratedIntegrals from_sample(const LevyAreaSample& s, double k);
};

// --- one-step maps, constant-coefficient SPDE -------------------------------

Field step_explicit_milstein(const Field& v, const ModelParams& p, double k,
                             const PathStep& s);

Field step_implicit_milstein(const Field& v, const ModelParams& p, double k,
                             const PathStep& s, double tol = 1e-10);

Field step_adi_milstein(const Field& v, const ModelParams& p, double k,
                        const PathStep& s);

Field step_semi_implicit_euler(const Field& v, const ModelParams& p, double k,
                               const PathStep& s, double tol = 1e-10);

// --- one-step maps, variable coefficients -----------------------------------

Field step_adi_general(const Field& v, const CoefficientFields& c, double k,
                       const PathStep& s, const IteratedIntegrals& iter);

// variant selects AdiMilsteinHeston, AdiMilsteinHestonModified or
// AdiEulerHeston; int_w_db is the sub-simulated int (W_s - W_t) dB_s (ignored
// by the latter two).
Field step_heston_spde(const Field& u, const HestonSpdeParams& hp, double k,
                       const PathStep& s, double int_w_db, SchemeKind variant);

Field step_heston_spde(const Field& u, const HestonSpdeParams& hp, double k,
                       const PathStep& s, const LevyAreaSample& levy,
                       SchemeKind variant);

// --- full-horizon drivers ----------------------------------------------------

// Constant-coefficient kinds only. path must hold at least tg.N steps.
// tol and max_iter govern the unfactored implicit solves (max_iter 0 means
// the default 10 (n_x + n_y)).
Field evolve(const Field& initial, SchemeKind kind, const ModelParams& p,
             const TimeGrid& tg, const BrownianPath& path, double tol = 1e-10,
             int max_iter = 0);

// Per-step driver data for the Heston SPDE: correlated draws plus the
// sub-simulated cross integral.
struct HestonPath {
    std::vector<PathStep> steps;
    std::vector<double> int_w_db;
    double k = 1.0;
};

Field evolve_heston(const Field& initial, const HestonSpdeParams& hp,
                    const TimeGrid& tg, const HestonPath& path, SchemeKind variant);

struct GeneralPath {
    std::vector<PathStep> steps;
    std::vector<IteratedIntegrals> iter;
    double k = 1.0;
};

Field evolve_general(const Field& initial, const CoefficientFields& c,
                     const TimeGrid& tg, const GeneralPath& path);

}  // namespace zadi
