#include "zadi/schemes.hpp"

#include <cmath>
#include <sstream>

#include "zadi/stencils.hpp"

namespace zadi {

const char* to_string(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::ExplicitMilstein: return "explicit-milstein";
        case SchemeKind::ImplicitMilstein: return "implicit-milstein";
        case SchemeKind::AdiMilstein: return "adi-milstein";
        case SchemeKind::SemiImplicitEuler: return "semi-implicit-euler";
        case SchemeKind::AdiMilsteinGeneral: return "adi-milstein-general";
        case SchemeKind::AdiMilsteinHeston: return "adi-milstein-heston";
        case SchemeKind::AdiMilsteinHestonModified: return "adi-milstein-heston-modified";
        case SchemeKind::AdiEulerHeston: return "adi-euler-heston";
    }
    return "?";
}

SchemeKind scheme_from_string(const std::string& name) {
    for (SchemeKind k :
         {SchemeKind::ExplicitMilstein, SchemeKind::ImplicitMilstein, SchemeKind::AdiMilstein,
          SchemeKind::SemiImplicitEuler, SchemeKind::AdiMilsteinGeneral,
          SchemeKind::AdiMilsteinHeston, SchemeKind::AdiMilsteinHestonModified,
          SchemeKind::AdiEulerHeston})
        if (name == to_string(k)) return k;
    throw std::invalid_argument("unknown scheme: " + name);
}

void HestonSpdeParams::validate() const {
    if (!(xi1 >= 0.0)) throw std::invalid_argument("xi1 must be non-negative");
    for (double r : {rho_11, rho_21, rho_3})
        if (!(r >= -1.0 && r <= 1.0))
            throw std::invalid_argument("Heston correlations must lie in [-1,1]");
}

namespace {

// out = c0 v + cdx Dx v + cdy Dy v + cdxx Dxx v + cdyy Dyy v
//            + cdx2 Dx2 v + cdy2 Dy2 v + cdxy Dxy v
// in one pass; equals the corresponding stencil combination exactly.
void apply_combo(const Field& v, Field& out, double c0, double cdx, double cdy,
                 double cdxx, double cdyy, double cdx2, double cdy2, double cdxy) {
    const int nx = v.nx(), ny = v.ny();
    auto node = [&](int i, int j) {
        const double vc = v(i, j);
        const double vxm = v.at_or_zero(i - 1, j), vxp = v.at_or_zero(i + 1, j);
        const double vym = v.at_or_zero(i, j - 1), vyp = v.at_or_zero(i, j + 1);
        return c0 * vc + cdx * (vxp - vxm) + cdy * (vyp - vym) +
               cdxx * (vxp - 2.0 * vc + vxm) + cdyy * (vyp - 2.0 * vc + vym) +
               cdx2 * (v.at_or_zero(i + 2, j) - 2.0 * vc + v.at_or_zero(i - 2, j)) +
               cdy2 * (v.at_or_zero(i, j + 2) - 2.0 * vc + v.at_or_zero(i, j - 2)) +
               cdxy * (v.at_or_zero(i + 1, j + 1) - v.at_or_zero(i - 1, j + 1) -
                       v.at_or_zero(i + 1, j - 1) + v.at_or_zero(i - 1, j - 1));
    };
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nx; ++i) {
        if (i >= 2 && i < nx - 2 && ny > 4) {
            const double* r0 = v.data() + static_cast<std::size_t>(i - 2) * ny;
            const double* r1 = r0 + ny;
            const double* r2 = r1 + ny;
            const double* r3 = r2 + ny;
            const double* r4 = r3 + ny;
            double* o = out.data() + static_cast<std::size_t>(i) * ny;
            for (int j = 2; j < ny - 2; ++j) {
                const double vc = r2[j];
                o[j] = c0 * vc + cdx * (r3[j] - r1[j]) + cdy * (r2[j + 1] - r2[j - 1]) +
                       cdxx * (r3[j] - 2.0 * vc + r1[j]) +
                       cdyy * (r2[j + 1] - 2.0 * vc + r2[j - 1]) +
                       cdx2 * (r4[j] - 2.0 * vc + r0[j]) +
                       cdy2 * (r2[j + 2] - 2.0 * vc + r2[j - 2]) +
                       cdxy * (r3[j + 1] - r1[j + 1] - r3[j - 1] + r1[j - 1]);
            }
            for (int j : {0, 1, ny - 2, ny - 1}) out(i, j) = node(i, j);
        } else {
            for (int j = 0; j < ny; ++j) out(i, j) = node(i, j);
        }
    }
}

struct NoiseCoeffs {
    double cdx, cdy, cdx2, cdy2, cdxy;
};

// Milstein right-hand-side weights shared by the implicit, ADI and explicit
// schemes.
NoiseCoeffs milstein_coeffs(const ModelParams& p, const Grid2D& g, double k,
                            const PathStep& s) {
    NoiseCoeffs c;
    c.cdx = -std::sqrt(p.rho_x * k) * s.z_x / (2.0 * g.h_x);
    c.cdy = -std::sqrt(p.rho_y * k) * s.z_y_tilde / (2.0 * g.h_y);
    c.cdx2 = p.rho_x * k * (s.z_x * s.z_x - 1.0) / (8.0 * g.h_x * g.h_x);
    c.cdy2 = p.rho_y * k * (s.z_y_tilde * s.z_y_tilde - 1.0) / (8.0 * g.h_y * g.h_y);
    c.cdxy = std::sqrt(p.rho_x * p.rho_y) * k * s.z_x * s.z_y_tilde /
             (4.0 * g.h_x * g.h_y);
    return c;
}

Field milstein_rhs(const Field& v, const ModelParams& p, double k, const PathStep& s) {
    const NoiseCoeffs c = milstein_coeffs(p, v.grid(), k, s);
    Field out(v.grid());
    apply_combo(v, out, 1.0, c.cdx, c.cdy, 0.0, 0.0, c.cdx2, c.cdy2, c.cdxy);
    return out;
}

Field euler_rhs(const Field& v, const ModelParams& p, double k, const PathStep& s) {
    const Grid2D& g = v.grid();
    const double cdx = -std::sqrt(p.rho_x * k) * s.z_x / (2.0 * g.h_x);
    const double cdy = -std::sqrt(p.rho_y * k) * s.z_y_tilde / (2.0 * g.h_y);
    const double cdxy =
        std::sqrt(p.rho_x * p.rho_y) * p.rho_xy * k / (4.0 * g.h_x * g.h_y);
    Field out(g);
    apply_combo(v, out, 1.0, cdx, cdy, 0.0, 0.0, 0.0, 0.0, cdxy);
    return out;
}

// left operator I + (mu_x k/2h_x) Dx + (mu_y k/2h_y) Dy
//                 - (k/2h_x^2) Dxx - (k/2h_y^2) Dyy
Field implicit_lhs_apply(const Field& v, const ModelParams& p, double k) {
    const Grid2D& g = v.grid();
    Field out(g);
    apply_combo(v, out, 1.0, p.mu_x * k / (2.0 * g.h_x), p.mu_y * k / (2.0 * g.h_y),
                -k / (2.0 * g.h_x * g.h_x), -k / (2.0 * g.h_y * g.h_y), 0.0, 0.0, 0.0);
    return out;
}

// one-dimensional ADI factor I + (mu k/2h) D - (k/2h^2) D2 along an axis
Tridiag axis_factor(int n, double mu, double k, double h) {
    const double adv = mu * k / (2.0 * h);
    const double dif = k / (2.0 * h * h);
    std::vector<double> lo(n, -adv - dif), di(n, 1.0 + 2.0 * dif), up(n, adv - dif);
    lo[0] = 0.0;
    up[n - 1] = 0.0;
    return Tridiag(std::move(lo), std::move(di), std::move(up));
}

struct AdiFactors {
    TridiagFactor fx, fy;

    AdiFactors(const Grid2D& g, const ModelParams& p, double k)
        : fx(axis_factor(g.n_x, p.mu_x, k, g.h_x)),
          fy(axis_factor(g.n_y, p.mu_y, k, g.h_y)) {}

    void solve(Field& f) const {
        solve_rows_x(fx, f);
        solve_cols_y(fy, f);
    }
};

// Tables for line-varying tridiagonal factors, eliminated once and applied to
// each line of a field. X lines advance in lockstep over the strided axis.
struct BandFields {
    Field lower, diag, upper;
    explicit BandFields(const Grid2D& g) : lower(g), diag(g), upper(g) {}
};

struct BatchedFactorX {
    Field inv_piv, cs, lower;
};

struct BatchedFactorY {
    Field inv_piv, cs, lower;
};

void pivot_error(const char* axis, int line, int row, double piv) {
    std::ostringstream os;
    os << axis << "-factor: near-zero pivot " << piv << " in row " << row
       << " of line " << line;
    throw TridiagSingularError(row, os.str());
}

BatchedFactorX build_batched_x(const BandFields& b) {
    const Grid2D& g = b.diag.grid();
    const int nx = g.n_x, ny = g.n_y;
    BatchedFactorX f{Field(g), Field(g), b.lower};
    for (int j = 0; j < ny; ++j) {
        double piv = b.diag(0, j);
        double scale = std::abs(piv) + std::abs(b.upper(0, j));
        if (std::abs(piv) < 1e-14 * (scale > 0 ? scale : 1.0)) pivot_error("x", j, 0, piv);
        f.inv_piv(0, j) = 1.0 / piv;
        f.cs(0, j) = (nx > 1 ? b.upper(0, j) / piv : 0.0);
    }
    for (int i = 1; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const double piv = b.diag(i, j) - b.lower(i, j) * f.cs(i - 1, j);
            const double scale =
                std::abs(b.lower(i, j)) + std::abs(b.diag(i, j)) + std::abs(b.upper(i, j));
            if (std::abs(piv) < 1e-14 * (scale > 0 ? scale : 1.0)) pivot_error("x", j, i, piv);
            f.inv_piv(i, j) = 1.0 / piv;
            f.cs(i, j) = (i + 1 < nx ? b.upper(i, j) / piv : 0.0);
        }
    return f;
}

void solve_batched_x(const BatchedFactorX& f, Field& v) {
    const int nx = v.nx(), ny = v.ny();
    for (int j = 0; j < ny; ++j) v(0, j) *= f.inv_piv(0, j);
    for (int i = 1; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            v(i, j) = (v(i, j) - f.lower(i, j) * v(i - 1, j)) * f.inv_piv(i, j);
    for (int i = nx - 2; i >= 0; --i)
        for (int j = 0; j < ny; ++j) v(i, j) -= f.cs(i, j) * v(i + 1, j);
}

BatchedFactorY build_batched_y(const BandFields& b) {
    const Grid2D& g = b.diag.grid();
    const int nx = g.n_x, ny = g.n_y;
    BatchedFactorY f{Field(g), Field(g), b.lower};
    for (int i = 0; i < nx; ++i) {
        double piv = b.diag(i, 0);
        double scale = std::abs(piv) + std::abs(b.upper(i, 0));
        if (std::abs(piv) < 1e-14 * (scale > 0 ? scale : 1.0)) pivot_error("y", i, 0, piv);
        f.inv_piv(i, 0) = 1.0 / piv;
        f.cs(i, 0) = (ny > 1 ? b.upper(i, 0) / piv : 0.0);
        for (int j = 1; j < ny; ++j) {
            const double p = b.diag(i, j) - b.lower(i, j) * f.cs(i, j - 1);
            const double sc =
                std::abs(b.lower(i, j)) + std::abs(b.diag(i, j)) + std::abs(b.upper(i, j));
            if (std::abs(p) < 1e-14 * (sc > 0 ? sc : 1.0)) pivot_error("y", i, j, p);
            f.inv_piv(i, j) = 1.0 / p;
            f.cs(i, j) = (j + 1 < ny ? b.upper(i, j) / p : 0.0);
        }
    }
    return f;
}

void solve_batched_y(const BatchedFactorY& f, Field& v) {
    const int nx = v.nx(), ny = v.ny();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nx; ++i) {
        v(i, 0) *= f.inv_piv(i, 0);
        for (int j = 1; j < ny; ++j)
            v(i, j) = (v(i, j) - f.lower(i, j) * v(i, j - 1)) * f.inv_piv(i, j);
        for (int j = ny - 2; j >= 0; --j) v(i, j) -= f.cs(i, j) * v(i, j + 1);
    }
}

// pointwise product
Field hadamard(const Field& a, const Field& b) {
    Field out(a.grid());
    const double* pa = a.data();
    const double* pb = b.data();
    double* po = out.data();
    for (std::size_t q = 0; q < a.size(); ++q) po[q] = pa[q] * pb[q];
    return out;
}

void axpy(Field& y, double alpha, const Field& x) {
    double* py = y.data();
    const double* px = x.data();
    for (std::size_t q = 0; q < y.size(); ++q) py[q] += alpha * px[q];
}

}  // namespace

Field step_explicit_milstein(const Field& v, const ModelParams& p, double k,
                             const PathStep& s) {
    p.validate();
    const Grid2D& g = v.grid();
    const NoiseCoeffs c = milstein_coeffs(p, g, k, s);
    const double cdx = c.cdx - p.mu_x * k / (2.0 * g.h_x);
    const double cdy = c.cdy - p.mu_y * k / (2.0 * g.h_y);
    Field out(g);
    apply_combo(v, out, 1.0, cdx, cdy, k / (2.0 * g.h_x * g.h_x),
                k / (2.0 * g.h_y * g.h_y), c.cdx2, c.cdy2, c.cdxy);
    return out;
}

Field step_adi_milstein(const Field& v, const ModelParams& p, double k,
                        const PathStep& s) {
    p.validate();
    Field rhs = milstein_rhs(v, p, k, s);
    AdiFactors f(v.grid(), p, k);
    f.solve(rhs);
    return rhs;
}

Field step_implicit_milstein(const Field& v, const ModelParams& p, double k,
                             const PathStep& s, double tol) {
    p.validate();
    const Field rhs = milstein_rhs(v, p, k, s);
    const AdiFactors fac(v.grid(), p, k);
    FieldOp op = [&](const Field& w) { return implicit_lhs_apply(w, p, k); };
    FieldOp prec = [&](const Field& w) {
        Field r = w;
        fac.solve(r);
        return r;
    };
    const int max_iter = 10 * (v.nx() + v.ny());
    return solve_unfactored(op, rhs, tol, max_iter, &prec, &v);
}

Field step_semi_implicit_euler(const Field& v, const ModelParams& p, double k,
                               const PathStep& s, double tol) {
    p.validate();
    const Field rhs = euler_rhs(v, p, k, s);
    const AdiFactors fac(v.grid(), p, k);
    FieldOp op = [&](const Field& w) { return implicit_lhs_apply(w, p, k); };
    FieldOp prec = [&](const Field& w) {
        Field r = w;
        fac.solve(r);
        return r;
    };
    const int max_iter = 10 * (v.nx() + v.ny());
    return solve_unfactored(op, rhs, tol, max_iter, &prec, &v);
}

CoefficientFields CoefficientFields::from_model(const Grid2D& g, const ModelParams& p) {
    p.validate();
    CoefficientFields c(g);
    auto fill = [](Field& f, double value) {
        double* d = f.data();
        for (std::size_t q = 0; q < f.size(); ++q) d[q] = value;
    };
    fill(c.a11, 1.0);
    fill(c.a22, 1.0);
    const double axy = std::sqrt(p.rho_x * p.rho_y) * p.rho_xy;
    fill(c.a12, axy);
    fill(c.a21, axy);
    fill(c.b1, p.mu_x);
    fill(c.b2, p.mu_y);
    fill(c.gamma[0][0], std::sqrt(p.rho_x));
    fill(c.gamma[0][1], 0.0);
    fill(c.gamma[1][0], std::sqrt(p.rho_y) * p.rho_xy);
    fill(c.gamma[1][1], std::sqrt(p.rho_y * (1.0 - p.rho_xy * p.rho_xy)));
    return c;
}

IteratedIntegrals IteratedIntegrals::exact_independent(double dm1, double dm2, double k) {
    IteratedIntegrals it;
    it.v[0][0] = ito_diagonal(dm1, k);
    it.v[1][1] = ito_diagonal(dm2, k);
    it.v[0][1] = 0.5 * dm1 * dm2;
    it.v[1][0] = 0.5 * dm1 * dm2;
    return it;
}

IteratedIntegrals IteratedIntegrals::from_sample(const LevyAreaSample& s, double k) {
    IteratedIntegrals it;
    it.v[0][0] = ito_diagonal(s.delta_w, k);
    it.v[1][1] = ito_diagonal(s.delta_b, k);
    it.v[1][0] = s.a_xy;  // int (W - W_t) dB: integrand is driver 0
    it.v[0][1] = s.a_yx;
    return it;
}

namespace {

// G_l(v) = (1/2h_x) Dx(gamma_{1l} v) + (1/2h_y) Dy(gamma_{2l} v)
Field noise_op(const CoefficientFields& c, int l, const Field& v) {
    const Grid2D& g = v.grid();
    Field gx = apply_dx(hadamard(c.gamma[0][l], v));
    const Field gy = apply_dy(hadamard(c.gamma[1][l], v));
    double* px = gx.data();
    const double* py = gy.data();
    const double wx = 1.0 / (2.0 * g.h_x), wy = 1.0 / (2.0 * g.h_y);
    for (std::size_t q = 0; q < gx.size(); ++q) px[q] = wx * px[q] + wy * py[q];
    return gx;
}

struct GeneralFactors {
    BatchedFactorX fx;
    BatchedFactorY fy;
};

GeneralFactors build_general_factors(const CoefficientFields& c, double k) {
    const Grid2D& g = c.a11.grid();
    const int nx = g.n_x, ny = g.n_y;
    BandFields bx(g), by(g);
    const double wx1 = k / (2.0 * g.h_x), wx2 = k / (2.0 * g.h_x * g.h_x);
    const double wy1 = k / (2.0 * g.h_y), wy2 = k / (2.0 * g.h_y * g.h_y);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            bx.diag(i, j) = 1.0 + 2.0 * wx2 * c.a11(i, j);
            bx.lower(i, j) = (i > 0) ? -wx1 * c.b1(i - 1, j) - wx2 * c.a11(i - 1, j) : 0.0;
            bx.upper(i, j) =
                (i + 1 < nx) ? wx1 * c.b1(i + 1, j) - wx2 * c.a11(i + 1, j) : 0.0;
            by.diag(i, j) = 1.0 + 2.0 * wy2 * c.a22(i, j);
            by.lower(i, j) = (j > 0) ? -wy1 * c.b2(i, j - 1) - wy2 * c.a22(i, j - 1) : 0.0;
            by.upper(i, j) =
                (j + 1 < ny) ? wy1 * c.b2(i, j + 1) - wy2 * c.a22(i, j + 1) : 0.0;
        }
    return GeneralFactors{build_batched_x(bx), build_batched_y(by)};
}

Field general_rhs(const Field& v, const CoefficientFields& c, double k,
                  const PathStep& s, const IteratedIntegrals& iter) {
    const Grid2D& g = v.grid();
    Field out = v;

    const double wxy = k / (4.0 * g.h_x * g.h_y);
    axpy(out, 0.5 * wxy, apply_dxy(hadamard(c.a12, v)));
    axpy(out, 0.5 * wxy, apply_dxy(hadamard(c.a21, v)));

    const double dm[2] = {std::sqrt(k) * s.z_x, std::sqrt(k) * s.z_y_tilde};
    Field g0 = noise_op(c, 0, v);
    Field g1 = noise_op(c, 1, v);
    axpy(out, -dm[0], g0);
    axpy(out, -dm[1], g1);

    // sum_{l,p} I[l][p] G_l(G_p(v))
    for (int l = 0; l < 2; ++l)
        for (int p = 0; p < 2; ++p) {
            const double w = iter.v[l][p];
            if (w == 0.0) continue;
            axpy(out, w, noise_op(c, l, p == 0 ? g0 : g1));
        }
    return out;
}

}  // namespace

Field step_adi_general(const Field& v, const CoefficientFields& c, double k,
                       const PathStep& s, const IteratedIntegrals& iter) {
    Field rhs = general_rhs(v, c, k, s, iter);
    GeneralFactors f = build_general_factors(c, k);
    solve_batched_x(f.fx, rhs);
    solve_batched_y(f.fy, rhs);
    return rhs;
}

Field evolve_general(const Field& initial, const CoefficientFields& c,
                     const TimeGrid& tg, const GeneralPath& path) {
    if (tg.N == 0) return initial;
    if (path.steps.size() < static_cast<std::size_t>(tg.N) ||
        path.iter.size() < static_cast<std::size_t>(tg.N))
        throw std::invalid_argument("evolve_general: path shorter than time grid");
    GeneralFactors f = build_general_factors(c, tg.k);
    Field v = initial;
    for (int n = 0; n < tg.N; ++n) {
        Field rhs = general_rhs(v, c, tg.k, path.steps[n], path.iter[n]);
        solve_batched_x(f.fx, rhs);
        solve_batched_y(f.fy, rhs);
        v = std::move(rhs);
    }
    return v;
}

namespace {

struct HestonTables {
    std::vector<double> yj, sqrt_yj;
    BatchedFactorX fx;
    TridiagFactor fy;
};

HestonTables build_heston_tables(const Grid2D& g, const HestonSpdeParams& hp, double k) {
    if (g.y_min < -1e-12)
        throw std::domain_error("heston scheme requires y range within [0, y_max]");
    const int nx = g.n_x, ny = g.n_y;
    HestonTables t{std::vector<double>(ny), std::vector<double>(ny),
                   BatchedFactorX{Field(g), Field(g), Field(g)},
                   TridiagFactor(Tridiag({0.0}, {1.0}, {0.0}))};
    for (int j = 0; j < ny; ++j) {
        t.yj[j] = g.y(j);
        t.sqrt_yj[j] = std::sqrt(std::max(t.yj[j], 0.0));
    }
    const double cx_adv = k / (2.0 * g.h_x);
    const double cx_dif = k / (2.0 * g.h_x * g.h_x);
    BandFields bx(g);
    for (int j = 0; j < ny; ++j) {
        const double a1x = hp.r1 - 0.5 * t.yj[j] - hp.xi1 * hp.rho_3 * hp.rho_11 * hp.rho_21;
        const double dif = cx_dif * t.yj[j];
        for (int i = 0; i < nx; ++i) {
            bx.diag(i, j) = 1.0 + 2.0 * dif;
            bx.lower(i, j) = (i > 0) ? -cx_adv * a1x - dif : 0.0;
            bx.upper(i, j) = (i + 1 < nx) ? cx_adv * a1x - dif : 0.0;
        }
    }
    t.fx = build_batched_x(bx);

    const double cy_adv = k / (2.0 * g.h_y);
    const double cy_dif = k / (2.0 * g.h_y * g.h_y) * hp.xi1 * hp.xi1;
    std::vector<double> lo(ny), di(ny), up(ny);
    for (int j = 0; j < ny; ++j) {
        const double a1y = hp.kappa1 * (hp.theta1 - t.yj[j]) - hp.xi1 * hp.xi1;
        const double dif = cy_dif * t.yj[j];
        di[j] = 1.0 + 2.0 * dif;
        lo[j] = (j > 0) ? -cy_adv * a1y - dif : 0.0;
        up[j] = (j + 1 < ny) ? cy_adv * a1y - dif : 0.0;
    }
    t.fy = TridiagFactor(Tridiag(std::move(lo), std::move(di), std::move(up)));
    return t;
}

// Dy with a preceding multiplication by sqrt(Y) on interior nodes; zero ghosts.
Field dy_sqrty(const Field& u, const std::vector<double>& sqrt_yj) {
    const int nx = u.nx(), ny = u.ny();
    Field out(u.grid());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const double up = (j + 1 < ny) ? sqrt_yj[j + 1] * u(i, j + 1) : 0.0;
            const double dn = (j > 0) ? sqrt_yj[j - 1] * u(i, j - 1) : 0.0;
            out(i, j) = up - dn;
        }
    return out;
}

Field heston_rhs(const Field& u, const HestonSpdeParams& hp, double k,
                 const PathStep& s, double int_w_db, SchemeKind variant,
                 const HestonTables& t) {
    const Grid2D& g = u.grid();
    const int nx = u.nx(), ny = u.ny();
    const bool milstein = (variant == SchemeKind::AdiMilsteinHeston ||
                           variant == SchemeKind::AdiMilsteinHestonModified);
    const bool with_levy = (variant == SchemeKind::AdiMilsteinHeston);

    const double sqrtk = std::sqrt(k);
    // x first-derivative weights: deterministic remainder, dW dB cross part
    // and the sub-simulated Levy integral; all carry 1/(4 h_x) scalings.
    double cdx_const = 0.0;
    double cdxy = 0.0;    // times y_j
    double cdx2 = 0.0;    // times y_j
    if (milstein) {
        const double cpl = hp.xi1 * hp.rho_11 * hp.rho_21;
        cdx_const += -(k / (4.0 * g.h_x)) * cpl * hp.rho_3;
        cdx_const += (k / (4.0 * g.h_x)) * cpl * s.z_x * s.z_y_tilde;
        if (with_levy) cdx_const += (1.0 / (4.0 * g.h_x)) * cpl * int_w_db;
        cdxy = (k / (4.0 * g.h_x * g.h_y)) * cpl * s.z_x * s.z_y_tilde;
        cdx2 = hp.rho_11 * hp.rho_11 * k * (s.z_x * s.z_x - 1.0) / (8.0 * g.h_x * g.h_x);
    } else {
        cdxy = (k / (4.0 * g.h_x * g.h_y)) * hp.xi1 * hp.rho_3 * hp.rho_11 * hp.rho_21;
    }
    const double cdx_noise = -sqrtk * s.z_x * hp.rho_11 / (2.0 * g.h_x);  // times sqrt(y_j)
    const double cny = -sqrtk * s.z_y_tilde * hp.xi1 * hp.rho_21 / (2.0 * g.h_y);
    const double cy2 = milstein ? k * (s.z_y_tilde * s.z_y_tilde - 1.0) * hp.xi1 * hp.xi1 *
                                      hp.rho_21 * hp.rho_21 / (8.0 * g.h_y * g.h_y)
                                : 0.0;

    const Field s1 = dy_sqrty(u, t.sqrt_yj);
    Field s2(g);
    if (cy2 != 0.0) s2 = dy_sqrty(s1, t.sqrt_yj);

    Field out(g);
    const double c0 = 1.0 + hp.kappa1 * k;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const double vc = u(i, j);
            const double dx = u.at_or_zero(i + 1, j) - u.at_or_zero(i - 1, j);
            const double dx2 =
                u.at_or_zero(i + 2, j) - 2.0 * vc + u.at_or_zero(i - 2, j);
            const double dxy = u.at_or_zero(i + 1, j + 1) - u.at_or_zero(i - 1, j + 1) -
                               u.at_or_zero(i + 1, j - 1) + u.at_or_zero(i - 1, j - 1);
            double r = c0 * vc + (cdx_const + cdx_noise * t.sqrt_yj[j]) * dx +
                       cdx2 * t.yj[j] * dx2 + cdxy * t.yj[j] * dxy + cny * s1(i, j);
            if (cy2 != 0.0) r += cy2 * s2(i, j);
            out(i, j) = r;
        }
    return out;
}

}  // namespace

Field step_heston_spde(const Field& u, const HestonSpdeParams& hp, double k,
                       const PathStep& s, double int_w_db, SchemeKind variant) {
    hp.validate();
    if (variant != SchemeKind::AdiMilsteinHeston &&
        variant != SchemeKind::AdiMilsteinHestonModified &&
        variant != SchemeKind::AdiEulerHeston)
        throw std::invalid_argument("step_heston_spde: not a Heston scheme variant");
    HestonTables t = build_heston_tables(u.grid(), hp, k);
    Field rhs = heston_rhs(u, hp, k, s, int_w_db, variant, t);
    solve_batched_x(t.fx, rhs);
    solve_cols_y(t.fy, rhs);
    return rhs;
}

Field step_heston_spde(const Field& u, const HestonSpdeParams& hp, double k,
                       const PathStep& s, const LevyAreaSample& levy,
                       SchemeKind variant) {
    return step_heston_spde(u, hp, k, s, levy.a_xy, variant);
}

Field evolve_heston(const Field& initial, const HestonSpdeParams& hp,
                    const TimeGrid& tg, const HestonPath& path, SchemeKind variant) {
    hp.validate();
    if (tg.N == 0) return initial;
    if (path.steps.size() < static_cast<std::size_t>(tg.N))
        throw std::invalid_argument("evolve_heston: path shorter than time grid");
    const bool with_levy = (variant == SchemeKind::AdiMilsteinHeston);
    if (with_levy && path.int_w_db.size() < static_cast<std::size_t>(tg.N))
        throw std::invalid_argument("evolve_heston: missing Levy-area entries");
    HestonTables t = build_heston_tables(initial.grid(), hp, tg.k);
    Field u = initial;
    for (int n = 0; n < tg.N; ++n) {
        const double a = with_levy ? path.int_w_db[n] : 0.0;
        Field rhs = heston_rhs(u, hp, tg.k, path.steps[n], a, variant, t);
        solve_batched_x(t.fx, rhs);
        solve_cols_y(t.fy, rhs);
        u = std::move(rhs);
    }
    return u;
}

Field evolve(const Field& initial, SchemeKind kind, const ModelParams& p,
             const TimeGrid& tg, const BrownianPath& path, double tol, int max_iter) {
    p.validate();
    if (tg.N == 0) return initial;
    if (path.size() < static_cast<std::size_t>(tg.N))
        throw std::invalid_argument("evolve: path shorter than time grid");
    const Grid2D& g = initial.grid();
    const double k = tg.k;

    switch (kind) {
        case SchemeKind::ExplicitMilstein: {
            Field v = initial;
            Field out(g);
            for (int n = 0; n < tg.N; ++n) {
                const NoiseCoeffs c = milstein_coeffs(p, g, k, path.steps[n]);
                const double cdx = c.cdx - p.mu_x * k / (2.0 * g.h_x);
                const double cdy = c.cdy - p.mu_y * k / (2.0 * g.h_y);
                apply_combo(v, out, 1.0, cdx, cdy, k / (2.0 * g.h_x * g.h_x),
                            k / (2.0 * g.h_y * g.h_y), c.cdx2, c.cdy2, c.cdxy);
                std::swap(v, out);
            }
            return v;
        }
        case SchemeKind::AdiMilstein: {
            const AdiFactors f(g, p, k);
            Field v = initial;
            for (int n = 0; n < tg.N; ++n) {
                Field rhs = milstein_rhs(v, p, k, path.steps[n]);
                f.solve(rhs);
                v = std::move(rhs);
            }
            return v;
        }
        case SchemeKind::ImplicitMilstein:
        case SchemeKind::SemiImplicitEuler: {
            const AdiFactors fac(g, p, k);
            FieldOp op = [&](const Field& w) { return implicit_lhs_apply(w, p, k); };
            FieldOp prec = [&](const Field& w) {
                Field r = w;
                fac.solve(r);
                return r;
            };
            const int iters = max_iter > 0 ? max_iter : 10 * (g.n_x + g.n_y);
            Field v = initial;
            for (int n = 0; n < tg.N; ++n) {
                const Field rhs = (kind == SchemeKind::ImplicitMilstein)
                                      ? milstein_rhs(v, p, k, path.steps[n])
                                      : euler_rhs(v, p, k, path.steps[n]);
                v = solve_unfactored(op, rhs, tol, iters, &prec, &v);
            }
            return v;
        }
        default:
            throw std::invalid_argument(
                "evolve: kind requires the Heston or general-coefficient driver");
    }
}

}  // namespace zadi
