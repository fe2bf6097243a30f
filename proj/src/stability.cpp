#include "zadi/stability.hpp"

#include <cmath>
#include <numbers>

namespace zadi {

WaveCoefficients wave_coefficients(double xi, double eta, double h_x, double h_y) {
    if (!(h_x > 0.0) || !(h_y > 0.0))
        throw std::invalid_argument("wave_coefficients: mesh widths must be positive");
    const double slack = 1e-12;
    if (std::abs(xi) > std::numbers::pi / h_x * (1.0 + slack) ||
        std::abs(eta) > std::numbers::pi / h_y * (1.0 + slack))
        throw std::domain_error("wave_coefficients: wavenumber outside the Nyquist box");
    WaveCoefficients w;
    const double sx = std::sin(0.5 * xi * h_x), sy = std::sin(0.5 * eta * h_y);
    const double s2x = std::sin(xi * h_x), s2y = std::sin(eta * h_y);
    w.a_x = -2.0 * sx * sx / (h_x * h_x);
    w.a_y = -2.0 * sy * sy / (h_y * h_y);
    w.b_x = -s2x * s2x / (2.0 * h_x * h_x);
    w.b_y = -s2y * s2y / (2.0 * h_y * h_y);
    w.c_x = s2x / h_x;
    w.c_y = s2y / h_y;
    w.d = -s2x * s2y / (h_x * h_y);
    return w;
}

AssumptionCheck check_assumption(const ModelParams& p) {
    p.validate();
    const double ar = std::abs(p.rho_xy);
    AssumptionCheck c;
    c.lhs[0] = 2.0 * p.rho_x * p.rho_x * (1.0 + 2.0 * ar);
    c.lhs[1] = 2.0 * p.rho_y * p.rho_y * (1.0 + 2.0 * ar);
    c.lhs[2] = 2.0 * p.rho_x * p.rho_y * (3.0 * p.rho_xy * p.rho_xy + 2.0 * ar + 1.0);
    c.pass = c.lhs[0] < 1.0 && c.lhs[1] < 1.0 && c.lhs[2] < 1.0;
    return c;
}

std::array<double, 2> explicit_cfl_bounds(const ModelParams& p) {
    p.validate();
    const double ar = std::abs(p.rho_xy);
    const double rx = p.rho_x, ry = p.rho_y;
    const double dx = 2.0 + 2.0 * rx * rx + 2.0 * rx * ry +
                      (3.0 * rx + ry + 4.0 * rx * rx + 4.0 * rx * ry) * ar +
                      6.0 * rx * ry * p.rho_xy * p.rho_xy;
    const double dy = 2.0 + 2.0 * ry * ry + 2.0 * rx * ry +
                      (rx + 3.0 * ry + 4.0 * ry * ry + 4.0 * rx * ry) * ar +
                      6.0 * rx * ry * p.rho_xy * p.rho_xy;
    return {1.0 / dx, 1.0 / dy};
}

AmplificationReport amplification_moment2(const ModelParams& p, double k, double h_x,
                                          double h_y, double xi, double eta,
                                          SchemeKind kind) {
    p.validate();
    if (!(k > 0.0)) throw std::invalid_argument("amplification_moment2: k must be positive");
    const WaveCoefficients w = wave_coefficients(xi, eta, h_x, h_y);
    const double rx = p.rho_x, ry = p.rho_y, rxy = p.rho_xy;
    const double srxy = std::sqrt(rx * ry);

    double lead = 1.0;  // coefficient multiplying the identity in the numerator
    double denom = 1.0;
    switch (kind) {
        case SchemeKind::ExplicitMilstein:
            lead = 1.0 + (w.a_x + w.a_y) * k;
            denom = 1.0;
            break;
        case SchemeKind::ImplicitMilstein:
            denom = 1.0 - (w.a_x + w.a_y) * k;
            break;
        case SchemeKind::AdiMilstein:
            denom = (1.0 - w.a_x * k) * (1.0 - w.a_y * k);
            break;
        default:
            throw std::invalid_argument(
                "amplification_moment2: supported for explicit, implicit and ADI Milstein");
    }

    // E[(lead + b_x rho_x k (Z^2-1) + b_y rho_y k (Z~^2-1)
    //         + d sqrt(rho_x rho_y) k Z Z~)^2], term by term:
    // E[(Z^2-1)^2] = 2, E[Z^2 Z~^2] = 1+2 rho_xy^2,
    // E[(Z^2-1)(Z~^2-1)] = 2 rho_xy^2, E[(Z^2-1) Z Z~] = 2 rho_xy.
    const double k2 = k * k;
    double real2 = lead * lead;
    real2 += 2.0 * w.b_x * w.b_x * rx * rx * k2;
    real2 += 2.0 * w.b_y * w.b_y * ry * ry * k2;
    real2 += w.d * w.d * rx * ry * (1.0 + 2.0 * rxy * rxy) * k2;
    real2 += 2.0 * lead * w.d * srxy * rxy * k;
    real2 += 4.0 * w.b_x * w.b_y * rx * ry * rxy * rxy * k2;
    real2 += 4.0 * w.b_x * w.d * rx * srxy * rxy * k2;
    real2 += 4.0 * w.b_y * w.d * ry * srxy * rxy * k2;
    // E[(c_x sqrt(rho_x k) Z + c_y sqrt(rho_y k) Z~)^2]
    double imag2 = w.c_x * w.c_x * rx * k + w.c_y * w.c_y * ry * k +
                   2.0 * w.c_x * w.c_y * srxy * rxy * k;

    AmplificationReport rep;
    rep.xi = xi;
    rep.eta = eta;
    rep.moment2 = (real2 + imag2) / (denom * denom);
    rep.stable = rep.moment2 < 1.0;
    return rep;
}

double sup_moment2_lattice(const ModelParams& p, double k, double h_x, double h_y,
                           SchemeKind kind, int lattice_n) {
    if (lattice_n < 2) throw std::invalid_argument("sup_moment2_lattice: lattice too small");
    const double xi_max = std::numbers::pi / h_x;
    const double eta_max = std::numbers::pi / h_y;
    // symmetric integer-indexed lattice: the origin (moment identically 1) is
    // skipped exactly, the Nyquist endpoints are hit exactly
    const double half = 0.5 * (lattice_n - 1);
    double sup = 0.0;
    for (int a = 0; a < lattice_n; ++a) {
        const double xi = xi_max * ((a - half) / half);
        for (int b = 0; b < lattice_n; ++b) {
            const double eta = eta_max * ((b - half) / half);
            if (xi == 0.0 && eta == 0.0) continue;
            sup = std::max(sup,
                           amplification_moment2(p, k, h_x, h_y, xi, eta, kind).moment2);
        }
    }
    return sup;
}

std::vector<RegionCell> stability_region_sweep(const std::vector<ModelParams>& cells,
                                               double k, double h, SchemeKind kind,
                                               int lattice_n) {
    std::vector<RegionCell> out;
    out.reserve(cells.size());
    for (const auto& p : cells) {
        RegionCell c;
        c.rho_x = p.rho_x;
        c.rho_y = p.rho_y;
        c.rho_xy = p.rho_xy;
        c.assumption_pass = check_assumption(p).pass;
        c.sup_moment2 = sup_moment2_lattice(p, k, h, h, kind, lattice_n);
        c.stable = c.sup_moment2 < 1.0;
        out.push_back(c);
    }
    return out;
}

StabilityMargins margins(const ModelParams& p) {
    p.validate();
    const double ar = std::abs(p.rho_xy);
    const double e1 = 1.0 - p.rho_x;
    const double e2 = 1.0 - p.rho_y;
    const double e3 = 1.0 - 2.0 * p.rho_x * p.rho_x * (1.0 + 2.0 * ar);
    const double e4 = 1.0 - 2.0 * p.rho_y * p.rho_y * (1.0 + 2.0 * ar);
    const double e5 =
        1.0 - 2.0 * p.rho_x * p.rho_y * (1.0 + 2.0 * ar + 3.0 * p.rho_xy * p.rho_xy);
    const double beta = std::min({e1, e2, e3, e4, e5});
    if (!(beta > 0.0))
        throw std::domain_error("margins: correlation assumption violated (beta <= 0)");
    StabilityMargins m;
    m.beta = beta;
    m.theta0 = 1.0 - 0.5 * beta;
    m.theta = std::sqrt(m.theta0);
    return m;
}

double advisory_timestep(const ModelParams& p, double T, double h_min, double c0,
                         double beta_exp) {
    if (!(T > 0.0) || !(h_min > 0.0))
        throw std::invalid_argument("advisory_timestep: T and h_min must be positive");
    const StabilityMargins m = margins(p);
    const double denom = c0 + (4.0 + beta_exp) * std::log2(1.0 / h_min);
    if (!(denom > 0.0))
        throw std::invalid_argument("advisory_timestep: non-positive denominator");
    return T * std::log2(1.0 / m.theta) / denom;
}

}  // namespace zadi
