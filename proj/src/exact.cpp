#include "zadi/exact.hpp"

#include <cmath>
#include <numbers>

namespace zadi {

namespace {

struct DensityCore {
    double vx2, vy2;  // 2 (1-rho) t
    double cx, cy;    // Gaussian centre
    double norm;

    DensityCore(double t, const ModelParams& p, double m_x, double m_y, double x0,
                double y0)
        : vx2(2.0 * (1.0 - p.rho_x) * t),
          vy2(2.0 * (1.0 - p.rho_y) * t),
          cx(x0 + p.mu_x * t + std::sqrt(p.rho_x) * m_x),
          cy(y0 + p.mu_y * t + std::sqrt(p.rho_y) * m_y),
          norm(2.0 * std::numbers::pi * std::sqrt((1.0 - p.rho_x) * (1.0 - p.rho_y)) * t) {}

    double at(double x, double y) const {
        const double dx = x - cx;
        const double dy = y - cy;
        return std::exp(-dx * dx / vx2 - dy * dy / vy2) / norm;
    }
};

}  // namespace

double exact_density(double t, double x, double y, const ModelParams& p,
                     double m_x, double m_y, double x0, double y0) {
    if (!(t > 0.0)) throw std::domain_error("exact_density: t must be positive");
    p.validate();
    return DensityCore(t, p, m_x, m_y, x0, y0).at(x, y);
}

Field exact_field(const Grid2D& g, double t, const ModelParams& p,
                  double m_x, double m_y, double x0, double y0) {
    if (!(t > 0.0)) throw std::domain_error("exact_field: t must be positive");
    p.validate();
    const DensityCore core(t, p, m_x, m_y, x0, y0);
    Field f(g);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < g.n_x; ++i) {
        const double x = g.x(i);
        for (int j = 0; j < g.n_y; ++j) f(i, j) = core.at(x, g.y(j));
    }
    return f;
}

}  // namespace zadi
