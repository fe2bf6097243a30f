#include "zadi/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace zadi {

void ModelParams::validate() const {
    if (!(rho_x >= 0.0 && rho_x < 1.0))
        throw std::invalid_argument("rho_x must lie in [0,1)");
    if (!(rho_y >= 0.0 && rho_y < 1.0))
        throw std::invalid_argument("rho_y must lie in [0,1)");
    if (!(rho_xy >= -1.0 && rho_xy <= 1.0))
        throw std::invalid_argument("rho_xy must lie in [-1,1]");
    if (!std::isfinite(mu_x) || !std::isfinite(mu_y))
        throw std::invalid_argument("drift parameters must be finite");
}

static void check_axis(double lo, double hi, double h, int n, const char* axis) {
    if (h <= 0.0) throw std::invalid_argument(std::string("non-positive mesh width on ") + axis);
    if (n < 1) throw std::invalid_argument(std::string("no interior nodes on ") + axis);
    const double span = hi - lo;
    const double rebuilt = (n + 1) * h;
    if (std::abs(rebuilt - span) > 1e-12 * std::max(std::abs(span), 1.0)) {
        std::ostringstream os;
        os << "bounds not commensurate with mesh on " << axis << ": (" << lo << "," << hi
           << ") vs " << n << "+1 steps of " << h;
        throw std::invalid_argument(os.str());
    }
}

Grid2D Grid2D::from_counts(double x_min, double x_max, double y_min, double y_max,
                           int n_x, int n_y) {
    if (n_x < 1 || n_y < 1) throw std::invalid_argument("interior node counts must be positive");
    if (!(x_max > x_min) || !(y_max > y_min))
        throw std::invalid_argument("degenerate domain bounds");
    Grid2D g{x_min, x_max, y_min, y_max,
             (x_max - x_min) / (n_x + 1), (y_max - y_min) / (n_y + 1), n_x, n_y};
    return g;
}

Grid2D Grid2D::from_spacing(double x_min, double x_max, double y_min, double y_max,
                            double h_x, double h_y) {
    if (!(h_x > 0.0) || !(h_y > 0.0)) throw std::invalid_argument("mesh widths must be positive");
    const int n_x = static_cast<int>(std::lround((x_max - x_min) / h_x)) - 1;
    const int n_y = static_cast<int>(std::lround((y_max - y_min) / h_y)) - 1;
    check_axis(x_min, x_max, h_x, n_x, "x");
    check_axis(y_min, y_max, h_y, n_y, "y");
    return Grid2D{x_min, x_max, y_min, y_max, h_x, h_y, n_x, n_y};
}

int Grid2D::x_index(double xc) const {
    const long g = std::lround((xc - x_min) / h_x);
    if (g < 1 || g > n_x)
        throw std::domain_error("x coordinate outside the open domain");
    return static_cast<int>(g) - 1;
}

int Grid2D::y_index(double yc) const {
    const long g = std::lround((yc - y_min) / h_y);
    if (g < 1 || g > n_y)
        throw std::domain_error("y coordinate outside the open domain");
    return static_cast<int>(g) - 1;
}

TimeGrid::TimeGrid(double horizon, int steps) : T(horizon), N(steps), k(horizon / steps) {
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (steps < 0) throw std::invalid_argument("negative step count");
    if (steps == 0) k = 0.0;
}

double mass(const Field& f) {
    const double* v = f.data();
    const std::size_t n = f.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s * f.grid().h_x * f.grid().h_y;
}

double min_value(const Field& f) {
    double m = std::numeric_limits<double>::infinity();
    const double* v = f.data();
    for (std::size_t i = 0; i < f.size(); ++i) m = std::min(m, v[i]);
    return m;
}

double max_value(const Field& f) {
    double m = -std::numeric_limits<double>::infinity();
    const double* v = f.data();
    for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, v[i]);
    return m;
}

Field dirac_initial(const Grid2D& g, double x0, double y0,
                    std::vector<std::string>* warnings) {
    const int i0 = g.x_index(x0);  // throws if outside
    const int j0 = g.y_index(y0);
    if (warnings) {
        const double dx = std::abs(x0 - g.x(i0));
        const double dy = std::abs(y0 - g.y(j0));
        if (dx > 1e-9 * g.h_x || dy > 1e-9 * g.h_y) {
            std::ostringstream os;
            os << "dirac_initial: (" << x0 << "," << y0 << ") is off-grid; snapped to node ("
               << g.x(i0) << "," << g.y(j0) << ")";
            warnings->push_back(os.str());
        }
    }
    Field f(g);
    f(i0, j0) = 1.0 / (g.h_x * g.h_y);
    return f;
}

Field gaussian_initial(const Grid2D& g, const ModelParams& p, double x0, double y0) {
    p.validate();
    const double vx = 1.0 - p.rho_x;
    const double vy = 1.0 - p.rho_y;
    const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(vx * vy));
    const double cx = x0 + p.mu_x;
    const double cy = y0 + p.mu_y;
    Field f(g);
    for (int i = 0; i < g.n_x; ++i) {
        const double dx = g.x(i) - cx;
        const double ex = dx * dx / (2.0 * vx);
        for (int j = 0; j < g.n_y; ++j) {
            const double dy = g.y(j) - cy;
            f(i, j) = norm * std::exp(-ex - dy * dy / (2.0 * vy));
        }
    }
    return f;
}

}  // namespace zadi
