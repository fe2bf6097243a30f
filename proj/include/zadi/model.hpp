#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace zadi {

// Parameters of the constant-coefficient SPDE
//   dv = -mu_x v_x dt - mu_y v_y dt
//        + 1/2 (v_xx + 2 sqrt(rho_x rho_y) rho_xy v_xy + v_yy) dt
//        - sqrt(rho_x) v_x dM^x - sqrt(rho_y) v_y dM^y.
struct ModelParams {
    double mu_x = 0.0;
    double mu_y = 0.0;
    double rho_x = 0.0;   // in [0,1)
    double rho_y = 0.0;   // in [0,1)
    double rho_xy = 0.0;  // in [-1,1]

    void validate() const;
};

// Uniform rectangular mesh on [x_min,x_max] x [y_min,y_max].
// Node coordinates are x_min + i*h_x, i = 0..n_x+1; the first and last node
// of each axis lie on the truncation boundary and carry the Dirichlet value 0.
// Interior nodes are addressed 0-based: interior index i corresponds to
// global node i+1.
struct Grid2D {
    double x_min, x_max, y_min, y_max;
    double h_x, h_y;
    int n_x, n_y;  // interior node counts

    static Grid2D from_counts(double x_min, double x_max,
                              double y_min, double y_max,
                              int n_x, int n_y);
    // Derives interior counts from the spacings; the bounds must be
    // commensurate with the mesh to 1e-12 relative.
    static Grid2D from_spacing(double x_min, double x_max,
                               double y_min, double y_max,
                               double h_x, double h_y);

    double x(int i) const { return x_min + (i + 1) * h_x; }
    double y(int j) const { return y_min + (j + 1) * h_y; }

    // Nearest interior index to a coordinate; throws std::domain_error if the
    // nearest node is a boundary node or lies outside the domain.
    int x_index(double xc) const;
    int y_index(double yc) const;

    bool operator==(const Grid2D&) const = default;
};

// Time discretisation: N steps of size k = T/N.
struct TimeGrid {
    double T;
    int N;
    double k;

    TimeGrid(double horizon, int steps);
};

// Interior-node solution snapshot, row-major with the y index fastest.
class Field {
public:
    explicit Field(const Grid2D& g)
        : grid_(g), v_(static_cast<std::size_t>(g.n_x) * g.n_y, 0.0) {}

    const Grid2D& grid() const { return grid_; }
    int nx() const { return grid_.n_x; }
    int ny() const { return grid_.n_y; }
    std::size_t size() const { return v_.size(); }

    double& operator()(int i, int j) { return v_[idx(i, j)]; }
    double operator()(int i, int j) const { return v_[idx(i, j)]; }

    // Ghost-aware read: everything outside the interior is 0 (the Dirichlet
    // boundary and the implicit zero layer beyond it).
    double at_or_zero(int i, int j) const {
        if (i < 0 || i >= grid_.n_x || j < 0 || j >= grid_.n_y) return 0.0;
        return v_[idx(i, j)];
    }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }

private:
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * grid_.n_y + j;
    }

    Grid2D grid_;
    std::vector<double> v_;
};

// Discrete integral sum(values) * h_x * h_y.
double mass(const Field& f);

double min_value(const Field& f);
double max_value(const Field& f);

// Point mass h_x^-1 h_y^-1 at the interior node nearest to (x0,y0).
// If (x0,y0) is farther than 1e-9*h from a node, a warning record is
// appended to *warnings (when given).
Field dirac_initial(const Grid2D& g, double x0, double y0,
                    std::vector<std::string>* warnings = nullptr);

// Gaussian density with mean (x0+mu_x, y0+mu_y) and variances
// (1-rho_x, 1-rho_y), sampled at the interior nodes.
Field gaussian_initial(const Grid2D& g, const ModelParams& p,
                       double x0, double y0);

}  // namespace zadi
