#include "zadi/stochastic.hpp"

#include <cmath>
#include <stdexcept>

namespace zadi {

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
}

double BrownianPath::terminal_m_x() const {
    double s = 0.0;
    for (const auto& st : steps) s += st.z_x;
    return std::sqrt(k) * s;
}

double BrownianPath::terminal_m_y() const {
    double s = 0.0;
    for (const auto& st : steps) s += st.z_y_tilde;
    return std::sqrt(k) * s;
}

BrownianPath draw_path(std::size_t n_steps, double rho_xy, std::uint64_t seed, double k) {
    if (n_steps < 1) throw std::invalid_argument("draw_path: n_steps must be >= 1");
    if (!(rho_xy >= -1.0 && rho_xy <= 1.0))
        throw std::invalid_argument("draw_path: rho_xy must lie in [-1,1]");
    BrownianPath path;
    path.seed = seed;
    path.k = k;
    path.steps.resize(n_steps);
    Rng rng(seed);
    const double c = std::sqrt(1.0 - rho_xy * rho_xy);
    for (auto& st : path.steps) {
        const double zx = rng.normal();
        const double zy = rng.normal();
        st.z_x = zx;
        st.z_y_tilde = rho_xy * zx + c * zy;
    }
    return path;
}

PathStep LevyAreaSample::coarse_step(double k) const {
    const double rk = 1.0 / std::sqrt(k);
    return PathStep{delta_w * rk, delta_b * rk};
}

static LevyAreaSample accumulate_sample(std::vector<double> dw, std::vector<double> db,
                                        int m_sub) {
    LevyAreaSample s;
    s.sub_steps = m_sub;
    s.dw = std::move(dw);
    s.db = std::move(db);
    double w_acc = 0.0, b_acc = 0.0, axy = 0.0, ayx = 0.0;
    for (int i = 0; i < m_sub; ++i) {
        axy += w_acc * s.db[i];
        ayx += b_acc * s.dw[i];
        w_acc += s.dw[i];
        b_acc += s.db[i];
    }
    s.a_xy = axy;
    s.a_yx = ayx;
    s.delta_w = w_acc;
    s.delta_b = b_acc;
    return s;
}

static void draw_sub_increments(std::vector<double>& dw, std::vector<double>& db,
                                double k, int m_sub, double rho, std::uint64_t seed) {
    if (m_sub < 1) throw std::invalid_argument("levy_area: m_sub must be >= 1");
    if (!(rho >= -1.0 && rho <= 1.0))
        throw std::invalid_argument("levy_area: rho must lie in [-1,1]");
    if (!(k > 0.0)) throw std::invalid_argument("levy_area: k must be positive");
    Rng rng(seed);
    const double sd = std::sqrt(k / m_sub);
    const double c = std::sqrt(1.0 - rho * rho);
    dw.resize(m_sub);
    db.resize(m_sub);
    for (int i = 0; i < m_sub; ++i) {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        dw[i] = sd * z1;
        db[i] = sd * (rho * z1 + c * z2);
    }
}

LevyAreaSample levy_area(double k, int m_sub, double rho, std::uint64_t seed) {
    std::vector<double> dw, db;
    draw_sub_increments(dw, db, k, m_sub, rho, seed);
    return accumulate_sample(std::move(dw), std::move(db), m_sub);
}

LevyAreaSample levy_area(const PathStep& step, double k, int m_sub, double rho,
                         std::uint64_t seed) {
    std::vector<double> dw, db;
    draw_sub_increments(dw, db, k, m_sub, rho, seed);
    const double sqrtk = std::sqrt(k);
    double sw = 0.0, sb = 0.0;
    for (int i = 0; i < m_sub; ++i) {
        sw += dw[i];
        sb += db[i];
    }
    const double cw = (sqrtk * step.z_x - sw) / m_sub;
    const double cb = (sqrtk * step.z_y_tilde - sb) / m_sub;
    for (int i = 0; i < m_sub; ++i) {
        dw[i] += cw;
        db[i] += cb;
    }
    return accumulate_sample(std::move(dw), std::move(db), m_sub);
}

int sub_step_count(double k) {
    if (!(k > 0.0)) throw std::invalid_argument("sub_step_count: k must be positive");
    const double m = std::ceil(1.0 / k);
    return m < 1.0 ? 1 : static_cast<int>(m);
}

double PathLattice::sum_dw(std::size_t first, std::size_t count) const {
    double s = 0.0;
    for (std::size_t i = first; i < first + count; ++i) s += dw[i];
    return s;
}

double PathLattice::sum_db(std::size_t first, std::size_t count) const {
    double s = 0.0;
    for (std::size_t i = first; i < first + count; ++i) s += db[i];
    return s;
}

double PathLattice::levy_xy(std::size_t first, std::size_t count) const {
    double w_acc = 0.0, a = 0.0;
    for (std::size_t i = first; i < first + count; ++i) {
        a += w_acc * db[i];
        w_acc += dw[i];
    }
    return a;
}

double PathLattice::levy_yx(std::size_t first, std::size_t count) const {
    double b_acc = 0.0, a = 0.0;
    for (std::size_t i = first; i < first + count; ++i) {
        a += b_acc * dw[i];
        b_acc += db[i];
    }
    return a;
}

PathLattice draw_lattice(std::size_t n_cells, double delta, double rho,
                         std::uint64_t seed) {
    if (n_cells < 1) throw std::invalid_argument("draw_lattice: n_cells must be >= 1");
    if (!(delta > 0.0)) throw std::invalid_argument("draw_lattice: delta must be positive");
    PathLattice lat;
    lat.delta = delta;
    lat.dw.resize(n_cells);
    lat.db.resize(n_cells);
    Rng rng(seed);
    const double sd = std::sqrt(delta);
    const double c = std::sqrt(1.0 - rho * rho);
    for (std::size_t i = 0; i < n_cells; ++i) {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        lat.dw[i] = sd * z1;
        lat.db[i] = sd * (rho * z1 + c * z2);
    }
    return lat;
}

}  // namespace zadi
