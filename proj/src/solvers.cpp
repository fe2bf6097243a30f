#include "zadi/solvers.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

namespace zadi {

Tridiag::Tridiag(std::vector<double> lo, std::vector<double> di, std::vector<double> up)
    : lower(std::move(lo)), diag(std::move(di)), upper(std::move(up)) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n)
        throw std::invalid_argument("Tridiag: band lengths must match");
    if (n == 0) throw std::invalid_argument("Tridiag: empty system");
    diagonally_dominant = true;
    for (std::size_t i = 0; i < n; ++i) {
        const double off = (i > 0 ? std::abs(lower[i]) : 0.0) +
                           (i + 1 < n ? std::abs(upper[i]) : 0.0);
        if (!(std::abs(diag[i]) > off)) {
            diagonally_dominant = false;
            break;
        }
    }
}

static void throw_singular(int row, double pivot) {
    std::ostringstream os;
    os << "tridiagonal solve: near-zero pivot " << pivot << " in row " << row;
    throw TridiagSingularError(row, os.str());
}

std::vector<double> thomas_solve(const Tridiag& m, std::span<const double> rhs) {
    const int n = m.n();
    if (static_cast<int>(rhs.size()) != n)
        throw std::invalid_argument("thomas_solve: rhs length mismatch");
    std::vector<double> cs(n, 0.0), x(n);
    double piv = m.diag[0];
    double scale = std::abs(m.diag[0]) + (n > 1 ? std::abs(m.upper[0]) : 0.0);
    if (std::abs(piv) < 1e-14 * (scale > 0.0 ? scale : 1.0)) throw_singular(0, piv);
    cs[0] = (n > 1 ? m.upper[0] / piv : 0.0);
    x[0] = rhs[0] / piv;
    for (int i = 1; i < n; ++i) {
        piv = m.diag[i] - m.lower[i] * cs[i - 1];
        scale = std::abs(m.lower[i]) + std::abs(m.diag[i]) +
                (i + 1 < n ? std::abs(m.upper[i]) : 0.0);
        if (std::abs(piv) < 1e-14 * (scale > 0.0 ? scale : 1.0)) throw_singular(i, piv);
        if (i + 1 < n) cs[i] = m.upper[i] / piv;
        x[i] = (rhs[i] - m.lower[i] * x[i - 1]) / piv;
    }
    for (int i = n - 2; i >= 0; --i) x[i] -= cs[i] * x[i + 1];
    return x;
}

TridiagFactor::TridiagFactor(const Tridiag& m) {
    const int n = m.n();
    inv_piv_.resize(n);
    cs_.assign(n, 0.0);
    lower_ = m.lower;
    double piv = m.diag[0];
    double scale = std::abs(m.diag[0]) + (n > 1 ? std::abs(m.upper[0]) : 0.0);
    if (std::abs(piv) < 1e-14 * (scale > 0.0 ? scale : 1.0)) throw_singular(0, piv);
    inv_piv_[0] = 1.0 / piv;
    if (n > 1) cs_[0] = m.upper[0] / piv;
    for (int i = 1; i < n; ++i) {
        piv = m.diag[i] - m.lower[i] * cs_[i - 1];
        scale = std::abs(m.lower[i]) + std::abs(m.diag[i]) +
                (i + 1 < n ? std::abs(m.upper[i]) : 0.0);
        if (std::abs(piv) < 1e-14 * (scale > 0.0 ? scale : 1.0)) throw_singular(i, piv);
        inv_piv_[i] = 1.0 / piv;
        if (i + 1 < n) cs_[i] = m.upper[i] / piv;
    }
}

void TridiagFactor::solve_inplace(double* x) const {
    const int n = this->n();
    x[0] *= inv_piv_[0];
    for (int i = 1; i < n; ++i) x[i] = (x[i] - lower_[i] * x[i - 1]) * inv_piv_[i];
    for (int i = n - 2; i >= 0; --i) x[i] -= cs_[i] * x[i + 1];
}

namespace {

// x-lines are strided (layout keeps j fastest), so the ny systems advance in
// lockstep: the inner loops over j stay unit-stride.
void rows_x_impl(const TridiagFactor& f, Field& field) {
    const int nx = field.nx(), ny = field.ny();
    double* v = field.data();
    const auto& lo = f.lower();
    const auto& ip = f.inv_piv();
    const auto& cs = f.cs();
    {
        const double ip0 = ip[0];
        double* row0 = v;
        for (int j = 0; j < ny; ++j) row0[j] *= ip0;
    }
    for (int i = 1; i < nx; ++i) {
        const double li = lo[i], ipi = ip[i];
        double* row = v + static_cast<std::size_t>(i) * ny;
        const double* prev = row - ny;
        for (int j = 0; j < ny; ++j) row[j] = (row[j] - li * prev[j]) * ipi;
    }
    for (int i = nx - 2; i >= 0; --i) {
        const double ci = cs[i];
        double* row = v + static_cast<std::size_t>(i) * ny;
        const double* next = row + ny;
        for (int j = 0; j < ny; ++j) row[j] -= ci * next[j];
    }
}

void cols_y_line(const TridiagFactor& f, double* line) { f.solve_inplace(line); }

}  // namespace

void solve_rows_x(const TridiagFactor& f, Field& field) {
    if (f.n() != field.nx()) throw std::invalid_argument("solve_rows_x: size mismatch");
    rows_x_impl(f, field);
}

void solve_cols_y(const TridiagFactor& f, Field& field) {
    if (f.n() != field.ny()) throw std::invalid_argument("solve_cols_y: size mismatch");
    const int nx = field.nx(), ny = field.ny();
    double* v = field.data();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nx; ++i) cols_y_line(f, v + static_cast<std::size_t>(i) * ny);
}

namespace ref {

void solve_rows_x(const TridiagFactor& f, Field& field) {
    if (f.n() != field.nx()) throw std::invalid_argument("solve_rows_x: size mismatch");
    rows_x_impl(f, field);
}

void solve_cols_y(const TridiagFactor& f, Field& field) {
    if (f.n() != field.ny()) throw std::invalid_argument("solve_cols_y: size mismatch");
    const int nx = field.nx(), ny = field.ny();
    double* v = field.data();
    for (int i = 0; i < nx; ++i) cols_y_line(f, v + static_cast<std::size_t>(i) * ny);
}

}  // namespace ref

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

Field solve_unfactored(const FieldOp& apply_op, const Field& rhs, double tol,
                       int max_iter, const FieldOp* preconditioner,
                       const Field* initial_guess, std::vector<double>* residual_log) {
    const std::size_t n = rhs.size();
    const int restart = 30;

    auto to_vec = [&](const Field& f) {
        return std::vector<double>(f.data(), f.data() + n);
    };
    auto to_field = [&](const std::vector<double>& v) {
        Field f(rhs.grid());
        std::memcpy(f.data(), v.data(), n * sizeof(double));
        return f;
    };
    auto apply_true = [&](const std::vector<double>& v) { return to_vec(apply_op(to_field(v))); };
    auto apply_prec = [&](const std::vector<double>& v) {
        if (!preconditioner) return to_field(v);
        return (*preconditioner)(to_field(v));
    };

    const std::vector<double> b = to_vec(rhs);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) return Field(rhs.grid());

    // iterate kept in true coordinates; each cycle solves for a correction
    // through the (right) preconditioner
    std::vector<double> x = initial_guess ? to_vec(*initial_guess)
                                          : std::vector<double>(n, 0.0);

    int total_iters = 0;
    double last_rel = std::numeric_limits<double>::infinity();

    while (true) {
        std::vector<double> r = apply_true(x);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
        const double beta = norm2(r);
        last_rel = beta / bnorm;
        if (residual_log) residual_log->push_back(beta);
        if (last_rel <= tol) return to_field(x);
        if (total_iters >= max_iter) break;

        std::vector<std::vector<double>> v;
        v.reserve(restart + 1);
        for (auto& e : r) e /= beta;
        v.push_back(std::move(r));

        std::vector<double> h((restart + 1) * restart, 0.0);
        std::vector<double> cs_g(restart), sn_g(restart), g(restart + 1, 0.0);
        g[0] = beta;
        int m = 0;
        for (int j = 0; j < restart && total_iters < max_iter; ++j, ++total_iters) {
            std::vector<double> w = to_vec(apply_op(apply_prec(v[j])));
            for (int i = 0; i <= j; ++i) {
                const double hij = dot(w, v[i]);
                h[i * restart + j] = hij;
                for (std::size_t q = 0; q < n; ++q) w[q] -= hij * v[i][q];
            }
            const double hj1 = norm2(w);
            h[(j + 1) * restart + j] = hj1;
            bool breakdown = (hj1 == 0.0);
            if (!breakdown) {
                for (auto& e : w) e /= hj1;
                v.push_back(std::move(w));
            }
            // Givens rotations keep H upper triangular
            for (int i = 0; i < j; ++i) {
                const double t = cs_g[i] * h[i * restart + j] + sn_g[i] * h[(i + 1) * restart + j];
                h[(i + 1) * restart + j] =
                    -sn_g[i] * h[i * restart + j] + cs_g[i] * h[(i + 1) * restart + j];
                h[i * restart + j] = t;
            }
            const double denom = std::hypot(h[j * restart + j], h[(j + 1) * restart + j]);
            cs_g[j] = h[j * restart + j] / denom;
            sn_g[j] = h[(j + 1) * restart + j] / denom;
            h[j * restart + j] = denom;
            h[(j + 1) * restart + j] = 0.0;
            g[j + 1] = -sn_g[j] * g[j];
            g[j] = cs_g[j] * g[j];
            m = j + 1;
            last_rel = std::abs(g[j + 1]) / bnorm;
            if (residual_log) residual_log->push_back(std::abs(g[j + 1]));
            if (last_rel <= tol || breakdown) break;
        }
        // back substitution for the LS solution on the Krylov basis
        std::vector<double> y(m, 0.0);
        for (int i = m - 1; i >= 0; --i) {
            double s = g[i];
            for (int q = i + 1; q < m; ++q) s -= h[i * restart + q] * y[q];
            y[i] = s / h[i * restart + i];
        }
        std::vector<double> z(n, 0.0);
        for (int i = 0; i < m; ++i)
            for (std::size_t q = 0; q < n; ++q) z[q] += y[i] * v[i][q];
        const std::vector<double> d = to_vec(apply_prec(z));
        for (std::size_t q = 0; q < n; ++q) x[q] += d[q];
    }

    std::ostringstream os;
    os << "solve_unfactored: no convergence in " << total_iters
       << " iterations, relative residual " << last_rel;
    throw IterationFailure(os.str(), last_rel * bnorm, total_iters);
}

}  // namespace zadi
