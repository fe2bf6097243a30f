#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "zadi/model.hpp"

namespace zadi {

struct TridiagSingularError : std::runtime_error {
    explicit TridiagSingularError(int row_, const std::string& what_)
        : std::runtime_error(what_), row(row_) {}
    int row;
};

struct IterationFailure : std::runtime_error {
    IterationFailure(const std::string& what_, double residual, int iters)
        : std::runtime_error(what_), last_residual(residual), iterations(iters) {}
    double last_residual;
    int iterations;
};

// Tridiagonal matrix; lower[0] and upper[n-1] are unused. Row-wise strict
// diagonal dominance is recorded at construction (the ADI factors satisfy it
// for the constant-coefficient schemes).
struct Tridiag {
    std::vector<double> lower, diag, upper;
    bool diagonally_dominant = false;

    Tridiag(std::vector<double> lo, std::vector<double> di, std::vector<double> up);
    int n() const { return static_cast<int>(diag.size()); }
};

// Thomas sweep. Throws TridiagSingularError when a pivot falls below
// 1e-14 times the row scale.
std::vector<double> thomas_solve(const Tridiag& m, std::span<const double> rhs);

// Pre-eliminated form for repeated solves against one matrix.
class TridiagFactor {
public:
    explicit TridiagFactor(const Tridiag& m);

    int n() const { return static_cast<int>(inv_piv_.size()); }
    // Solves in place; x may alias the rhs storage.
    void solve_inplace(double* x) const;

    const std::vector<double>& inv_piv() const { return inv_piv_; }
    const std::vector<double>& cs() const { return cs_; }
    const std::vector<double>& lower() const { return lower_; }

private:
    std::vector<double> inv_piv_, cs_, lower_;
};

// Batched ADI sweeps: every x-line (resp. y-line) of the field is replaced by
// the solution of the factored system along that line. Lines are independent.
void solve_rows_x(const TridiagFactor& f, Field& field);
void solve_cols_y(const TridiagFactor& f, Field& field);

namespace ref {
void solve_rows_x(const TridiagFactor& f, Field& field);
void solve_cols_y(const TridiagFactor& f, Field& field);
}  // namespace ref

using FieldOp = std::function<Field(const Field&)>;

// Restarted GMRES on fields, right-preconditioned when a preconditioner is
// supplied (the residual tested is then still the true residual).
// Returns V with ||apply_op(V) - rhs||_2 <= tol * ||rhs||_2, or throws
// IterationFailure carrying the last residual.
Field solve_unfactored(const FieldOp& apply_op, const Field& rhs, double tol,
                       int max_iter, const FieldOp* preconditioner = nullptr,
                       const Field* initial_guess = nullptr,
                       std::vector<double>* residual_log = nullptr);

}  // namespace zadi
