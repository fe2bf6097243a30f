#pragma once

#include "zadi/model.hpp"

namespace zadi {

// The difference operators of the schemes, applied with zero ghost values.
// No mesh-width division: the 1/h scalings live in the scheme coefficients.
//
//   dx   : V[i+1,j] - V[i-1,j]            dy   : V[i,j+1] - V[i,j-1]
//   dxx  : V[i+1,j] - 2 V[i,j] + V[i-1,j] dyy  : analogous in j
//   dxy  : V[i+1,j+1] - V[i-1,j+1] - V[i+1,j-1] + V[i-1,j-1]
//   dx2  : V[i+2,j] - 2 V[i,j] + V[i-2,j] (the composition dx of dx)
//   dy2  : analogous in j
Field apply_dx(const Field& f);
Field apply_dy(const Field& f);
Field apply_dxx(const Field& f);
Field apply_dyy(const Field& f);
Field apply_dxy(const Field& f);
Field apply_dx2(const Field& f);
Field apply_dy2(const Field& f);

// Serial reference implementations, kept for parity tests and benchmarks.
namespace ref {
Field apply_dx(const Field& f);
Field apply_dy(const Field& f);
Field apply_dxx(const Field& f);
Field apply_dyy(const Field& f);
Field apply_dxy(const Field& f);
Field apply_dx2(const Field& f);
Field apply_dy2(const Field& f);
}  // namespace ref

// Thread control for the OpenMP kernels; 0 restores the runtime default.
void set_threads(int n);

}  // namespace zadi
