#pragma once

#include "zadi/model.hpp"

namespace zadi {

// Closed-form solution of the constant-coefficient SPDE with Dirac initial
// data at (x0,y0), given the terminal Brownian values m_x = M_T^x and
// m_y = M_T^y:
//
//           exp( -(x-x0-mu_x t-sqrt(rho_x) m_x)^2 / (2(1-rho_x)t)
//                -(y-y0-mu_y t-sqrt(rho_y) m_y)^2 / (2(1-rho_y)t) )
//  v(t,x,y)= -----------------------------------------------------
//                    2 pi sqrt((1-rho_x)(1-rho_y)) t
double exact_density(double t, double x, double y, const ModelParams& p,
                     double m_x, double m_y, double x0, double y0);

Field exact_field(const Grid2D& g, double t, const ModelParams& p,
                  double m_x, double m_y, double x0, double y0);

}  // namespace zadi
