#pragma once

#include <vector>

#include "ctoed/grid.hpp"
#include "ctoed/projector.hpp"
#include "ctoed/sinogram.hpp"

namespace ctoed {

struct SirtOptions {
    int iterations = 150;
    double relaxation = 1.0;
};

/// SIRT with a non-negativity constraint:
///
///     x <- clamp+( x + relax * C A^T R (y - A x) )
///
/// R = diag(1 / row sums of A), C = diag(1 / column sums of A); zero-sum
/// rows and columns are excluded.  x0 defaults to the zero image.
/// `residual_l2`, when given, receives ||A x - y||_2 evaluated before the
/// first update and after every iteration.
Image sirt_reconstruct(const Projector& proj, const Sinogram& sino,
                       SirtOptions opt = {}, const Image* x0 = nullptr,
                       std::vector<double>* residual_l2 = nullptr);

}  // namespace ctoed
