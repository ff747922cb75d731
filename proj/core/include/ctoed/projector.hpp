#pragma once

#include <vector>

#include "ctoed/grid.hpp"
#include "ctoed/sinogram.hpp"

namespace ctoed {

/// Parallel-beam projector on the one-degree angle grid.
///
/// Pixel-driven linear splat: pixel p at centered coordinates (x, y)
/// projects onto the detector at s = x cos(theta) + y sin(theta) and its
/// value is split linearly between the two adjacent bins.  The splat
/// weights are precomputed once per angle, and backproject() applies the
/// exact transpose of project(), so
///
///     <A x, y> == <x, A^T y>
///
/// holds to machine precision -- the contract SIRT's convergence relies on.
class Projector {
  public:
    Projector(int grid, Geometry geom);

    /// Line integrals of `img` for the given distinct angles (degrees).
    Sinogram project(const Image& img, const std::vector<int>& angles) const;

    /// Exact adjoint of project() for the sinogram's angle set.
    Image backproject(const Sinogram& sino) const;

    /// Row sums of the system matrix, one value per (angle row, bin).
    std::vector<double> row_sums(const std::vector<int>& angles) const;

    /// Column sums of the system matrix, one value per pixel.
    Image column_sums(const std::vector<int>& angles) const;

    int grid() const { return grid_; }
    const Geometry& geometry() const { return geom_; }

  private:
    struct Splat {
        int bin = -2;  // low tap; -2 = fully off-detector
        float w_lo = 0.0f;
    };

    void validate_angles(const std::vector<int>& angles) const;

    int grid_ = 0;
    Geometry geom_;
    std::vector<std::vector<Splat>> splats_;  // [angle][pixel]
};

}  // namespace ctoed
