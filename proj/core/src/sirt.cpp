#include "ctoed/sirt.hpp"

#include <cmath>

#include "ctoed/errors.hpp"

namespace ctoed {

Image sirt_reconstruct(const Projector& proj, const Sinogram& sino,
                       SirtOptions opt, const Image* x0,
                       std::vector<double>* residual_l2) {
    if (sino.angles.empty()) throw EmptySinogram("sirt: sinogram has no angles");
    if (opt.iterations < 1) throw EmptySinogram("sirt: iterations must be >= 1");

    auto row = proj.row_sums(sino.angles);
    Image col = proj.column_sums(sino.angles);
    for (auto& r : row) r = (r > 0.0) ? 1.0 / r : 0.0;
    for (auto& c : col.v) c = (c > 0.0) ? opt.relaxation / c : 0.0;

    Image x = x0 ? *x0 : Image(proj.grid());
    if (x.n != proj.grid()) throw ShapeMismatch("sirt: x0 side mismatch");

    if (residual_l2) residual_l2->clear();
    for (int it = 0; it < opt.iterations; ++it) {
        Sinogram fwd = proj.project(x, sino.angles);
        double res = 0.0;
        for (size_t i = 0; i < fwd.data.size(); ++i) {
            double d = sino.data[i] - fwd.data[i];
            res += d * d;
            fwd.data[i] = d * row[i];
        }
        if (residual_l2) residual_l2->push_back(std::sqrt(res));
        Image corr = proj.backproject(fwd);
        for (size_t p = 0; p < x.v.size(); ++p) {
            double nx = x.v[p] + col.v[p] * corr.v[p];
            x.v[p] = nx > 0.0 ? nx : 0.0;
        }
    }
    if (residual_l2) {
        Sinogram fwd = proj.project(x, sino.angles);
        double res = 0.0;
        for (size_t i = 0; i < fwd.data.size(); ++i) {
            double d = sino.data[i] - fwd.data[i];
            res += d * d;
        }
        residual_l2->push_back(std::sqrt(res));
    }
    return x;
}

}  // namespace ctoed
