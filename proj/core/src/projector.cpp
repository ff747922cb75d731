#include "ctoed/projector.hpp"

#include <cmath>
#include <unordered_set>

#include "ctoed/errors.hpp"

namespace ctoed {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Projector::Projector(int grid, Geometry geom) : grid_(grid), geom_(geom) {
    if (geom_.n_detector == 0) geom_.n_detector = grid;
    const int ndet = geom_.n_detector;
    const double half = (grid - 1) / 2.0;
    const double det_half = (ndet - 1) / 2.0;

    splats_.resize(geom_.n_angles_total);
    for (int a = 0; a < geom_.n_angles_total; ++a) {
        const double th = a * kPi / 180.0;
        const double c = std::cos(th), s = std::sin(th);
        auto& tbl = splats_[a];
        tbl.resize(static_cast<size_t>(grid) * grid);
        size_t p = 0;
        for (int r = 0; r < grid; ++r) {
            const double y = r - half;
            for (int col = 0; col < grid; ++col, ++p) {
                const double x = col - half;
                const double t =
                    (x * c + y * s) / geom_.detector_spacing + det_half;
                const int bin = static_cast<int>(std::floor(t));
                if (bin < -1 || bin >= ndet) continue;  // off the detector
                tbl[p].bin = bin;
                tbl[p].w_lo = static_cast<float>(1.0 - (t - bin));
            }
        }
    }
}

void Projector::validate_angles(const std::vector<int>& angles) const {
    if (angles.empty()) throw EmptyAngleSet("projection needs at least one angle");
    std::unordered_set<int> seen;
    for (int a : angles) {
        if (a < 0 || a >= geom_.n_angles_total)
            throw EmptyAngleSet("angle index out of range: " + std::to_string(a));
        if (!seen.insert(a).second)
            throw DuplicateAngle("duplicate angle: " + std::to_string(a));
    }
}

Sinogram Projector::project(const Image& img, const std::vector<int>& angles) const {
    validate_angles(angles);
    if (img.n != grid_) throw ShapeMismatch("image side does not match projector grid");
    const int ndet = geom_.n_detector;
    Sinogram sino(angles, ndet);
    for (int i = 0; i < sino.n_angles(); ++i) {
        const auto& tbl = splats_[angles[i]];
        double* out = sino.row(i);
        for (size_t p = 0; p < tbl.size(); ++p) {
            const double v = img.v[p];
            if (v == 0.0) continue;
            const int bin = tbl[p].bin;
            if (bin == -2) continue;
            const double w = tbl[p].w_lo;
            if (bin >= 0) out[bin] += w * v;
            if (bin + 1 < ndet) out[bin + 1] += (1.0 - w) * v;
        }
    }
    return sino;
}

Image Projector::backproject(const Sinogram& sino) const {
    validate_angles(sino.angles);
    if (sino.n_detector != geom_.n_detector)
        throw ShapeMismatch("sinogram detector count does not match geometry");
    const int ndet = geom_.n_detector;
    Image img(grid_);
    for (int i = 0; i < sino.n_angles(); ++i) {
        const auto& tbl = splats_[sino.angles[i]];
        const double* in = sino.row(i);
        for (size_t p = 0; p < tbl.size(); ++p) {
            const int bin = tbl[p].bin;
            if (bin == -2) continue;
            const double w = tbl[p].w_lo;
            double acc = 0.0;
            if (bin >= 0) acc += w * in[bin];
            if (bin + 1 < ndet) acc += (1.0 - w) * in[bin + 1];
            img.v[p] += acc;
        }
    }
    return img;
}

std::vector<double> Projector::row_sums(const std::vector<int>& angles) const {
    validate_angles(angles);
    const int ndet = geom_.n_detector;
    std::vector<double> sums(angles.size() * static_cast<size_t>(ndet), 0.0);
    for (size_t i = 0; i < angles.size(); ++i) {
        const auto& tbl = splats_[angles[i]];
        double* out = sums.data() + i * ndet;
        for (size_t p = 0; p < tbl.size(); ++p) {
            const int bin = tbl[p].bin;
            if (bin == -2) continue;
            const double w = tbl[p].w_lo;
            if (bin >= 0) out[bin] += w;
            if (bin + 1 < ndet) out[bin + 1] += (1.0 - w);
        }
    }
    return sums;
}

Image Projector::column_sums(const std::vector<int>& angles) const {
    validate_angles(angles);
    const int ndet = geom_.n_detector;
    Image img(grid_);
    for (int a : angles) {
        const auto& tbl = splats_[a];
        for (size_t p = 0; p < tbl.size(); ++p) {
            const int bin = tbl[p].bin;
            if (bin == -2) continue;
            const double w = tbl[p].w_lo;
            double acc = 0.0;
            if (bin >= 0) acc += w;
            if (bin + 1 < ndet) acc += (1.0 - w);
            img.v[p] += acc;
        }
    }
    return img;
}

}  // namespace ctoed
