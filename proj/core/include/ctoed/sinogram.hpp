#pragma once

#include <cstdint>
#include <vector>

namespace ctoed {

/// Parallel-beam acquisition layout: one-degree angle grid 0..179,
/// detector bins centered on the image with unit spacing.
struct Geometry {
    int n_angles_total = 180;
    int n_detector = 0;
    double detector_spacing = 1.0;
};

/// Per-angle detector measurements.  Row i holds the line integrals for
/// angles[i]; rows are ordered, angles distinct.
struct Sinogram {
    std::vector<int> angles;
    int n_detector = 0;
    std::vector<double> data;  // angles.size() x n_detector, row-major
    double noise_level = 0.0;  // eta
    uint64_t noise_seed = 0;

    Sinogram() = default;
    Sinogram(std::vector<int> angle_list, int bins)
        : angles(std::move(angle_list)),
          n_detector(bins),
          data(angles.size() * static_cast<size_t>(bins), 0.0) {}

    int n_angles() const { return static_cast<int>(angles.size()); }

    double& at(int row, int bin) {
        return data[static_cast<size_t>(row) * n_detector + bin];
    }
    double at(int row, int bin) const {
        return data[static_cast<size_t>(row) * n_detector + bin];
    }

    const double* row(int i) const {
        return data.data() + static_cast<size_t>(i) * n_detector;
    }
    double* row(int i) {
        return data.data() + static_cast<size_t>(i) * n_detector;
    }
};

}  // namespace ctoed
