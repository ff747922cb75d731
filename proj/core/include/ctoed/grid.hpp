#pragma once

#include <cstddef>
#include <vector>

namespace ctoed {

/// Square image grid, row-major doubles.  Pixel (r, c) maps to physical
/// coordinates x = c - (n-1)/2, y = r - (n-1)/2 (unit pixel pitch).
struct Image {
    int n = 0;
    std::vector<double> v;

    Image() = default;
    explicit Image(int side)
        : n(side), v(static_cast<size_t>(side) * side, 0.0) {}

    double& at(int r, int c) { return v[static_cast<size_t>(r) * n + c]; }
    double at(int r, int c) const { return v[static_cast<size_t>(r) * n + c]; }
    size_t size() const { return v.size(); }

    bool same_shape(const Image& o) const { return n == o.n; }
};

}  // namespace ctoed
