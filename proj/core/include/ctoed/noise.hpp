#pragma once

#include <cstdint>

#include "ctoed/sinogram.hpp"

namespace ctoed {

/// Additive Gaussian measurement noise.  The absolute scale is tied to the
/// phantom's clean full-angle sinogram: sigma = eta * mean(|clean|), so the
/// relative level is comparable across phantom sizes.
struct NoiseModel {
    double eta = 0.0;
    double sigma = 0.0;
    uint64_t seed = 0;
};

NoiseModel make_noise_model(const Sinogram& clean_full_sino, double eta,
                            uint64_t seed);

/// data' = data + N(0, sigma^2) i.i.d.  The noise for angle theta is a
/// function of (seed, theta, bin) only, so acquiring angles in any order
/// yields identical per-angle noise.
Sinogram add_noise(const Sinogram& sino, const NoiseModel& model);

}  // namespace ctoed
