#include "ctoed/noise.hpp"

#include <cmath>

#include "ctoed/rng.hpp"

namespace ctoed {

NoiseModel make_noise_model(const Sinogram& clean_full_sino, double eta,
                            uint64_t seed) {
    NoiseModel m;
    m.eta = eta;
    m.seed = seed;
    double acc = 0.0;
    for (double v : clean_full_sino.data) acc += std::abs(v);
    double mean = clean_full_sino.data.empty()
                      ? 0.0
                      : acc / static_cast<double>(clean_full_sino.data.size());
    m.sigma = eta * mean;
    return m;
}

Sinogram add_noise(const Sinogram& sino, const NoiseModel& model) {
    Sinogram out = sino;
    out.noise_level = model.eta;
    out.noise_seed = model.seed;
    if (model.eta == 0.0 || model.sigma == 0.0) return out;
    for (int i = 0; i < out.n_angles(); ++i) {
        Rng rng(mix_seed(model.seed, static_cast<uint64_t>(out.angles[i])));
        double* row = out.row(i);
        for (int j = 0; j < out.n_detector; ++j)
            row[j] += model.sigma * rng.normal();
    }
    return out;
}

}  // namespace ctoed
