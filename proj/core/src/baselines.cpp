#include "ctoed/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "ctoed/errors.hpp"
#include "ctoed/metrics.hpp"

namespace ctoed {

namespace {

constexpr int kAngles = 180;

int nearest_unused(int wanted, const std::vector<uint8_t>& used) {
    for (int d = 0; d < kAngles; ++d) {
        int up = (wanted + d) % kAngles;
        if (!used[up]) return up;
        int down = ((wanted - d) % kAngles + kAngles) % kAngles;
        if (!used[down]) return down;
    }
    return -1;
}

AngleSequence rounded_sequence(PolicyKind kind, int n, double increment,
                               double offset) {
    if (n < 0 || n > kAngles)
        throw EmptyAngleSet("sequence length must be in [0, 180]");
    AngleSequence seq{kind, {}};
    std::vector<uint8_t> used(kAngles, 0);
    for (int k = 0; k < n; ++k) {
        int wanted = static_cast<int>(
                         std::llround(offset + k * increment)) %
                     kAngles;
        wanted = (wanted + kAngles) % kAngles;
        int a = nearest_unused(wanted, used);
        used[a] = 1;
        seq.angles.push_back(a);
    }
    return seq;
}

}  // namespace

AngleSequence golden_ratio_sequence(int n, int start_offset) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    return rounded_sequence(PolicyKind::GoldenRatio, n, 180.0 / phi,
                            start_offset);
}

AngleSequence uniform_sequence(int n) {
    if (n < 1 || n > kAngles)
        throw EmptyAngleSet("uniform sequence needs n in [1, 180]");
    return rounded_sequence(PolicyKind::Uniform, n, 180.0 / n, 0.0);
}

AngleSequence greedy_exhaustive(const Projector& proj, const Phantom& phantom,
                                const NoiseModel& noise, int n,
                                SirtOptions sirt, int threads) {
    std::vector<int> all(kAngles);
    std::iota(all.begin(), all.end(), 0);
    Sinogram noisy = add_noise(proj.project(phantom.image, all), noise);

    AngleSequence seq{PolicyKind::GreedyExhaustive, {}};
    std::vector<uint8_t> used(kAngles, 0);

    auto psnr_with = [&](const std::vector<int>& chosen, int extra) {
        std::vector<int> angles = chosen;
        angles.push_back(extra);
        std::sort(angles.begin(), angles.end());
        Sinogram sub(angles, noisy.n_detector);
        for (size_t i = 0; i < angles.size(); ++i) {
            const double* src = noisy.row(angles[i]);
            double* dst = sub.row(static_cast<int>(i));
            for (int j = 0; j < sub.n_detector; ++j) dst[j] = src[j];
        }
        Image rec = sirt_reconstruct(proj, sub, sirt);
        return psnr(rec, phantom.image).psnr;
    };

    for (int step = 0; step < n; ++step) {
        std::vector<double> score(kAngles,
                                  -std::numeric_limits<double>::infinity());
        if (threads <= 1) {
            for (int a = 0; a < kAngles; ++a)
                if (!used[a]) score[a] = psnr_with(seq.angles, a);
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < threads; ++t) {
                pool.emplace_back([&, t] {
                    for (int a = t; a < kAngles; a += threads)
                        if (!used[a]) score[a] = psnr_with(seq.angles, a);
                });
            }
            for (auto& th : pool) th.join();
        }
        // lowest index wins ties, keeping prefixes deterministic
        int best = -1;
        for (int a = 0; a < kAngles; ++a)
            if (best < 0 || score[a] > score[best]) best = a;
        used[best] = 1;
        seq.angles.push_back(best);
    }
    return seq;
}

}  // namespace ctoed
