#pragma once

#include <vector>

#include "ctoed/noise.hpp"
#include "ctoed/phantom.hpp"
#include "ctoed/projector.hpp"
#include "ctoed/sirt.hpp"

namespace ctoed {

enum class PolicyKind { GoldenRatio, Uniform, GreedyExhaustive };

struct AngleSequence {
    PolicyKind policy_kind;
    std::vector<int> angles;  // ordered, distinct, in [0, 180)
};

/// theta_k = round(k * 180/phi) mod 180 with phi the golden ratio; on a
/// collision the nearest unused integer angle is taken (ties toward the
/// +d direction).  Prefix-consistent: sequence(n) is a prefix of
/// sequence(n+1).
AngleSequence golden_ratio_sequence(int n, int start_offset = 0);

/// round(i * 180/n) mod 180, deduplicated by the same nearest-unused rule.
AngleSequence uniform_sequence(int n);

/// Step k picks the unused angle maximizing PSNR of the SIRT
/// reconstruction after adding it (180 reconstructions per step).
/// Deterministic given (phantom, noise); candidate sweeps may be spread
/// over `threads` workers with a fixed argmax reduction.
AngleSequence greedy_exhaustive(const Projector& proj, const Phantom& phantom,
                                const NoiseModel& noise, int n,
                                SirtOptions sirt = {}, int threads = 1);

}  // namespace ctoed
