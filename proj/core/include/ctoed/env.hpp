#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ctoed/grid.hpp"
#include "ctoed/noise.hpp"
#include "ctoed/phantom.hpp"
#include "ctoed/projector.hpp"
#include "ctoed/sirt.hpp"

namespace ctoed {

struct RewardSpec {
    double cost_b = 0.5;  // per-step cost magnitude; reward is -cost_b
};

/// Belief state of the sequential scan: the SIRT reconstruction over the
/// acquired angle set.  step == |mask| + 1; step 1 is the zero image.
struct ReconState {
    Image image;
    std::vector<uint8_t> mask;  // one flag per angle index
    int step = 1;
    std::string phantom_id;
    std::vector<int> order;  // acquisition order, for logs

    int angles_acquired() const { return step - 1; }
    std::vector<int> masked_angles_sorted() const;
};

/// One trainer-facing step record (also the episode-log row layout).
struct StepRecord {
    std::string phantom_id;
    int step = 0;
    int theta = -1;
    int decision = 0;  // d in {0, 1}
    double reward_continue = 0.0;
    double psnr_before = 0.0;
    double psnr_after = 0.0;
    double td_error = 0.0;  // filled by the trainer
};

/// Sequential-design environment.  reset() caches the noisy full-angle
/// sinogram so that the measurement of an angle depends only on
/// (phantom, seed, angle), never on acquisition order.  One instance per
/// episode; instances are independent.
class Environment {
  public:
    Environment(const Projector& proj, RewardSpec reward, int max_steps,
                SirtOptions sirt = {});

    /// Synthetic episode: projects the phantom over all angles, applies the
    /// noise model, and uses the phantom itself as the PSNR reference.
    ReconState reset(const Phantom& phantom, const NoiseModel& noise);

    /// Experimental episode: measured 180-angle sinogram; the PSNR
    /// reference is the full-angle SIRT reconstruction.
    ReconState reset_measured(const Sinogram& full_sino, const std::string& id);

    /// Acquire one angle: extends the mask, reconstructs from scratch over
    /// the masked angles, returns (next state, -cost_b).
    std::pair<ReconState, double> step(const ReconState& s, int theta) const;

    /// PSNR of the state's reconstruction against the reference.
    double terminal_reward(const ReconState& s) const;

    int max_steps() const { return max_steps_; }
    double cost_b() const { return reward_.cost_b; }
    const Image& reference() const { return reference_; }
    const Sinogram& cached_noisy_sinogram() const { return noisy_full_; }
    const Projector& projector() const { return *proj_; }

  private:
    const Projector* proj_;
    RewardSpec reward_;
    int max_steps_;
    SirtOptions sirt_;
    Sinogram noisy_full_;
    Image reference_;
    std::string phantom_id_;
};

void append_episode_log(const std::filesystem::path& path,
                        const std::vector<StepRecord>& records,
                        bool write_header);

}  // namespace ctoed
