#include "ctoed/env.hpp"

#include <cstdio>
#include <fstream>
#include <numeric>

#include "ctoed/errors.hpp"
#include "ctoed/metrics.hpp"

namespace ctoed {

std::vector<int> ReconState::masked_angles_sorted() const {
    std::vector<int> out;
    for (int a = 0; a < static_cast<int>(mask.size()); ++a)
        if (mask[a]) out.push_back(a);
    return out;
}

Environment::Environment(const Projector& proj, RewardSpec reward,
                         int max_steps, SirtOptions sirt)
    : proj_(&proj), reward_(reward), max_steps_(max_steps), sirt_(sirt) {
    if (max_steps_ < 1) throw EpisodeExhausted("max_steps must be >= 1");
}

ReconState Environment::reset(const Phantom& phantom, const NoiseModel& noise) {
    std::vector<int> all(proj_->geometry().n_angles_total);
    std::iota(all.begin(), all.end(), 0);
    Sinogram clean = proj_->project(phantom.image, all);
    noisy_full_ = add_noise(clean, noise);
    reference_ = phantom.image;
    phantom_id_ = phantom.id;

    ReconState s;
    s.image = Image(proj_->grid());
    s.mask.assign(proj_->geometry().n_angles_total, 0);
    s.step = 1;
    s.phantom_id = phantom.id;
    return s;
}

ReconState Environment::reset_measured(const Sinogram& full_sino,
                                       const std::string& id) {
    if (full_sino.n_angles() != proj_->geometry().n_angles_total)
        throw ShapeMismatch("measured sinogram must cover all angles");
    noisy_full_ = full_sino;
    reference_ = sirt_reconstruct(*proj_, full_sino, sirt_);
    phantom_id_ = id;

    ReconState s;
    s.image = Image(proj_->grid());
    s.mask.assign(proj_->geometry().n_angles_total, 0);
    s.step = 1;
    s.phantom_id = id;
    return s;
}

std::pair<ReconState, double> Environment::step(const ReconState& s,
                                                int theta) const {
    if (theta < 0 || theta >= static_cast<int>(s.mask.size()))
        throw AngleRepeated("angle index out of range");
    if (s.mask[theta])
        throw AngleRepeated("angle already acquired: " + std::to_string(theta));
    if (s.step > max_steps_)
        throw EpisodeExhausted("episode already ran its " +
                               std::to_string(max_steps_) + " steps");

    ReconState next = s;
    next.mask[theta] = 1;
    next.order.push_back(theta);
    next.step = s.step + 1;

    // gather the cached noisy rows in ascending angle order, so the
    // reconstruction is a pure function of the angle set
    auto angles = next.masked_angles_sorted();
    Sinogram sub(angles, noisy_full_.n_detector);
    sub.noise_level = noisy_full_.noise_level;
    sub.noise_seed = noisy_full_.noise_seed;
    for (size_t i = 0; i < angles.size(); ++i) {
        const double* src = noisy_full_.row(angles[i]);
        double* dst = sub.row(static_cast<int>(i));
        for (int j = 0; j < sub.n_detector; ++j) dst[j] = src[j];
    }
    next.image = sirt_reconstruct(*proj_, sub, sirt_);
    return {std::move(next), -reward_.cost_b};
}

double Environment::terminal_reward(const ReconState& s) const {
    return psnr(s.image, reference_).psnr;
}

void append_episode_log(const std::filesystem::path& path,
                        const std::vector<StepRecord>& records,
                        bool write_header) {
    std::ofstream out(path, write_header ? std::ios::trunc : std::ios::app);
    if (write_header)
        out << "phantom_id\tstep\ttheta\td\tpsnr_before\tpsnr_after\ttd_error\n";
    char buf[256];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof(buf), "%s\t%d\t%d\t%d\t%.9g\t%.9g\t%.9g\n",
                      r.phantom_id.c_str(), r.step, r.theta, r.decision,
                      r.psnr_before, r.psnr_after, r.td_error);
        out << buf;
    }
}

}  // namespace ctoed
