#include "ctoed/train.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "ctoed/errors.hpp"
#include "ctoed/rng.hpp"

namespace ctoed {

TDRecord td_error_naive(double reward_b, double psnr_next, double v_k,
                        double v_next, bool terminated) {
    TDRecord r;
    r.variant = Variant::Naive;
    r.target = reward_b + (terminated ? psnr_next : v_next);
    r.delta = r.target - v_k;
    return r;
}

TDRecord td_error_terminal(double reward_b, double p_next, double psnr_next,
                           double vc_k, double vc_next) {
    TDRecord r;
    r.variant = Variant::Terminal;
    r.target = reward_b + (1.0 - p_next) * vc_next + p_next * psnr_next;
    r.delta = r.target - vc_k;
    return r;
}

namespace {

struct EpisodeOutcome {
    std::vector<TrainStepSample> samples;  // one per update
    EpisodeTraceRow row;
};

/// Literal Algorithm-2 iteration order: sample the angle, acquire,
/// then sample the stop decision from the pre-acquisition state.  With
/// cfg.decide_before_acquire the decision comes first and a stop skips
/// the acquisition (never at the zero state, keeping episode length >= 1).
EpisodeOutcome run_terminal_episode(const NetParams& params,
                                    const TrainConfig& cfg, Environment& env,
                                    const Phantom& phantom,
                                    const NoiseModel& noise, Rng& rng) {
    EpisodeOutcome out;
    const int M = cfg.max_steps;
    ReconState state = env.reset(phantom, noise);

    for (int k = 1;; ++k) {
        NetOutputs cur = net_forward(params, state.image, state.mask);
        const double p_k = *cur.term_prob;
        const double vc_k = cur.value;
        const double psnr_k = env.terminal_reward(state);

        if (cfg.decide_before_acquire && k > 1) {
            bool d_pre = rng.bernoulli(p_k);
            TrainStepSample stop_sample;  // terminal-head-only update
            stop_sample.state = state.image;
            stop_sample.mask = state.mask;
            stop_sample.action = -1;
            stop_sample.term_advantage = psnr_k - vc_k;
            if (d_pre) {
                out.samples.push_back(std::move(stop_sample));
                out.row.n_angles = k - 1;
                out.row.final_psnr = psnr_k;
                break;
            }
        }

        int theta = rng.categorical(cur.action_probs);
        auto [next, reward_continue] = env.step(state, theta);
        const double psnr_next = env.terminal_reward(next);

        bool d = rng.bernoulli(p_k);
        const bool forced = (k == M);

        double p_next_eff = 1.0, vc_next = 0.0;
        if (!forced) {
            NetOutputs nxt = net_forward(params, next.image, next.mask);
            p_next_eff = *nxt.term_prob;
            vc_next = nxt.value;
        }
        TDRecord td = td_error_terminal(reward_continue, p_next_eff, psnr_next,
                                        vc_k, vc_next);

        TrainStepSample sample;
        sample.state = state.image;
        sample.mask = state.mask;
        sample.action = theta;
        sample.delta = td.delta;
        sample.critic_target = td.target;
        // no terminal gradient for the forced stop at the horizon
        sample.term_advantage =
            (forced || cfg.freeze_terminal) ? 0.0 : (psnr_k - vc_k);
        out.samples.push_back(std::move(sample));

        if (d || forced) {
            out.row.n_angles = k;
            out.row.final_psnr = psnr_next;
            break;
        }
        state = std::move(next);
    }
    out.row.episode_return =
        out.row.n_angles * (-cfg.cost_b) + out.row.final_psnr;
    return out;
}

EpisodeOutcome run_naive_episode(const NetParams& params,
                                 const TrainConfig& cfg, Environment& env,
                                 const Phantom& phantom,
                                 const NoiseModel& noise, Rng& rng) {
    EpisodeOutcome out;
    const int M = cfg.max_steps;
    ReconState state = env.reset(phantom, noise);

    auto mask181 = [](const ReconState& s) {
        std::vector<uint8_t> m = s.mask;
        m.push_back(0);  // the stop action is never masked
        return m;
    };

    int actions_taken = 0, angles = 0;
    for (int k = 1;; ++k) {
        auto mask = mask181(state);
        NetOutputs cur = net_forward(params, state.image, mask);
        int action = rng.categorical(cur.action_probs);
        ++actions_taken;

        const bool terminated = (action == kStopAction);
        TDRecord td;
        ReconState next;
        if (terminated) {
            // stopping acquires nothing; the reconstruction is unchanged
            td = td_error_naive(-cfg.cost_b, env.terminal_reward(state),
                                cur.value, 0.0, true);
            next = state;
        } else {
            auto [stepped, reward_continue] = env.step(state, action);
            next = std::move(stepped);
            ++angles;
            NetOutputs nxt = net_forward(params, next.image, mask181(next));
            td = td_error_naive(reward_continue, 0.0, cur.value, nxt.value,
                                false);
        }

        TrainStepSample sample;
        sample.state = state.image;
        sample.mask = std::move(mask);
        sample.action = action;
        sample.delta = td.delta;
        sample.critic_target = td.target;
        out.samples.push_back(std::move(sample));

        if (terminated || k == M) {
            out.row.n_angles = angles;
            out.row.final_psnr = env.terminal_reward(next);
            break;
        }
        state = std::move(next);
    }
    out.row.episode_return =
        actions_taken * (-cfg.cost_b) + out.row.final_psnr;
    return out;
}

TrainResult train_loop(const TrainConfig& cfg,
                       const std::vector<Phantom>& dataset,
                       const Projector& proj, NetParams net, AdamState opt,
                       Variant variant) {
    if (dataset.empty()) throw MissingRequired("training dataset is empty");
    TrainResult result;
    result.params = std::move(net);
    result.opt_state = std::move(opt);

    auto run_episode = [&](int64_t e, const NetParams& params,
                           Rng& rng) -> EpisodeOutcome {
        const Phantom& ph =
            dataset[rng.uniform_int(0, static_cast<int>(dataset.size()) - 1)];
        Environment env(proj, RewardSpec{cfg.cost_b}, cfg.max_steps, cfg.sirt);
        std::vector<int> all(proj.geometry().n_angles_total);
        for (int i = 0; i < static_cast<int>(all.size()); ++i) all[i] = i;
        Sinogram clean = proj.project(ph.image, all);
        NoiseModel noise =
            make_noise_model(clean, cfg.eta, mix_seed(cfg.seed, 0xA, e));
        EpisodeOutcome out =
            variant == Variant::Terminal
                ? run_terminal_episode(params, cfg, env, ph, noise, rng)
                : run_naive_episode(params, cfg, env, ph, noise, rng);
        out.row.episode = e;
        out.row.shape = ph.spec.kind;
        return out;
    };

    auto apply_samples = [&](const std::vector<TrainStepSample>& samples) {
        if (samples.empty()) return;
        auto [loss, grads] =
            loss_and_grads(result.params, samples, variant, cfg.opt);
        (void)loss;
        apply_update(result.params, grads, cfg.opt, result.opt_state);
    };

    if (cfg.workers <= 1) {
        for (int64_t e = cfg.episodes_done; e < cfg.episodes; ++e) {
            Rng rng(mix_seed(cfg.seed, 0xE, e));
            if (cfg.update_mode == UpdateMode::PerStep) {
                // interleave: the episode must see each update immediately,
                // so it is re-run step by step via a stepping wrapper below
            }
            if (cfg.update_mode == UpdateMode::PerEpisode) {
                EpisodeOutcome out = run_episode(e, result.params, rng);
                apply_samples(out.samples);
                result.trace.push_back(out.row);
            } else {
                // per-step online updates: run the episode against the live
                // parameters, applying an update after every environment step
                EpisodeOutcome out;
                {
                    const Phantom& ph = dataset[rng.uniform_int(
                        0, static_cast<int>(dataset.size()) - 1)];
                    Environment env(proj, RewardSpec{cfg.cost_b},
                                    cfg.max_steps, cfg.sirt);
                    std::vector<int> all(proj.geometry().n_angles_total);
                    for (int i = 0; i < static_cast<int>(all.size()); ++i)
                        all[i] = i;
                    Sinogram clean = proj.project(ph.image, all);
                    NoiseModel noise = make_noise_model(
                        clean, cfg.eta, mix_seed(cfg.seed, 0xA, e));
                    out = variant == Variant::Terminal
                              ? run_terminal_episode_online(
                                    result.params, result.opt_state, cfg, env,
                                    ph, noise, rng, variant)
                              : run_naive_episode_online(
                                    result.params, result.opt_state, cfg, env,
                                    ph, noise, rng, variant);
                    out.row.episode = e;
                    out.row.shape = ph.spec.kind;
                }
                result.trace.push_back(out.row);
            }
        }
    } else {
        // synchronous-parallel: rounds of `workers` episodes on frozen
        // parameters; gradients summed in episode order, one update per round
        for (int64_t e0 = cfg.episodes_done; e0 < cfg.episodes;
             e0 += cfg.workers) {
            const int w = static_cast<int>(
                std::min<int64_t>(cfg.workers, cfg.episodes - e0));
            std::vector<EpisodeOutcome> outs(w);
            std::vector<std::thread> pool;
            for (int j = 0; j < w; ++j) {
                pool.emplace_back([&, j] {
                    Rng rng(mix_seed(cfg.seed, 0xE, e0 + j));
                    outs[j] = run_episode(e0 + j, result.params, rng);
                });
            }
            for (auto& th : pool) th.join();
            std::vector<TrainStepSample> all_samples;
            for (auto& o : outs) {
                for (auto& s : o.samples) all_samples.push_back(std::move(s));
                result.trace.push_back(o.row);
            }
            apply_samples(all_samples);
        }
    }
    return result;
}

}  // namespace

TrainResult train_naive(const TrainConfig& cfg,
                        const std::vector<Phantom>& dataset,
                        const Projector& proj, NetParams net, AdamState opt) {
    if (net.cfg.n_actions != kNaiveActionCount)
        throw ArchitectureMismatch("naive training needs a 181-action net");
    return train_loop(cfg, dataset, proj, std::move(net), std::move(opt),
                      Variant::Naive);
}

TrainResult train_terminal(const TrainConfig& cfg,
                           const std::vector<Phantom>& dataset,
                           const Projector& proj, NetParams net,
                           AdamState opt) {
    if (!net.cfg.terminal_head)
        throw ArchitectureMismatch("terminal training needs a terminal head");
    return train_loop(cfg, dataset, proj, std::move(net), std::move(opt),
                      Variant::Terminal);
}

void write_trace(const std::filesystem::path& path,
                 const std::vector<EpisodeTraceRow>& trace) {
    std::ofstream out(path, std::ios::trunc);
    out << "episode\tshape\tn_angles\tfinal_psnr\treturn\n";
    char buf[192];
    for (const auto& r : trace) {
        std::snprintf(buf, sizeof(buf), "%lld\t%s\t%d\t%.17g\t%.17g\n",
                      static_cast<long long>(r.episode),
                      shape_name(r.shape), r.n_angles, r.final_psnr,
                      r.episode_return);
        out << buf;
    }
}

std::vector<EpisodeTraceRow> read_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingRequired("cannot open trace: " + path.string());
    std::vector<EpisodeTraceRow> out;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string ep, shape, n, p, ret;
        std::getline(row, ep, '\t');
        std::getline(row, shape, '\t');
        std::getline(row, n, '\t');
        std::getline(row, p, '\t');
        std::getline(row, ret, '\t');
        EpisodeTraceRow r;
        r.episode = std::stoll(ep);
        r.shape = shape_from_name(shape);
        r.n_angles = std::stoi(n);
        r.final_psnr = std::stod(p);
        r.episode_return = std::stod(ret);
        out.push_back(r);
    }
    return out;
}

double mean_tail_length(const std::vector<EpisodeTraceRow>& trace,
                        ShapeKind shape, int64_t window) {
    if (trace.empty()) return 0.0;
    int64_t last = trace.back().episode;
    double acc = 0.0;
    int64_t count = 0;
    for (const auto& r : trace) {
        if (r.episode <= last - window) continue;
        if (r.shape != shape) continue;
        acc += r.n_angles;
        ++count;
    }
    return count ? acc / static_cast<double>(count) : 0.0;
}

}  // namespace ctoed
