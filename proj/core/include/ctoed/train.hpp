#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctoed/env.hpp"
#include "ctoed/net.hpp"
#include "ctoed/phantom.hpp"

namespace ctoed {

/// In the naive variant the action space is the 180 angles plus one stop
/// action at this index.
constexpr int kStopAction = 180;
constexpr int kNaiveActionCount = 181;

struct TDRecord {
    double delta = 0.0;
    double target = 0.0;  // the bootstrapped target forming delta
    Variant variant = Variant::Naive;
};

/// Naive stopping TD error:
///   terminated:  delta = -b + PSNR(x_{k+1}) - V(x_k)
///   otherwise:   delta = -b + V(x_{k+1})    - V(x_k)
TDRecord td_error_naive(double reward_b, double psnr_next, double v_k,
                        double v_next, bool terminated);

/// Terminal-policy TD error (the sampled continuation advantage):
///   delta = -b + (1 - p') Vc(x') + p' PSNR(x') - Vc(x)
TDRecord td_error_terminal(double reward_b, double p_next, double psnr_next,
                           double vc_k, double vc_next);

enum class UpdateMode { PerStep, PerEpisode };

struct TrainConfig {
    double cost_b = 0.5;
    int max_steps = 20;
    int64_t episodes = 80000;
    uint64_t seed = 0;
    double eta = 0.05;
    int grid = 240;
    SirtOptions sirt;
    OptimizerConfig opt;
    UpdateMode update_mode = UpdateMode::PerStep;
    int workers = 1;  // >1: synchronous-parallel episodes, summed gradients
    int64_t checkpoint_every = 0;  // 0 = only at the end
    bool decide_before_acquire = false;  // flip the stop/acquire ordering
    bool freeze_terminal = false;        // no terminal-head updates
    int64_t episodes_done = 0;           // resume offset
};

struct EpisodeTraceRow {
    int64_t episode = 0;
    ShapeKind shape = ShapeKind::Triangle;
    int n_angles = 0;
    double final_psnr = 0.0;
    double episode_return = 0.0;  // T*(-b) + PSNR of the stopping state
};

struct TrainResult {
    NetParams params;
    AdamState opt_state;
    std::vector<EpisodeTraceRow> trace;
};

/// Naive stopping: one softmax over 181 actions; choosing the stop action
/// ends the episode without acquiring (the reconstruction is unchanged);
/// reaching max_steps simply breaks, bootstrapping as a continuation.
TrainResult train_naive(const TrainConfig& cfg,
                        const std::vector<Phantom>& dataset,
                        const Projector& proj, NetParams net, AdamState opt);

/// Terminal-policy stopping: per iteration the angle is sampled and
/// acquired first, then the stop decision is sampled from the
/// pre-acquisition state; updates follow the continuation TD error, the
/// log-likelihood actor rule and the probability-gradient terminal rule.
TrainResult train_terminal(const TrainConfig& cfg,
                           const std::vector<Phantom>& dataset,
                           const Projector& proj, NetParams net,
                           AdamState opt);

void write_trace(const std::filesystem::path& path,
                 const std::vector<EpisodeTraceRow>& trace);
std::vector<EpisodeTraceRow> read_trace(const std::filesystem::path& path);

/// Mean episode length per shape over the trailing `window` episodes
/// (the paper-style training-curve tail readout).
double mean_tail_length(const std::vector<EpisodeTraceRow>& trace,
                        ShapeKind shape, int64_t window);

}  // namespace ctoed
