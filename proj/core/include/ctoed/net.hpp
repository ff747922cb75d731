#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ctoed/grid.hpp"
#include "ctoed/io.hpp"

namespace ctoed {

struct Tensor {
    std::vector<int> shape;
    std::vector<double> v;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
        size_t n = 1;
        for (int d : shape) n *= static_cast<size_t>(d);
        v.assign(n, 0.0);
    }
    size_t size() const { return v.size(); }
    double& operator[](size_t i) { return v[i]; }
    double operator[](size_t i) const { return v[i]; }
};

struct ConvBlockConfig {
    int in_ch = 0, out_ch = 0, stride = 1, pool = 2;
};

/// Shared-encoder Actor-Critic architecture: conv blocks
/// (Conv3x3 -> GroupNorm -> LeakyReLU -> MaxPool), flatten, then an actor
/// head (linear -> masked softmax), a critic head (linear -> ReLU ->
/// linear) and a terminal head (linear -> sigmoid).
struct NetConfig {
    int grid = 240;
    int n_actions = 180;  // 181 for the naive variant (index 180 = stop)
    bool terminal_head = true;
    int gn_groups = 4;
    double leaky_slope = 0.2;
    double gn_eps = 1e-5;
    std::vector<ConvBlockConfig> blocks;

    // derived by finalize()
    std::vector<int> conv_out;  // spatial side after each conv
    std::vector<int> pool_out;  // spatial side after each pool
    int feature_dim = 0;

    /// Reference architecture for a grid side: 240 keeps the 2/2/4 pooling
    /// ladder (features 48*7*7 = 2352); smaller grids use pool 2 in the
    /// last block; grids below 32 drop the third block entirely.
    static NetConfig for_grid(int grid, int n_actions = 180,
                              bool terminal_head = true);
    void finalize();
    std::string blocks_string() const;
    static std::vector<ConvBlockConfig> parse_blocks(const std::string& s);
};

struct BlockParams {
    Tensor w;      // [out_ch, in_ch, 3, 3]
    Tensor b;      // [out_ch]
    Tensor gamma;  // [out_ch]
    Tensor beta;   // [out_ch]
};

struct NetParams {
    NetConfig cfg;
    std::vector<BlockParams> blocks;
    Tensor actor_w, actor_b;      // [A, F], [A]
    Tensor critic_w1, critic_b1;  // [F, F], [F]
    Tensor critic_w2, critic_b2;  // [1, F], [1]
    Tensor term_w, term_b;        // [1, F], [1]; absent without terminal head
};

using NetGrads = NetParams;

/// Visits every parameter tensor in a fixed order (serialization order).
void for_each_tensor(NetParams& p,
                     const std::function<void(const std::string&, Tensor&)>& fn);
void for_each_tensor(const NetParams& p,
                     const std::function<void(const std::string&, const Tensor&)>& fn);

/// Kaiming fan-in init for conv/linear weights, zero biases, unit GN gain.
NetParams init_params(const NetConfig& cfg, uint64_t seed);
NetGrads zero_grads(const NetConfig& cfg);

struct NetOutputs {
    std::vector<double> action_probs;  // simplex over unmasked, 0 on masked
    double value = 0.0;                // V-hat or V_C-hat per trainer
    std::optional<double> term_prob;   // sigmoid head, in (0,1)
};

/// Deterministic forward pass.  `mask` flags the actions that may NOT be
/// chosen (1 = masked); masked probabilities are exactly zero.
NetOutputs net_forward(const NetParams& params, const Image& state_image,
                       const std::vector<uint8_t>& mask);

enum class Variant { Naive, Terminal };

/// One step record with the constants its loss terms need.
struct TrainStepSample {
    Image state;                          // x-hat_k
    std::vector<uint8_t> mask;            // over n_actions, state's mask
    int action = 0;                       // theta_k (or the stop index)
    double delta = 0.0;                   // TD error (treated as constant)
    double critic_target = 0.0;           // bootstrapped target (constant)
    std::optional<double> term_advantage; // PSNR(x_k) - Vc(x_k), Terminal only
};

/// Composite surrogate whose gradients implement the update rules:
///
///   L = 1.0 * (-log pi_a(a|x) * delta)          (actor, log-likelihood)
///     + 0.5 * 0.5*(target - V)^2                (critic, semi-gradient)
///     + 1.0 * (-p(x) * (PSNR(x) - Vc(x)))       (terminal head: gradient of
///                                                the probability itself)
///     - 0.01 * H(pi_a)                          (entropy of unmasked probs)
///
/// The terminal term is present only for Variant::Terminal.  Gradients are
/// summed over the batch.
std::pair<double, NetGrads> loss_and_grads(
    const NetParams& params, const std::vector<TrainStepSample>& batch,
    Variant variant, const struct OptimizerConfig& weights);

/// Loss value alone (for finite-difference checks).
double net_loss(const NetParams& params,
                const std::vector<TrainStepSample>& batch, Variant variant,
                const struct OptimizerConfig& weights);

struct OptimizerConfig {
    double learning_rate = 1e-4;
    double weight_decay = 1e-5;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double w_actor = 1.0;
    double w_critic = 0.5;
    double w_terminal = 1.0;
    double w_entropy = 0.01;
};

struct AdamState {
    int64_t step_count = 0;
    std::vector<Tensor> m, v;  // in for_each_tensor order
};

AdamState init_adam_state(const NetConfig& cfg);

/// Classic Adam with L2 decay added to the gradient.
void apply_update(NetParams& params, const NetGrads& grads,
                  const OptimizerConfig& opt, AdamState& state);

// ---------------------------------------------------------------------------
// Checkpointing: text header (versioned architecture + optimizer step)
// followed by a `---` separator and a float32 payload holding parameters
// and both Adam moment vectors.  Round-trips are exact at float32.
// ---------------------------------------------------------------------------

void save_checkpoint(const std::filesystem::path& path, const NetParams& params,
                     const AdamState& state, const HeaderMap& extra = {});
std::pair<NetParams, AdamState> load_checkpoint(
    const std::filesystem::path& path, HeaderMap* header = nullptr);

}  // namespace ctoed
