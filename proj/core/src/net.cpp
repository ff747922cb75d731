#include "ctoed/net.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "ctoed/errors.hpp"
#include "ctoed/rng.hpp"

namespace ctoed {

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

NetConfig NetConfig::for_grid(int grid, int n_actions, bool terminal_head) {
    NetConfig cfg;
    cfg.grid = grid;
    cfg.n_actions = n_actions;
    cfg.terminal_head = terminal_head;
    if (grid >= 240) {
        cfg.blocks = {{1, 12, 2, 2}, {12, 24, 1, 2}, {24, 48, 1, 4}};
    } else if (grid >= 32) {
        cfg.blocks = {{1, 12, 2, 2}, {12, 24, 1, 2}, {24, 48, 1, 2}};
    } else {
        cfg.blocks = {{1, 12, 2, 2}, {12, 24, 1, 2}};
    }
    cfg.finalize();
    return cfg;
}

void NetConfig::finalize() {
    conv_out.clear();
    pool_out.clear();
    int side = grid;
    for (const auto& b : blocks) {
        if (b.out_ch % gn_groups != 0)
            throw ArchitectureMismatch("channels not divisible by GN groups");
        side = (side - 1) / b.stride + 1;  // 3x3 conv, pad 1
        conv_out.push_back(side);
        side = side / b.pool;  // floor pooling, stride = kernel
        pool_out.push_back(side);
        if (side < 1) throw ArchitectureMismatch("encoder collapses below 1x1");
    }
    feature_dim = blocks.back().out_ch * side * side;
}

std::string NetConfig::blocks_string() const {
    std::string s;
    for (size_t i = 0; i < blocks.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(blocks[i].in_ch) + ':' +
             std::to_string(blocks[i].out_ch) + ':' +
             std::to_string(blocks[i].stride) + ':' +
             std::to_string(blocks[i].pool);
    }
    return s;
}

std::vector<ConvBlockConfig> NetConfig::parse_blocks(const std::string& s) {
    std::vector<ConvBlockConfig> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        ConvBlockConfig b;
        if (std::sscanf(tok.c_str(), "%d:%d:%d:%d", &b.in_ch, &b.out_ch,
                        &b.stride, &b.pool) != 4)
            throw ConfigTypeError("bad block spec: " + tok);
        out.push_back(b);
    }
    return out;
}

// ---------------------------------------------------------------------------
// parameters
// ---------------------------------------------------------------------------

void for_each_tensor(NetParams& p,
                     const std::function<void(const std::string&, Tensor&)>& fn) {
    for (size_t i = 0; i < p.blocks.size(); ++i) {
        auto tag = "block" + std::to_string(i);
        fn(tag + ".w", p.blocks[i].w);
        fn(tag + ".b", p.blocks[i].b);
        fn(tag + ".gamma", p.blocks[i].gamma);
        fn(tag + ".beta", p.blocks[i].beta);
    }
    fn("actor.w", p.actor_w);
    fn("actor.b", p.actor_b);
    fn("critic.w1", p.critic_w1);
    fn("critic.b1", p.critic_b1);
    fn("critic.w2", p.critic_w2);
    fn("critic.b2", p.critic_b2);
    if (p.cfg.terminal_head) {
        fn("term.w", p.term_w);
        fn("term.b", p.term_b);
    }
}

void for_each_tensor(
    const NetParams& p,
    const std::function<void(const std::string&, const Tensor&)>& fn) {
    for_each_tensor(const_cast<NetParams&>(p),
                    [&](const std::string& n, Tensor& t) { fn(n, t); });
}

static NetParams make_shaped(const NetConfig& cfg) {
    NetParams p;
    p.cfg = cfg;
    for (const auto& b : cfg.blocks) {
        BlockParams bp;
        bp.w = Tensor({b.out_ch, b.in_ch, 3, 3});
        bp.b = Tensor({b.out_ch});
        bp.gamma = Tensor({b.out_ch});
        bp.beta = Tensor({b.out_ch});
        p.blocks.push_back(std::move(bp));
    }
    const int F = cfg.feature_dim, A = cfg.n_actions;
    p.actor_w = Tensor({A, F});
    p.actor_b = Tensor({A});
    p.critic_w1 = Tensor({F, F});
    p.critic_b1 = Tensor({F});
    p.critic_w2 = Tensor({1, F});
    p.critic_b2 = Tensor({1});
    if (cfg.terminal_head) {
        p.term_w = Tensor({1, F});
        p.term_b = Tensor({1});
    }
    return p;
}

NetParams init_params(const NetConfig& cfg, uint64_t seed) {
    NetParams p = make_shaped(cfg);
    Rng rng(seed);
    auto he_fill = [&](Tensor& t, int fan_in) {
        double s = std::sqrt(2.0 / fan_in);
        for (auto& x : t.v) x = s * rng.normal();
    };
    for (size_t i = 0; i < p.blocks.size(); ++i) {
        he_fill(p.blocks[i].w, cfg.blocks[i].in_ch * 9);
        std::fill(p.blocks[i].gamma.v.begin(), p.blocks[i].gamma.v.end(), 1.0);
    }
    he_fill(p.actor_w, cfg.feature_dim);
    he_fill(p.critic_w1, cfg.feature_dim);
    he_fill(p.critic_w2, cfg.feature_dim);
    if (cfg.terminal_head) he_fill(p.term_w, cfg.feature_dim);
    return p;
}

NetGrads zero_grads(const NetConfig& cfg) { return make_shaped(cfg); }

// ---------------------------------------------------------------------------
// forward pass with an activation cache for the backward pass
// ---------------------------------------------------------------------------

namespace {

struct BlockCache {
    Tensor conv;           // pre-norm
    Tensor norm;           // post-GN, pre-activation
    Tensor act;            // post-LeakyReLU
    Tensor pool;           // post-MaxPool
    std::vector<int> argmax;      // pool routing into `act`
    std::vector<double> mean;     // per group
    std::vector<double> inv_std;  // per group
};

struct ForwardCache {
    std::vector<BlockCache> blocks;
    std::vector<double> feat;
    std::vector<double> actor_logits;
    std::vector<double> probs;
    double log_prob_taken = 0.0;
    double entropy = 0.0;
    std::vector<double> critic_pre;  // hidden, before ReLU
    double value = 0.0;
    double term_logit = 0.0, term_prob = 0.5;
};

void conv_forward(const Tensor& in, int in_side, const BlockParams& bp,
                  const ConvBlockConfig& bc, Tensor& out, int out_side) {
    const int ic_n = bc.in_ch, oc_n = bc.out_ch, s = bc.stride;
    for (int oc = 0; oc < oc_n; ++oc) {
        const double bias = bp.b[oc];
        for (int oy = 0; oy < out_side; ++oy) {
            for (int ox = 0; ox < out_side; ++ox) {
                double acc = bias;
                const int iy0 = oy * s - 1, ix0 = ox * s - 1;
                for (int ic = 0; ic < ic_n; ++ic) {
                    const double* w =
                        &bp.w.v[((static_cast<size_t>(oc) * ic_n + ic) * 9)];
                    const double* xin =
                        &in.v[static_cast<size_t>(ic) * in_side * in_side];
                    for (int ky = 0; ky < 3; ++ky) {
                        const int iy = iy0 + ky;
                        if (iy < 0 || iy >= in_side) continue;
                        for (int kx = 0; kx < 3; ++kx) {
                            const int ix = ix0 + kx;
                            if (ix < 0 || ix >= in_side) continue;
                            acc += w[ky * 3 + kx] * xin[iy * in_side + ix];
                        }
                    }
                }
                out.v[(static_cast<size_t>(oc) * out_side + oy) * out_side + ox] =
                    acc;
            }
        }
    }
}

void conv_backward(const Tensor& in, int in_side, const BlockParams& bp,
                   const ConvBlockConfig& bc, const Tensor& dout, int out_side,
                   Tensor& din, BlockParams& g) {
    const int ic_n = bc.in_ch, oc_n = bc.out_ch, s = bc.stride;
    for (int oc = 0; oc < oc_n; ++oc) {
        double db = 0.0;
        for (int oy = 0; oy < out_side; ++oy) {
            for (int ox = 0; ox < out_side; ++ox) {
                const double go =
                    dout.v[(static_cast<size_t>(oc) * out_side + oy) * out_side +
                           ox];
                if (go == 0.0) continue;
                db += go;
                const int iy0 = oy * s - 1, ix0 = ox * s - 1;
                for (int ic = 0; ic < ic_n; ++ic) {
                    double* gw =
                        &g.w.v[((static_cast<size_t>(oc) * ic_n + ic) * 9)];
                    const double* w =
                        &bp.w.v[((static_cast<size_t>(oc) * ic_n + ic) * 9)];
                    const double* xin =
                        &in.v[static_cast<size_t>(ic) * in_side * in_side];
                    double* gin =
                        &din.v[static_cast<size_t>(ic) * in_side * in_side];
                    for (int ky = 0; ky < 3; ++ky) {
                        const int iy = iy0 + ky;
                        if (iy < 0 || iy >= in_side) continue;
                        for (int kx = 0; kx < 3; ++kx) {
                            const int ix = ix0 + kx;
                            if (ix < 0 || ix >= in_side) continue;
                            gw[ky * 3 + kx] += go * xin[iy * in_side + ix];
                            gin[iy * in_side + ix] += go * w[ky * 3 + kx];
                        }
                    }
                }
            }
        }
        g.b[oc] += db;
    }
}

void block_forward(const NetConfig& cfg, size_t bi, const NetParams& p,
                   const Tensor& in, int in_side, BlockCache& c) {
    const auto& bc = cfg.blocks[bi];
    const auto& bp = p.blocks[bi];
    const int cs = cfg.conv_out[bi], ps = cfg.pool_out[bi];

    c.conv = Tensor({bc.out_ch, cs, cs});
    conv_forward(in, in_side, bp, bc, c.conv, cs);

    // GroupNorm over (out_ch/groups) x cs x cs per group
    const int groups = cfg.gn_groups;
    const int cpg = bc.out_ch / groups;
    const size_t plane = static_cast<size_t>(cs) * cs;
    const size_t gsz = cpg * plane;
    c.norm = Tensor({bc.out_ch, cs, cs});
    c.mean.resize(groups);
    c.inv_std.resize(groups);
    for (int g = 0; g < groups; ++g) {
        const double* x = &c.conv.v[g * gsz];
        double mu = 0.0;
        for (size_t i = 0; i < gsz; ++i) mu += x[i];
        mu /= static_cast<double>(gsz);
        double var = 0.0;
        for (size_t i = 0; i < gsz; ++i) {
            double d = x[i] - mu;
            var += d * d;
        }
        var /= static_cast<double>(gsz);
        const double inv = 1.0 / std::sqrt(var + cfg.gn_eps);
        c.mean[g] = mu;
        c.inv_std[g] = inv;
        for (int cc = 0; cc < cpg; ++cc) {
            const int ch = g * cpg + cc;
            const double ga = bp.gamma[ch], be = bp.beta[ch];
            const double* xi = &c.conv.v[ch * plane];
            double* yo = &c.norm.v[ch * plane];
            for (size_t i = 0; i < plane; ++i)
                yo[i] = ga * ((xi[i] - mu) * inv) + be;
        }
    }

    c.act = Tensor({bc.out_ch, cs, cs});
    for (size_t i = 0; i < c.norm.size(); ++i) {
        double x = c.norm[i];
        c.act.v[i] = x > 0.0 ? x : cfg.leaky_slope * x;
    }

    // MaxPool kernel = stride = bc.pool, floor mode
    c.pool = Tensor({bc.out_ch, ps, ps});
    c.argmax.assign(c.pool.size(), 0);
    const int k = bc.pool;
    for (int ch = 0; ch < bc.out_ch; ++ch) {
        const double* src = &c.act.v[static_cast<size_t>(ch) * plane];
        for (int py = 0; py < ps; ++py) {
            for (int px = 0; px < ps; ++px) {
                int best = (py * k) * cs + px * k;
                double bv = src[best];
                for (int dy = 0; dy < k; ++dy)
                    for (int dx = 0; dx < k; ++dx) {
                        int idx = (py * k + dy) * cs + (px * k + dx);
                        if (src[idx] > bv) {
                            bv = src[idx];
                            best = idx;
                        }
                    }
                size_t o = (static_cast<size_t>(ch) * ps + py) * ps + px;
                c.pool.v[o] = bv;
                c.argmax[o] = ch * static_cast<int>(plane) + best;
            }
        }
    }
}

void forward_cached(const NetParams& p, const Image& img,
                    const std::vector<uint8_t>& mask, ForwardCache& f,
                    int taken_action) {
    const auto& cfg = p.cfg;
    if (img.n != cfg.grid)
        throw ShapeMismatch("net input side " + std::to_string(img.n) +
                            " does not match configured grid " +
                            std::to_string(cfg.grid));
    if (static_cast<int>(mask.size()) != cfg.n_actions)
        throw ShapeMismatch("mask length does not match action count");

    Tensor in({1, cfg.grid, cfg.grid});
    std::copy(img.v.begin(), img.v.end(), in.v.begin());

    f.blocks.resize(cfg.blocks.size());
    int side = cfg.grid;
    const Tensor* cur = &in;
    for (size_t bi = 0; bi < cfg.blocks.size(); ++bi) {
        block_forward(cfg, bi, p, *cur, side, f.blocks[bi]);
        cur = &f.blocks[bi].pool;
        side = cfg.pool_out[bi];
    }
    f.feat.assign(cur->v.begin(), cur->v.end());
    const int F = cfg.feature_dim, A = cfg.n_actions;

    // actor head: masked softmax
    f.actor_logits.assign(A, 0.0);
    for (int a = 0; a < A; ++a) {
        double z = p.actor_b[a];
        const double* w = &p.actor_w.v[static_cast<size_t>(a) * F];
        for (int i = 0; i < F; ++i) z += w[i] * f.feat[i];
        f.actor_logits[a] = z;
    }
    double zmax = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < A; ++a)
        if (!mask[a]) zmax = std::max(zmax, f.actor_logits[a]);
    if (zmax == -std::numeric_limits<double>::infinity())
        throw EmptyAngleSet("all actions are masked");
    double zsum = 0.0;
    f.probs.assign(A, 0.0);
    for (int a = 0; a < A; ++a) {
        if (mask[a]) continue;
        f.probs[a] = std::exp(f.actor_logits[a] - zmax);
        zsum += f.probs[a];
    }
    f.entropy = 0.0;
    for (int a = 0; a < A; ++a) {
        if (mask[a]) continue;
        f.probs[a] /= zsum;
        if (f.probs[a] > 0.0) f.entropy -= f.probs[a] * std::log(f.probs[a]);
    }
    if (taken_action >= 0)
        f.log_prob_taken = std::log(std::max(f.probs[taken_action], 1e-300));

    // critic head
    f.critic_pre.assign(F, 0.0);
    for (int j = 0; j < F; ++j) {
        double z = p.critic_b1[j];
        const double* w = &p.critic_w1.v[static_cast<size_t>(j) * F];
        for (int i = 0; i < F; ++i) z += w[i] * f.feat[i];
        f.critic_pre[j] = z;
    }
    double val = p.critic_b2[0];
    for (int j = 0; j < F; ++j)
        if (f.critic_pre[j] > 0.0) val += p.critic_w2[j] * f.critic_pre[j];
    f.value = val;

    // terminal head
    if (cfg.terminal_head) {
        double t = p.term_b[0];
        for (int i = 0; i < F; ++i) t += p.term_w[i] * f.feat[i];
        f.term_logit = t;
        f.term_prob = 1.0 / (1.0 + std::exp(-t));
    }
}

/// Backward from head-level gradients into parameter gradients.
/// d_logits: dL/d(actor logits); d_value: dL/dV; d_term_logit: dL/dt.
void backward_cached(const NetParams& p, const Image& img,
                     const ForwardCache& f, const std::vector<double>& d_logits,
                     double d_value, double d_term_logit, NetGrads& g) {
    const auto& cfg = p.cfg;
    const int F = cfg.feature_dim, A = cfg.n_actions;
    std::vector<double> dfeat(F, 0.0);

    // actor
    for (int a = 0; a < A; ++a) {
        const double gz = d_logits[a];
        if (gz == 0.0) continue;
        g.actor_b[a] += gz;
        double* gw = &g.actor_w.v[static_cast<size_t>(a) * F];
        const double* w = &p.actor_w.v[static_cast<size_t>(a) * F];
        for (int i = 0; i < F; ++i) {
            gw[i] += gz * f.feat[i];
            dfeat[i] += gz * w[i];
        }
    }

    // critic
    if (d_value != 0.0) {
        g.critic_b2[0] += d_value;
        for (int j = 0; j < F; ++j) {
            const double h = f.critic_pre[j] > 0.0 ? f.critic_pre[j] : 0.0;
            g.critic_w2.v[j] += d_value * h;
        }
        for (int j = 0; j < F; ++j) {
            if (f.critic_pre[j] <= 0.0) continue;
            const double dh = d_value * p.critic_w2[j];
            g.critic_b1[j] += dh;
            double* gw = &g.critic_w1.v[static_cast<size_t>(j) * F];
            const double* w = &p.critic_w1.v[static_cast<size_t>(j) * F];
            for (int i = 0; i < F; ++i) {
                gw[i] += dh * f.feat[i];
                dfeat[i] += dh * w[i];
            }
        }
    }

    // terminal
    if (cfg.terminal_head && d_term_logit != 0.0) {
        g.term_b[0] += d_term_logit;
        for (int i = 0; i < F; ++i) {
            g.term_w.v[i] += d_term_logit * f.feat[i];
            dfeat[i] += d_term_logit * p.term_w[i];
        }
    }

    // encoder, last block to first
    Tensor dcur({cfg.blocks.back().out_ch, cfg.pool_out.back(),
                 cfg.pool_out.back()});
    std::copy(dfeat.begin(), dfeat.end(), dcur.v.begin());

    Tensor input({1, cfg.grid, cfg.grid});
    std::copy(img.v.begin(), img.v.end(), input.v.begin());

    for (int bi = static_cast<int>(cfg.blocks.size()) - 1; bi >= 0; --bi) {
        const auto& bc = cfg.blocks[bi];
        const auto& bp = p.blocks[bi];
        const auto& c = f.blocks[bi];
        const int cs = cfg.conv_out[bi];
        const size_t plane = static_cast<size_t>(cs) * cs;

        // unpool
        Tensor dact({bc.out_ch, cs, cs});
        for (size_t o = 0; o < dcur.size(); ++o)
            if (dcur[o] != 0.0) dact.v[c.argmax[o]] += dcur[o];

        // leaky backward
        Tensor dnorm({bc.out_ch, cs, cs});
        for (size_t i = 0; i < dact.size(); ++i)
            dnorm.v[i] =
                dact[i] * (c.norm[i] > 0.0 ? 1.0 : cfg.leaky_slope);

        // group-norm backward
        Tensor dconv({bc.out_ch, cs, cs});
        const int groups = cfg.gn_groups;
        const int cpg = bc.out_ch / groups;
        const size_t gsz = cpg * plane;
        for (int grp = 0; grp < groups; ++grp) {
            const double mu = c.mean[grp], inv = c.inv_std[grp];
            double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
            for (int cc = 0; cc < cpg; ++cc) {
                const int ch = grp * cpg + cc;
                const double ga = bp.gamma[ch];
                const double* xi = &c.conv.v[ch * plane];
                const double* dy = &dnorm.v[ch * plane];
                double dgamma = 0.0, dbeta = 0.0;
                for (size_t i = 0; i < plane; ++i) {
                    const double xhat = (xi[i] - mu) * inv;
                    dgamma += dy[i] * xhat;
                    dbeta += dy[i];
                    const double dxhat = dy[i] * ga;
                    sum_dxhat += dxhat;
                    sum_dxhat_xhat += dxhat * xhat;
                }
                g.blocks[bi].gamma[ch] += dgamma;
                g.blocks[bi].beta[ch] += dbeta;
            }
            const double n = static_cast<double>(gsz);
            const double m1 = sum_dxhat / n, m2 = sum_dxhat_xhat / n;
            for (int cc = 0; cc < cpg; ++cc) {
                const int ch = grp * cpg + cc;
                const double ga = bp.gamma[ch];
                const double* xi = &c.conv.v[ch * plane];
                const double* dy = &dnorm.v[ch * plane];
                double* dx = &dconv.v[ch * plane];
                for (size_t i = 0; i < plane; ++i) {
                    const double xhat = (xi[i] - mu) * inv;
                    const double dxhat = dy[i] * ga;
                    dx[i] = inv * (dxhat - m1 - xhat * m2);
                }
            }
        }

        // conv backward
        const Tensor& in_t = (bi == 0) ? input : f.blocks[bi - 1].pool;
        const int in_side = (bi == 0) ? cfg.grid : cfg.pool_out[bi - 1];
        Tensor din({bc.in_ch, in_side, in_side});
        conv_backward(in_t, in_side, bp, bc, dconv, cs, din, g.blocks[bi]);
        dcur = std::move(din);
    }
}

}  // namespace

NetOutputs net_forward(const NetParams& params, const Image& state_image,
                       const std::vector<uint8_t>& mask) {
    ForwardCache f;
    forward_cached(params, state_image, mask, f, -1);
    NetOutputs out;
    out.action_probs = f.probs;
    out.value = f.value;
    if (params.cfg.terminal_head) out.term_prob = f.term_prob;
    return out;
}

static double sample_terms(const NetParams& params, const TrainStepSample& rec,
                           Variant variant, const OptimizerConfig& w,
                           ForwardCache& f, std::vector<double>* d_logits,
                           double* d_value, double* d_term) {
    if (variant == Variant::Terminal && !rec.term_advantage)
        throw MissingTarget("terminal variant needs the PSNR - Vc advantage");
    if (rec.action < 0 || rec.action >= params.cfg.n_actions ||
        rec.mask[rec.action])
        throw MissingTarget("step record action is masked or out of range");

    forward_cached(params, rec.state, rec.mask, f, rec.action);

    double loss = -w.w_actor * f.log_prob_taken * rec.delta;
    const double verr = f.value - rec.critic_target;
    loss += w.w_critic * 0.5 * verr * verr;
    loss -= w.w_entropy * f.entropy;
    if (variant == Variant::Terminal)
        loss -= w.w_terminal * f.term_prob * (*rec.term_advantage);

    if (d_logits) {
        const int A = params.cfg.n_actions;
        d_logits->assign(A, 0.0);
        for (int a = 0; a < A; ++a) {
            if (rec.mask[a]) continue;
            const double pi = f.probs[a];
            double gz = w.w_actor * rec.delta * (pi - (a == rec.action ? 1.0 : 0.0));
            if (pi > 0.0)
                gz += w.w_entropy * pi * (std::log(pi) + f.entropy);
            (*d_logits)[a] = gz;
        }
        *d_value = w.w_critic * verr;
        *d_term = 0.0;
        if (variant == Variant::Terminal)
            *d_term = -w.w_terminal * (*rec.term_advantage) * f.term_prob *
                      (1.0 - f.term_prob);
    }
    return loss;
}

std::pair<double, NetGrads> loss_and_grads(
    const NetParams& params, const std::vector<TrainStepSample>& batch,
    Variant variant, const OptimizerConfig& weights) {
    NetGrads g = zero_grads(params.cfg);
    double total = 0.0;
    ForwardCache f;
    std::vector<double> d_logits;
    double d_value = 0.0, d_term = 0.0;
    for (const auto& rec : batch) {
        total += sample_terms(params, rec, variant, weights, f, &d_logits,
                              &d_value, &d_term);
        backward_cached(params, rec.state, f, d_logits, d_value, d_term, g);
    }
    return {total, std::move(g)};
}

double net_loss(const NetParams& params,
                const std::vector<TrainStepSample>& batch, Variant variant,
                const OptimizerConfig& weights) {
    double total = 0.0;
    ForwardCache f;
    for (const auto& rec : batch)
        total += sample_terms(params, rec, variant, weights, f, nullptr,
                              nullptr, nullptr);
    return total;
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

AdamState init_adam_state(const NetConfig& cfg) {
    AdamState st;
    NetParams shaped = make_shaped(cfg);
    for_each_tensor(shaped, [&](const std::string&, Tensor& t) {
        st.m.push_back(Tensor(t.shape));
        st.v.push_back(Tensor(t.shape));
    });
    return st;
}

void apply_update(NetParams& params, const NetGrads& grads,
                  const OptimizerConfig& opt, AdamState& state) {
    state.step_count += 1;
    const double b1 = opt.adam_beta1, b2 = opt.adam_beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step_count));

    size_t ti = 0;
    std::vector<const Tensor*> gts;
    for_each_tensor(grads, [&](const std::string&, const Tensor& t) {
        gts.push_back(&t);
    });
    for_each_tensor(params, [&](const std::string& name, Tensor& t) {
        const Tensor& gt = *gts[ti];
        if (gt.size() != t.size())
            throw ShapeMismatch("gradient shape mismatch on " + name);
        Tensor& m = state.m[ti];
        Tensor& v = state.v[ti];
        for (size_t i = 0; i < t.size(); ++i) {
            const double g = gt[i] + opt.weight_decay * t[i];
            m.v[i] = b1 * m.v[i] + (1.0 - b1) * g;
            v.v[i] = b2 * v.v[i] + (1.0 - b2) * g * g;
            const double mhat = m.v[i] / bc1;
            const double vhat = v.v[i] / bc2;
            t.v[i] -= opt.learning_rate * mhat / (std::sqrt(vhat) + opt.adam_eps);
        }
        ++ti;
    });
}

// ---------------------------------------------------------------------------
// checkpoints
// ---------------------------------------------------------------------------

void save_checkpoint(const std::filesystem::path& path, const NetParams& params,
                     const AdamState& state, const HeaderMap& extra) {
    const auto& cfg = params.cfg;
    size_t n_params = 0;
    for_each_tensor(params, [&](const std::string&, const Tensor& t) {
        n_params += t.size();
    });

    HeaderMap h{{"checkpoint_version", "1"},
                {"grid", std::to_string(cfg.grid)},
                {"n_actions", std::to_string(cfg.n_actions)},
                {"terminal_head", cfg.terminal_head ? "1" : "0"},
                {"blocks", cfg.blocks_string()},
                {"gn_groups", std::to_string(cfg.gn_groups)},
                {"leaky_slope", std::to_string(cfg.leaky_slope)},
                {"gn_eps", std::to_string(cfg.gn_eps)},
                {"step_count", std::to_string(state.step_count)},
                {"param_floats", std::to_string(n_params)}};
    h.insert(h.end(), extra.begin(), extra.end());

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw NetworkError("cannot write checkpoint: " + path.string());
    out << format_header_text(h) << "---\n";

    std::vector<float> payload;
    payload.reserve(3 * n_params);
    auto dump = [&](const NetParams& src) {
        for_each_tensor(src, [&](const std::string&, const Tensor& t) {
            for (double x : t.v) payload.push_back(static_cast<float>(x));
        });
    };
    dump(params);
    for (const auto& m : state.m)
        for (double x : m.v) payload.push_back(static_cast<float>(x));
    for (const auto& v : state.v)
        for (double x : v.v) payload.push_back(static_cast<float>(x));
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size() * sizeof(float)));
}

std::pair<NetParams, AdamState> load_checkpoint(
    const std::filesystem::path& path, HeaderMap* header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingRequired("cannot open checkpoint: " + path.string());
    std::string text, line;
    while (std::getline(in, line)) {
        if (line == "---") break;
        text += line;
        text += '\n';
    }
    HeaderMap h = parse_header_text(text);

    NetConfig cfg;
    cfg.grid = std::stoi(header_get(h, "grid"));
    cfg.n_actions = std::stoi(header_get(h, "n_actions"));
    cfg.terminal_head = header_get(h, "terminal_head") == "1";
    cfg.blocks = NetConfig::parse_blocks(header_get(h, "blocks"));
    cfg.gn_groups = std::stoi(header_get(h, "gn_groups"));
    cfg.leaky_slope = std::stod(header_get(h, "leaky_slope"));
    cfg.gn_eps = std::stod(header_get(h, "gn_eps"));
    cfg.finalize();

    NetParams params = make_shaped(cfg);
    AdamState state = init_adam_state(cfg);
    state.step_count = std::stoll(header_get(h, "step_count"));

    size_t n_params = std::stoull(header_get(h, "param_floats"));
    std::vector<float> payload(3 * n_params);
    in.read(reinterpret_cast<char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(float)));
    if (static_cast<size_t>(in.gcount()) != payload.size() * sizeof(float))
        throw ShapeMismatch("checkpoint payload truncated");

    size_t off = 0;
    for_each_tensor(params, [&](const std::string&, Tensor& t) {
        for (auto& x : t.v) x = payload[off++];
    });
    for (auto& m : state.m)
        for (auto& x : m.v) x = payload[off++];
    for (auto& v : state.v)
        for (auto& x : v.v) x = payload[off++];

    if (header) *header = std::move(h);
    return {std::move(params), std::move(state)};
}

}  // namespace ctoed
