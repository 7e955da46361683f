// Layer families for the actor-critic models: fully connected, graph
// attention with edge features, and multi-head self-attention blocks.
#pragma once

#include <string>
#include <vector>

#include "wakelab/nn/autodiff.hpp"
#include "wakelab/rng.hpp"
#include "wakelab/wake_graph.hpp"

namespace wakelab::nn {

enum class Activation { kLinear, kRelu, kTanhPi, kSoftplusPlusOne, kTanh };

inline int activate(Tape& t, int x, Activation act) {
    switch (act) {
        case Activation::kLinear: return x;
        case Activation::kRelu: return relu(t, x);
        case Activation::kTanhPi: return tanh_pi(t, x);
        case Activation::kSoftplusPlusOne: return softplus_plus_one(t, x);
        case Activation::kTanh: return tanh_op(t, x);
    }
    throw std::logic_error("activate: unknown activation");
}

/// Uniform fan-in initialization for a weight matrix.
inline Mat init_uniform(int rows, int cols, double limit, Rng& rng) {
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(-limit, limit);
    }
    return m;
}

inline Mat init_fan_in(int in_dim, int out_dim, Rng& rng) {
    return init_uniform(in_dim, out_dim, 1.0 / std::sqrt(static_cast<double>(in_dim)), rng);
}

// ---------------------------------------------------------------------------
// Fully connected
// ---------------------------------------------------------------------------

struct FcLayer {
    Tensor weight;  // in x out
    Tensor bias;    // 1 x out
    Activation act = Activation::kLinear;

    FcLayer() = default;
    FcLayer(const std::string& name, int in_dim, int out_dim, Activation a, Rng& rng)
        : weight(name + "/w", init_fan_in(in_dim, out_dim, rng)),
          bias(name + "/b", Mat::Zero(1, out_dim)),
          act(a) {}

    int forward(Tape& t, int x) {
        return activate(t, add_rowvec(t, matmul(t, x, t.param(weight)), t.param(bias)), act);
    }

    void collect(std::vector<Tensor*>& out) {
        out.push_back(&weight);
        out.push_back(&bias);
    }
};

// ---------------------------------------------------------------------------
// Graph attention with edge features
// ---------------------------------------------------------------------------

/// One multi-head graph-attention layer. Per head h and edge (s -> t):
///
///   e_st = leaky_relu(a_src . (W_src x_s) + a_dst . (W_dst x_t) + a_edge . (W_edge f_st))
///   alpha = softmax of e over t's in-entries (self-loop included)
///   out_t = sum_s alpha_st * (W_src x_s) + bias
///
/// Head outputs are concatenated, so the layer emits heads * out_dim
/// features per node. Nodes without in-edges keep only their self-loop and
/// reduce to a plain linear transform of their own features.
struct GatLayer {
    int in_dim = 0, out_dim = 0, heads = 1, edge_dim = 3;
    Activation act = Activation::kLinear;
    std::vector<Tensor> w_src, w_dst, w_edge;  // per head
    std::vector<Tensor> a_src, a_dst, a_edge;  // per head, out x 1
    Tensor bias;                               // 1 x heads*out

    GatLayer() = default;
    GatLayer(const std::string& name, int in, int out, int n_heads, Activation a, Rng& rng,
             int edge_features = 3)
        : in_dim(in), out_dim(out), heads(n_heads), edge_dim(edge_features), act(a) {
        const double logit_scale = 0.01 / std::sqrt(static_cast<double>(out));
        for (int h = 0; h < heads; ++h) {
            const std::string base = name + "/h" + std::to_string(h);
            w_src.emplace_back(base + "/w_src", init_fan_in(in, out, rng));
            w_dst.emplace_back(base + "/w_dst", init_fan_in(in, out, rng));
            w_edge.emplace_back(base + "/w_edge", init_fan_in(edge_dim, out, rng));
            a_src.emplace_back(base + "/a_src", init_uniform(out, 1, logit_scale, rng));
            a_dst.emplace_back(base + "/a_dst", init_uniform(out, 1, logit_scale, rng));
            a_edge.emplace_back(base + "/a_edge", init_uniform(out, 1, logit_scale, rng));
        }
        bias = Tensor(name + "/b", Mat::Zero(1, heads * out));
    }

    int forward(Tape& t, int node_feats, const GroupedWakeGraph& g) {
        if (t.value(node_feats).rows() != g.n_nodes) {
            throw std::invalid_argument("GatLayer: node count mismatch");
        }
        const int entries = static_cast<int>(g.entry_src.size());
        for (int s : g.entry_src) {
            if (s < 0 || s >= g.n_nodes) throw std::invalid_argument("GatLayer: dangling edge");
        }
        const int edge_feats = t.leaf(g.entry_features);
        std::vector<int> dst_of_entry(entries);
        for (std::size_t n = 0; n < g.node_ranges.size(); ++n) {
            for (int k = g.node_ranges[n].first; k < g.node_ranges[n].second; ++k) {
                dst_of_entry[k] = static_cast<int>(n);
            }
        }

        std::vector<int> head_outputs;
        for (int h = 0; h < heads; ++h) {
            const int hs = matmul(t, node_feats, t.param(w_src[h]));  // N x out
            const int hd = matmul(t, node_feats, t.param(w_dst[h]));
            const int he = matmul(t, edge_feats, t.param(w_edge[h]));  // entries x out

            const int gs = gather_rows(t, hs, g.entry_src);
            const int gd = gather_rows(t, hd, dst_of_entry);

            int logits = add(t, matmul(t, gs, t.param(a_src[h])),
                             matmul(t, gd, t.param(a_dst[h])));
            logits = add(t, logits, matmul(t, he, t.param(a_edge[h])));
            logits = leaky_relu(t, logits, 0.2);

            const int alpha = segment_softmax(t, logits, g.node_ranges);
            head_outputs.push_back(segment_weighted_sum(t, alpha, gs, g.node_ranges));
        }
        const int cat = heads == 1 ? head_outputs[0] : concat_cols(t, head_outputs);
        return activate(t, add_rowvec(t, cat, t.param(bias)), act);
    }

    void collect(std::vector<Tensor*>& out) {
        for (int h = 0; h < heads; ++h) {
            out.push_back(&w_src[h]);
            out.push_back(&w_dst[h]);
            out.push_back(&w_edge[h]);
            out.push_back(&a_src[h]);
            out.push_back(&a_dst[h]);
            out.push_back(&a_edge[h]);
        }
        out.push_back(&bias);
    }
};

// ---------------------------------------------------------------------------
// Multi-head self-attention
// ---------------------------------------------------------------------------

/// Scaled dot-product self-attention over the token rows (no mask), heads
/// concatenated and linearly projected. This is the attention sublayer
/// alone; AttentionBlock wraps it with the feed-forward pair, residuals
/// and normalization.
struct MhsaCore {
    int in_dim = 0, head_dim = 0, heads = 1;
    std::vector<Tensor> wq, wk, wv, bq, bk, bv;  // per head
    Tensor wo, bo;                               // model_dim x model_dim

    MhsaCore() = default;
    MhsaCore(const std::string& name, int in, int head_width, int n_heads, Rng& rng)
        : in_dim(in), head_dim(head_width), heads(n_heads) {
        for (int h = 0; h < heads; ++h) {
            const std::string base = name + "/h" + std::to_string(h);
            wq.emplace_back(base + "/wq", init_fan_in(in, head_width, rng));
            wk.emplace_back(base + "/wk", init_fan_in(in, head_width, rng));
            wv.emplace_back(base + "/wv", init_fan_in(in, head_width, rng));
            bq.emplace_back(base + "/bq", Mat::Zero(1, head_width));
            bk.emplace_back(base + "/bk", Mat::Zero(1, head_width));
            bv.emplace_back(base + "/bv", Mat::Zero(1, head_width));
        }
        const int model = head_width * n_heads;
        wo = Tensor(name + "/wo", init_fan_in(model, model, rng));
        bo = Tensor(name + "/bo", Mat::Zero(1, model));
    }

    int model_dim() const { return head_dim * heads; }

    int forward(Tape& t, int tokens) {
        if (t.value(tokens).cols() != in_dim) {
            throw std::invalid_argument("MhsaCore: token width mismatch");
        }
        const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(head_dim));
        std::vector<int> head_outputs;
        for (int h = 0; h < heads; ++h) {
            const int q = add_rowvec(t, matmul(t, tokens, t.param(wq[h])), t.param(bq[h]));
            const int k = add_rowvec(t, matmul(t, tokens, t.param(wk[h])), t.param(bk[h]));
            const int v = add_rowvec(t, matmul(t, tokens, t.param(wv[h])), t.param(bv[h]));
            const int scores = scale(t, matmul_nt(t, q, k), inv_sqrt);
            const int attn = row_softmax(t, scores);
            head_outputs.push_back(matmul(t, attn, v));
        }
        const int cat = heads == 1 ? head_outputs[0] : concat_cols(t, head_outputs);
        return add_rowvec(t, matmul(t, cat, t.param(wo)), t.param(bo));
    }

    void collect(std::vector<Tensor*>& out) {
        for (int h = 0; h < heads; ++h) {
            out.push_back(&wq[h]);
            out.push_back(&wk[h]);
            out.push_back(&wv[h]);
            out.push_back(&bq[h]);
            out.push_back(&bk[h]);
            out.push_back(&bv[h]);
        }
        out.push_back(&wo);
        out.push_back(&bo);
    }
};

/// Pre-norm transformer-style block: attention sublayer followed by a
/// feed-forward pair that widens four-fold and narrows back, residual
/// connections around both. When the input width differs from the model
/// width the first residual goes through a learned projection. Residuals
/// and normalization are switchable for ablations.
struct AttentionBlock {
    MhsaCore attention;
    Tensor ln1_g, ln1_b, ln2_g, ln2_b;
    Tensor skip_proj;  // in x model, only when in != model
    FcLayer ff1, ff2;
    bool use_residual = true;
    bool use_norm = true;
    bool has_skip_proj = false;

    AttentionBlock() = default;
    AttentionBlock(const std::string& name, int in, int head_width, int n_heads, Rng& rng,
                   bool residual = true, bool norm = true)
        : attention(name + "/attn", in, head_width, n_heads, rng),
          use_residual(residual),
          use_norm(norm) {
        const int model = head_width * n_heads;
        ln1_g = Tensor(name + "/ln1_g", Mat::Ones(1, in));
        ln1_b = Tensor(name + "/ln1_b", Mat::Zero(1, in));
        ln2_g = Tensor(name + "/ln2_g", Mat::Ones(1, model));
        ln2_b = Tensor(name + "/ln2_b", Mat::Zero(1, model));
        if (in != model) {
            skip_proj = Tensor(name + "/skip", init_fan_in(in, model, rng));
            has_skip_proj = true;
        }
        ff1 = FcLayer(name + "/ff1", model, 4 * model, Activation::kRelu, rng);
        ff2 = FcLayer(name + "/ff2", 4 * model, model, Activation::kLinear, rng);
    }

    int forward(Tape& t, int tokens) {
        const int xn =
            use_norm ? layer_norm_rows(t, tokens, t.param(ln1_g), t.param(ln1_b)) : tokens;
        const int attended = attention.forward(t, xn);
        int x1 = attended;
        if (use_residual) {
            const int skip =
                has_skip_proj ? matmul(t, tokens, t.param(skip_proj)) : tokens;
            x1 = add(t, skip, attended);
        }
        const int x1n = use_norm ? layer_norm_rows(t, x1, t.param(ln2_g), t.param(ln2_b)) : x1;
        const int f = ff2.forward(t, ff1.forward(t, x1n));
        return use_residual ? add(t, x1, f) : f;
    }

    void collect(std::vector<Tensor*>& out) {
        attention.collect(out);
        if (use_norm) {
            out.push_back(&ln1_g);
            out.push_back(&ln1_b);
            out.push_back(&ln2_g);
            out.push_back(&ln2_b);
        }
        if (has_skip_proj) out.push_back(&skip_proj);
        ff1.collect(out);
        ff2.collect(out);
    }
};

}  // namespace wakelab::nn
