// The three actor-critic networks. All of them map an observation to
// per-turbine von Mises parameters (mu in (-pi, pi), kappa > 1) and a
// scalar critic value; they differ only in how the observation is
// consumed, so the trainer never needs to know which variant it holds.
#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "wakelab/env.hpp"
#include "wakelab/nn/autodiff.hpp"
#include "wakelab/nn/checkpoint.hpp"
#include "wakelab/nn/layers.hpp"
#include "wakelab/rng.hpp"

namespace wakelab {

enum class ModelVariant { kV0, kV1, kV2 };
enum class ModelScale { kPaper, kDesk };

inline std::string to_string(ModelVariant v) {
    switch (v) {
        case ModelVariant::kV0: return "v0";
        case ModelVariant::kV1: return "v1";
        case ModelVariant::kV2: return "v2";
    }
    throw std::logic_error("unknown model variant");
}

inline std::string to_string(ModelScale s) {
    return s == ModelScale::kPaper ? "paper" : "desk";
}

inline ModelVariant parse_variant(const std::string& s) {
    if (s == "v0") return ModelVariant::kV0;
    if (s == "v1") return ModelVariant::kV1;
    if (s == "v2") return ModelVariant::kV2;
    throw std::invalid_argument("unknown model variant: " + s);
}

inline ModelScale parse_scale(const std::string& s) {
    if (s == "paper") return ModelScale::kPaper;
    if (s == "desk") return ModelScale::kDesk;
    throw std::invalid_argument("unknown model scale: " + s);
}

struct ModelConfig {
    ModelVariant variant = ModelVariant::kV2;
    ModelScale scale = ModelScale::kDesk;
    bool attention_residual = true;  // V2 ablation switches
    bool attention_norm = true;
    bool critic_pool_sum = false;    // mean pooling unless set
};

/// The desk profile divides every paper width by this factor (and drops
/// attention heads to two) so gradient checks and smoke training run in
/// seconds while the topology stays identical.
inline constexpr int kDeskWidthDivisor = 16;

inline int scaled_width(int paper_width, ModelScale s) {
    return s == ModelScale::kPaper ? paper_width
                                   : std::max(1, paper_width / kDeskWidthDivisor);
}

inline int attention_heads(ModelScale s) { return s == ModelScale::kPaper ? 3 : 2; }

struct ActorCriticOutput {
    Eigen::VectorXd mu;     // radians per turbine, inside (-pi, pi)
    Eigen::VectorXd kappa;  // concentration per turbine, > 1
    double value = 0.0;
};

struct ForwardNodes {
    int mu = -1;     // N x 1
    int kappa = -1;  // N x 1
    int value = -1;  // 1 x 1
};

class ActorCritic {
public:
    virtual ~ActorCritic() = default;

    /// Records the forward pass on the tape and returns the output nodes.
    virtual ForwardNodes forward(nn::Tape& tape, const Observation& obs) = 0;

    virtual std::vector<nn::Tensor*> parameters() = 0;
    virtual const ModelConfig& config() const = 0;

    /// Value-only evaluation. Parameters are read, never written, so
    /// concurrent calls from rollout workers are safe while the trainer
    /// thread is idle.
    ActorCriticOutput evaluate(const Observation& obs) {
        nn::Tape tape;
        const ForwardNodes nodes = forward(tape, obs);
        ActorCriticOutput out;
        out.mu = tape.value(nodes.mu).col(0);
        out.kappa = tape.value(nodes.kappa).col(0);
        out.value = tape.value(nodes.value)(0, 0);
        return out;
    }

    std::size_t param_count() {
        std::size_t n = 0;
        for (const nn::Tensor* t : parameters()) n += static_cast<std::size_t>(t->size());
        return n;
    }

    void zero_grad() {
        for (nn::Tensor* t : parameters()) t->zero_grad();
    }
};

// ---------------------------------------------------------------------------
// V0: fully connected on the concatenated observation (layout excluded)
// ---------------------------------------------------------------------------

class V0Model : public ActorCritic {
public:
    V0Model(int n_turbines, const ModelConfig& cfg, std::uint64_t seed)
        : n_(n_turbines), cfg_(cfg) {
        Rng rng = Rng(seed).substream(StreamPurpose::kModelInit);
        const int obs = 12 + 2 * n_turbines;
        const int w1 = scaled_width(1024, cfg.scale);
        const int w2 = scaled_width(4096, cfg.scale);
        const int a1 = scaled_width(2048, cfg.scale);
        const int a2 = scaled_width(256, cfg.scale);
        using nn::Activation;
        shared1_ = nn::FcLayer("v0/shared1", obs, w1, Activation::kRelu, rng);
        shared2_ = nn::FcLayer("v0/shared2", w1, w2, Activation::kRelu, rng);
        actor1_ = nn::FcLayer("v0/actor1", w2, a1, Activation::kRelu, rng);
        actor2_ = nn::FcLayer("v0/actor2", a1, a2, Activation::kRelu, rng);
        mu_head_ = nn::FcLayer("v0/mu", a2, n_turbines, Activation::kTanhPi, rng);
        kappa_head_ =
            nn::FcLayer("v0/kappa", a2, n_turbines, Activation::kSoftplusPlusOne, rng);
        critic1_ = nn::FcLayer("v0/critic1", w2, a1, Activation::kRelu, rng);
        critic2_ = nn::FcLayer("v0/critic2", a1, a2, Activation::kRelu, rng);
        critic3_ = nn::FcLayer("v0/critic3", a2, 1, Activation::kLinear, rng);
    }

    ForwardNodes forward(nn::Tape& t, const Observation& obs) override {
        if (obs.flat.size() != 12 + 2 * n_) {
            throw std::invalid_argument("V0Model: observation width mismatch");
        }
        const int x = t.leaf(obs.flat.transpose());  // 1 x obs
        const int trunk = shared2_.forward(t, shared1_.forward(t, x));
        const int act = actor2_.forward(t, actor1_.forward(t, trunk));
        ForwardNodes out;
        out.mu = nn::transpose(t, mu_head_.forward(t, act));
        out.kappa = nn::transpose(t, kappa_head_.forward(t, act));
        out.value = critic3_.forward(t, critic2_.forward(t, critic1_.forward(t, trunk)));
        return out;
    }

    std::vector<nn::Tensor*> parameters() override {
        std::vector<nn::Tensor*> out;
        for (nn::FcLayer* l : {&shared1_, &shared2_, &actor1_, &actor2_, &mu_head_,
                               &kappa_head_, &critic1_, &critic2_, &critic3_}) {
            l->collect(out);
        }
        return out;
    }

    const ModelConfig& config() const override { return cfg_; }

private:
    int n_;
    ModelConfig cfg_;
    nn::FcLayer shared1_, shared2_, actor1_, actor2_, mu_head_, kappa_head_;
    nn::FcLayer critic1_, critic2_, critic3_;
};

// ---------------------------------------------------------------------------
// V1: graph attention over the wake graph
// ---------------------------------------------------------------------------

class V1Model : public ActorCritic {
public:
    V1Model(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
        Rng rng = Rng(seed).substream(StreamPurpose::kModelInit);
        const int heads = attention_heads(cfg.scale);
        const int g1 = scaled_width(1024, cfg.scale);
        const int g2 = scaled_width(1024, cfg.scale);
        const int a1 = scaled_width(128, cfg.scale);
        const int a2 = scaled_width(64, cfg.scale);
        using nn::Activation;
        gat1_ = nn::GatLayer("v1/gat1", 14, g1, heads, Activation::kRelu, rng);
        gat2_ = nn::GatLayer("v1/gat2", heads * g1, g2, heads, Activation::kRelu, rng);
        actor1_ = nn::GatLayer("v1/actor1", heads * g2, a1, heads, Activation::kRelu, rng);
        actor2_ = nn::GatLayer("v1/actor2", heads * a1, a2, heads, Activation::kRelu, rng);
        mu_head_ = nn::GatLayer("v1/mu", heads * a2, 1, 1, Activation::kTanhPi, rng);
        kappa_head_ =
            nn::GatLayer("v1/kappa", heads * a2, 1, 1, Activation::kSoftplusPlusOne, rng);
        critic1_ = nn::FcLayer("v1/critic1", heads * g2, scaled_width(128, cfg.scale),
                               Activation::kRelu, rng);
        critic2_ = nn::FcLayer("v1/critic2", scaled_width(128, cfg.scale),
                               scaled_width(64, cfg.scale), Activation::kRelu, rng);
        critic3_ = nn::FcLayer("v1/critic3", scaled_width(64, cfg.scale), 1,
                               Activation::kLinear, rng);
    }

    ForwardNodes forward(nn::Tape& t, const Observation& obs) override {
        if (obs.node_features.cols() != 14 || obs.graph.n_nodes != obs.node_features.rows()) {
            throw std::invalid_argument("V1Model: node feature shape mismatch");
        }
        const int x = t.leaf(obs.node_features);
        const int trunk = gat2_.forward(t, gat1_.forward(t, x, obs.graph), obs.graph);
        const int act =
            actor2_.forward(t, actor1_.forward(t, trunk, obs.graph), obs.graph);
        ForwardNodes out;
        out.mu = mu_head_.forward(t, act, obs.graph);
        out.kappa = kappa_head_.forward(t, act, obs.graph);
        const int pooled = cfg_.critic_pool_sum ? nn::sum_rows(t, trunk)
                                                : nn::mean_rows(t, trunk);
        out.value = critic3_.forward(t, critic2_.forward(t, critic1_.forward(t, pooled)));
        return out;
    }

    std::vector<nn::Tensor*> parameters() override {
        std::vector<nn::Tensor*> out;
        for (nn::GatLayer* l : {&gat1_, &gat2_, &actor1_, &actor2_, &mu_head_, &kappa_head_}) {
            l->collect(out);
        }
        for (nn::FcLayer* l : {&critic1_, &critic2_, &critic3_}) l->collect(out);
        return out;
    }

    const ModelConfig& config() const override { return cfg_; }

private:
    ModelConfig cfg_;
    nn::GatLayer gat1_, gat2_, actor1_, actor2_, mu_head_, kappa_head_;
    nn::FcLayer critic1_, critic2_, critic3_;
};

// ---------------------------------------------------------------------------
// V2: embeddings summed into turbine tokens, attention blocks on top
// ---------------------------------------------------------------------------

class V2Model : public ActorCritic {
public:
    V2Model(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
        Rng rng = Rng(seed).substream(StreamPurpose::kModelInit);
        const int heads = attention_heads(cfg.scale);
        const int embed = scaled_width(256, cfg.scale);
        const int head_dim = scaled_width(256, cfg.scale);
        const int model = heads * head_dim;
        const int a1 = scaled_width(128, cfg.scale);
        const int a2 = scaled_width(64, cfg.scale);
        using nn::Activation;
        wind_embed_ = nn::FcLayer("v2/wind_embed", 3, embed, Activation::kRelu, rng);
        forecast_embed_ = nn::FcLayer("v2/forecast_embed", 9, embed, Activation::kRelu, rng);
        positional_ = nn::GatLayer("v2/positional", 4, embed, 1, Activation::kRelu, rng);
        turbine_embed_ = nn::FcLayer("v2/turbine_embed", 2, embed, Activation::kRelu, rng);
        blocks_.emplace_back("v2/block0", embed, head_dim, heads, rng, cfg.attention_residual,
                             cfg.attention_norm);
        blocks_.emplace_back("v2/block1", model, head_dim, heads, rng, cfg.attention_residual,
                             cfg.attention_norm);
        blocks_.emplace_back("v2/block2", model, head_dim, heads, rng, cfg.attention_residual,
                             cfg.attention_norm);
        mu1_ = nn::FcLayer("v2/mu1", model, a1, Activation::kRelu, rng);
        mu2_ = nn::FcLayer("v2/mu2", a1, a2, Activation::kRelu, rng);
        mu3_ = nn::FcLayer("v2/mu3", a2, 1, Activation::kTanhPi, rng);
        kappa1_ = nn::FcLayer("v2/kappa1", model, a1, Activation::kRelu, rng);
        kappa2_ = nn::FcLayer("v2/kappa2", a1, a2, Activation::kRelu, rng);
        kappa3_ = nn::FcLayer("v2/kappa3", a2, 1, Activation::kSoftplusPlusOne, rng);
        critic1_ = nn::FcLayer("v2/critic1", model, a1, Activation::kRelu, rng);
        critic2_ = nn::FcLayer("v2/critic2", a1, a2, Activation::kRelu, rng);
        critic3_ = nn::FcLayer("v2/critic3", a2, 1, Activation::kLinear, rng);
    }

    ForwardNodes forward(nn::Tape& t, const Observation& obs) override {
        if (obs.positional_node_features.cols() != 4 ||
            obs.orientation_features.rows() != obs.graph.n_nodes) {
            throw std::invalid_argument("V2Model: observation shape mismatch");
        }
        const int wind = wind_embed_.forward(t, t.leaf(obs.wind_features.transpose()));
        const int fore = forecast_embed_.forward(t, t.leaf(obs.forecast_features.transpose()));
        const int pe =
            positional_.forward(t, t.leaf(obs.positional_node_features), obs.graph);
        const int ty = turbine_embed_.forward(t, t.leaf(obs.orientation_features));

        // Token per turbine: shared wind and forecast embeddings broadcast
        // over the turbine-specific positional and orientation embeddings.
        int tokens = nn::add(t, pe, ty);
        tokens = nn::add_rowvec(t, tokens, wind);
        tokens = nn::add_rowvec(t, tokens, fore);

        for (auto& block : blocks_) tokens = block.forward(t, tokens);

        ForwardNodes out;
        out.mu = mu3_.forward(t, mu2_.forward(t, mu1_.forward(t, tokens)));
        out.kappa = kappa3_.forward(t, kappa2_.forward(t, kappa1_.forward(t, tokens)));
        const int pooled = cfg_.critic_pool_sum ? nn::sum_rows(t, tokens)
                                                : nn::mean_rows(t, tokens);
        out.value = critic3_.forward(t, critic2_.forward(t, critic1_.forward(t, pooled)));
        return out;
    }

    std::vector<nn::Tensor*> parameters() override {
        std::vector<nn::Tensor*> out;
        wind_embed_.collect(out);
        forecast_embed_.collect(out);
        positional_.collect(out);
        turbine_embed_.collect(out);
        for (auto& b : blocks_) b.collect(out);
        for (nn::FcLayer* l : {&mu1_, &mu2_, &mu3_, &kappa1_, &kappa2_, &kappa3_, &critic1_,
                               &critic2_, &critic3_}) {
            l->collect(out);
        }
        return out;
    }

    const ModelConfig& config() const override { return cfg_; }

private:
    ModelConfig cfg_;
    nn::FcLayer wind_embed_, forecast_embed_, turbine_embed_;
    nn::GatLayer positional_;
    std::vector<nn::AttentionBlock> blocks_;
    nn::FcLayer mu1_, mu2_, mu3_, kappa1_, kappa2_, kappa3_, critic1_, critic2_, critic3_;
};

// ---------------------------------------------------------------------------
// Factory and checkpoint plumbing
// ---------------------------------------------------------------------------

inline std::unique_ptr<ActorCritic> make_model(const ModelConfig& cfg, int n_turbines,
                                               std::uint64_t seed) {
    switch (cfg.variant) {
        case ModelVariant::kV0: return std::make_unique<V0Model>(n_turbines, cfg, seed);
        case ModelVariant::kV1: return std::make_unique<V1Model>(cfg, seed);
        case ModelVariant::kV2: return std::make_unique<V2Model>(cfg, seed);
    }
    throw std::logic_error("make_model: unknown variant");
}

inline void save_model_checkpoint(const std::string& path, ActorCritic& model,
                                  int n_turbines,
                                  std::map<std::string, std::string> extra = {}) {
    extra["variant"] = to_string(model.config().variant);
    extra["scale"] = to_string(model.config().scale);
    extra["n_turbines"] = std::to_string(n_turbines);
    nn::save_checkpoint(path, extra, model.parameters());
}

/// Rebuilds the model recorded in a checkpoint and loads its weights.
inline std::unique_ptr<ActorCritic> load_model_checkpoint(const std::string& path) {
    const auto meta = read_checkpoint_metadata(path);
    ModelConfig cfg;
    cfg.variant = parse_variant(meta.at("variant"));
    cfg.scale = parse_scale(meta.at("scale"));
    const int n_turbines = std::stoi(meta.at("n_turbines"));
    auto model = make_model(cfg, n_turbines, 0);
    nn::load_checkpoint(path, model->parameters());
    return model;
}

}  // namespace wakelab
