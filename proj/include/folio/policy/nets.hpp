#pragma once

#include "folio/env/env.hpp"
#include "folio/market/state.hpp"
#include "folio/ndcore/graph.hpp"

namespace folio::policy {

struct ArchConfig {
    std::size_t channels = 8;        // conv channels in the shared evaluator
    std::size_t kernel = 3;          // odd conv kernel width
    std::size_t residual_blocks = 1; // residual conv blocks after the stem
    std::size_t embed = 16;          // hidden width of dense heads
    double init_scale = 0.05;        // uniform(-s, s) init for hidden layers
    double std_floor = 1e-4;         // minimum Gaussian std
};

// Prepends the cash stream (all features identically 1) to an observation,
// giving the (m+1, F, W) batch the networks score per asset.
nd::Tensor with_cash_stream(const market::StateTensor& s);

// Deterministic actor scoring every asset stream with one shared evaluator,
// so the parameter count does not depend on the number of assets. Outputs
// "scores" (pre-softmax, with a learned cash bias added to component 0) and
// "weights" (softmax of scores). Hidden layers are initialized uniformly
// from rng; the final layer starts at zero, so the initial policy is exactly
// uniform over cash and assets.
class Actor {
public:
    Actor(std::size_t num_assets, std::size_t num_features, std::size_t window,
          const ArchConfig& arch, Rng& rng);

    env::WeightVector act(const market::StateTensor& s);
    std::vector<double> scores(const market::StateTensor& s);

    nd::Graph& net() { return net_; }
    const nd::Graph& net() const { return net_; }
    std::size_t num_assets() const { return num_assets_; }

private:
    nd::Graph net_;
    std::size_t num_assets_;
};

// Action-value head for the deterministic actor: shares the per-asset
// evaluator shape, embeds state and action separately, and sums per-asset
// contributions into a scalar "q". The final layer starts at zero, so the
// initial Q is identically 0.
class Critic {
public:
    Critic(std::size_t num_assets, std::size_t num_features, std::size_t window,
           const ArchConfig& arch, Rng& rng);

    double q(const market::StateTensor& s, const env::WeightVector& a);

    nd::Graph& net() { return net_; }
    const nd::Graph& net() const { return net_; }

private:
    nd::Graph net_;
    std::size_t num_assets_;
};

// Diagonal Gaussian policy head plus an independent state-value head. The
// actor network outputs "mean" and "std" (softplus-mapped with a positive
// floor); the sampled raw action is mapped through softmax before execution.
class GaussianPolicy {
public:
    GaussianPolicy(std::size_t num_assets, std::size_t num_features, std::size_t window,
                   const ArchConfig& arch, Rng& rng);

    struct Moments {
        std::vector<double> mean;
        std::vector<double> std;
    };
    Moments moments(const market::StateTensor& s);
    double value(const market::StateTensor& s);

    // Draws a raw Gaussian action; the executed portfolio is softmax(raw).
    static std::vector<double> sample(const Moments& mo, Rng& rng);
    static double log_prob(const std::vector<double>& raw, const Moments& mo);
    static env::WeightVector execute(const std::vector<double>& raw);

    nd::Graph& actor_net() { return actor_; }
    nd::Graph& value_net() { return value_; }

private:
    nd::Graph actor_;
    nd::Graph value_;
    std::size_t num_assets_;
};

} // namespace folio::policy
