#include "folio/policy/nets.hpp"

#include <cmath>

#include "folio/common.hpp"

namespace folio::policy {

namespace {

constexpr double kLog2Pi = 1.8378770664093453; // log(2*pi)

nd::Tensor uniform_init(const nd::Shape& shape, double scale, Rng& rng) {
    nd::Tensor t = nd::Tensor::zeros(shape);
    std::uniform_real_distribution<double> u(-scale, scale);
    for (auto& x : t.data) x = u(rng);
    return t;
}

void check_arch(const ArchConfig& a) {
    require(a.channels >= 1, "network config: channels must be at least 1");
    require(a.kernel >= 1 && a.kernel % 2 == 1, "network config: kernel must be odd, got ",
            a.kernel);
    require(a.embed >= 1, "network config: embed width must be at least 1");
    require(a.init_scale > 0.0, "network config: init_scale must be positive");
    require(a.std_floor > 0.0, "network config: std_floor must be positive");
}

// Shared per-asset evaluator: conv stem plus residual conv blocks, applied
// identically to every stream in the batch. Returns the flattened feature id.
std::size_t build_trunk(nd::Graph& g, std::size_t x, std::size_t num_streams,
                        std::size_t num_features, std::size_t window,
                        const ArchConfig& arch, Rng& rng, const std::string& prefix) {
    const std::size_t C = arch.channels;
    std::size_t k0 = g.param(prefix + "stem.w",
                             uniform_init({C, num_features, arch.kernel}, arch.init_scale, rng));
    std::size_t b0 = g.param(prefix + "stem.b", nd::Tensor::zeros({C}));
    std::size_t h = g.relu(g.conv1d(x, k0, b0));
    for (std::size_t r = 0; r < arch.residual_blocks; ++r) {
        std::string base = prefix + "res" + std::to_string(r);
        std::size_t ka = g.param(base + ".a.w",
                                 uniform_init({C, C, arch.kernel}, arch.init_scale, rng));
        std::size_t ba = g.param(base + ".a.b", nd::Tensor::zeros({C}));
        std::size_t kb = g.param(base + ".b.w",
                                 uniform_init({C, C, arch.kernel}, arch.init_scale, rng));
        std::size_t bb = g.param(base + ".b.b", nd::Tensor::zeros({C}));
        std::size_t inner = g.conv1d(g.relu(g.conv1d(h, ka, ba)), kb, bb);
        h = g.relu(g.add(h, inner));
    }
    return g.reshape(h, {num_streams, C * window});
}

} // namespace

nd::Tensor with_cash_stream(const market::StateTensor& s) {
    const std::size_t m = s.num_assets();
    const std::size_t F = s.num_features();
    const std::size_t W = s.window();
    nd::Tensor out = nd::Tensor::zeros({m + 1, F, W});
    for (std::size_t f = 0; f < F; ++f)
        for (std::size_t l = 0; l < W; ++l) out.at3(0, f, l) = 1.0;
    std::copy(s.values.data.begin(), s.values.data.end(), out.data.begin() + F * W);
    return out;
}

Actor::Actor(std::size_t num_assets, std::size_t num_features, std::size_t window,
             const ArchConfig& arch, Rng& rng)
    : num_assets_(num_assets) {
    check_arch(arch);
    require(num_assets >= 1, "Actor: need at least one asset");
    const std::size_t B = num_assets + 1;
    std::size_t x = net_.input("state", {B, num_features, window});
    std::size_t f = build_trunk(net_, x, B, num_features, window, arch, rng, "");
    std::size_t hw = net_.param("head.w", nd::Tensor::zeros({1, arch.channels * window}));
    std::size_t hb = net_.param("head.b", nd::Tensor::zeros({1}));
    std::size_t per_asset = net_.dense(f, hw, hb);           // (B, 1)
    std::size_t row = net_.reshape(per_asset, {1, B});       // (1, B)
    std::size_t cb = net_.param("cash_bias", nd::Tensor::zeros({1}));
    std::size_t scores = net_.bias_at(row, cb, 0);
    net_.mark_output("scores", scores);
    net_.mark_output("weights", net_.softmax(scores));
}

env::WeightVector Actor::act(const market::StateTensor& s) {
    net_.set_input("state", with_cash_stream(s));
    net_.run();
    env::WeightVector out;
    out.w = net_.output("weights").data;
    return out;
}

std::vector<double> Actor::scores(const market::StateTensor& s) {
    net_.set_input("state", with_cash_stream(s));
    net_.run();
    return net_.output("scores").data;
}

Critic::Critic(std::size_t num_assets, std::size_t num_features, std::size_t window,
               const ArchConfig& arch, Rng& rng)
    : num_assets_(num_assets) {
    check_arch(arch);
    require(num_assets >= 1, "Critic: need at least one asset");
    const std::size_t B = num_assets + 1;
    const std::size_t E = arch.embed;
    std::size_t x = net_.input("state", {B, num_features, window});
    std::size_t a = net_.input("action", {B, 1});
    std::size_t f = build_trunk(net_, x, B, num_features, window, arch, rng, "");
    std::size_t ws = net_.param("state_embed.w",
                                uniform_init({E, arch.channels * window}, arch.init_scale, rng));
    std::size_t bs = net_.param("state_embed.b", nd::Tensor::zeros({E}));
    std::size_t wa = net_.param("action_embed.w", uniform_init({E, 1}, arch.init_scale, rng));
    std::size_t ba = net_.param("action_embed.b", nd::Tensor::zeros({E}));
    std::size_t z = net_.relu(net_.add(net_.dense(f, ws, bs), net_.dense(a, wa, ba)));
    std::size_t wq = net_.param("q_head.w", nd::Tensor::zeros({1, E}));
    std::size_t bq = net_.param("q_head.b", nd::Tensor::zeros({1}));
    std::size_t per_asset = net_.dense(z, wq, bq); // (B, 1)
    net_.mark_output("q", net_.sum(per_asset));
}

double Critic::q(const market::StateTensor& s, const env::WeightVector& a) {
    require(a.size() == num_assets_ + 1, "Critic::q: action has ", a.size(),
            " components, expected ", num_assets_ + 1);
    net_.set_input("state", with_cash_stream(s));
    nd::Tensor at = nd::Tensor::zeros({num_assets_ + 1, 1});
    at.data = a.w;
    net_.set_input("action", at);
    net_.run();
    return net_.output("q").data[0];
}

GaussianPolicy::GaussianPolicy(std::size_t num_assets, std::size_t num_features,
                               std::size_t window, const ArchConfig& arch, Rng& rng)
    : num_assets_(num_assets) {
    check_arch(arch);
    require(num_assets >= 1, "GaussianPolicy: need at least one asset");
    const std::size_t B = num_assets + 1;
    const std::size_t E = arch.embed;
    {
        nd::Graph& g = actor_;
        std::size_t x = g.input("state", {B, num_features, window});
        std::size_t f = build_trunk(g, x, B, num_features, window, arch, rng, "");
        std::size_t we = g.param("embed.w",
                                 uniform_init({E, arch.channels * window}, arch.init_scale, rng));
        std::size_t be = g.param("embed.b", nd::Tensor::zeros({E}));
        std::size_t e = g.relu(g.dense(f, we, be)); // (B, E)
        std::size_t wm = g.param("mean_head.w", nd::Tensor::zeros({1, E}));
        std::size_t bm = g.param("mean_head.b", nd::Tensor::zeros({1}));
        g.mark_output("mean", g.reshape(g.dense(e, wm, bm), {1, B}));
        std::size_t wsd = g.param("std_head.w", nd::Tensor::zeros({1, E}));
        std::size_t bsd = g.param("std_head.b", nd::Tensor::zeros({1}));
        std::size_t raw = g.reshape(g.dense(e, wsd, bsd), {1, B});
        g.mark_output("std", g.softplus(raw, arch.std_floor));
    }
    {
        nd::Graph& g = value_;
        std::size_t x = g.input("state", {B, num_features, window});
        std::size_t f = build_trunk(g, x, B, num_features, window, arch, rng, "");
        std::size_t we = g.param("embed.w",
                                 uniform_init({E, arch.channels * window}, arch.init_scale, rng));
        std::size_t be = g.param("embed.b", nd::Tensor::zeros({E}));
        std::size_t e = g.relu(g.dense(f, we, be));
        std::size_t wv = g.param("value_head.w", nd::Tensor::zeros({1, E}));
        std::size_t bv = g.param("value_head.b", nd::Tensor::zeros({1}));
        g.mark_output("value", g.sum(g.dense(e, wv, bv)));
    }
}

GaussianPolicy::Moments GaussianPolicy::moments(const market::StateTensor& s) {
    actor_.set_input("state", with_cash_stream(s));
    actor_.run();
    Moments mo;
    mo.mean = actor_.output("mean").data;
    mo.std = actor_.output("std").data;
    return mo;
}

double GaussianPolicy::value(const market::StateTensor& s) {
    value_.set_input("state", with_cash_stream(s));
    value_.run();
    return value_.output("value").data[0];
}

std::vector<double> GaussianPolicy::sample(const Moments& mo, Rng& rng) {
    require(mo.mean.size() == mo.std.size(), "GaussianPolicy::sample: mismatched moments");
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> raw(mo.mean.size());
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = mo.mean[i] + mo.std[i] * gauss(rng);
    return raw;
}

double GaussianPolicy::log_prob(const std::vector<double>& raw, const Moments& mo) {
    require(raw.size() == mo.mean.size() && raw.size() == mo.std.size(),
            "GaussianPolicy::log_prob: mismatched sizes");
    double lp = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        require(mo.std[i] > 0.0, "GaussianPolicy::log_prob: nonpositive std at ", i);
        double z = (raw[i] - mo.mean[i]) / mo.std[i];
        lp += -0.5 * z * z - std::log(mo.std[i]) - 0.5 * kLog2Pi;
    }
    return lp;
}

env::WeightVector GaussianPolicy::execute(const std::vector<double>& raw) {
    env::WeightVector out;
    out.w = nd::stable_softmax(raw);
    return out;
}

} // namespace folio::policy
