#include "folio/cli/config.hpp"

#include <filesystem>
#include <fstream>

#include "folio/common.hpp"

namespace fs = std::filesystem;

namespace folio::cli {

namespace {

nlohmann::json parse_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    require(in.good(), "cannot open ", what, " file ", path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(what, " file ", path, " is not valid JSON: ", e.what());
    }
    require(j.is_object(), what, " file ", path, " must hold a JSON object");
    return j;
}

// Collects validation problems so a bad config reports everything at once.
struct Problems {
    std::vector<std::string> items;

    template <typename... Args>
    void add(const Args&... args) {
        items.push_back(msg(args...));
    }
    void check(const std::string& path) const {
        if (items.empty()) return;
        std::string all = "invalid run config " + path + ":";
        for (const auto& s : items) all += "\n  - " + s;
        throw Error(all);
    }
};

void reject_unknown_keys(const nlohmann::json& obj, const char* where,
                         std::initializer_list<const char*> allowed, Problems& probs) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known) probs.add(where, ": unknown key \"", it.key(), '"');
    }
}

template <typename T>
bool fetch(const nlohmann::json& obj, const char* key, T& out, const char* where,
           Problems& probs) {
    auto it = obj.find(key);
    if (it == obj.end()) return false;
    try {
        out = it->get<T>();
        return true;
    } catch (const nlohmann::json::exception&) {
        probs.add(where, ".", key, ": wrong type (", it->dump(), ")");
        return false;
    }
}

bool fetch_date(const nlohmann::json& obj, const char* key, market::Date& out,
                const char* where, Problems& probs) {
    std::string s;
    if (!fetch(obj, key, s, where, probs)) {
        probs.add(where, ".", key, ": missing required date");
        return false;
    }
    try {
        out = market::parse_date(s);
        return true;
    } catch (const Error& e) {
        probs.add(where, ".", key, ": ", e.what());
        return false;
    }
}

} // namespace

Manifest load_manifest(const std::string& path) {
    nlohmann::json j = parse_json_file(path, "manifest");
    Problems probs;
    reject_unknown_keys(j, "manifest", {"assets", "start", "end", "features", "window"},
                        probs);

    Manifest m;
    auto assets = j.find("assets");
    if (assets == j.end() || !assets->is_array() || assets->empty()) {
        probs.add("manifest.assets: must be a non-empty array");
    } else {
        for (const auto& a : *assets) {
            Manifest::Asset ma;
            if (!a.is_object() || !fetch(a, "id", ma.id, "manifest.assets[]", probs) ||
                !fetch(a, "path", ma.path, "manifest.assets[]", probs)) {
                probs.add("manifest.assets[]: each entry needs string id and path");
                continue;
            }
            m.assets.push_back(std::move(ma));
        }
    }
    for (const char* key : {"start", "end"}) {
        if (j.contains(key)) {
            market::Date d{};
            if (fetch_date(j, key, d, "manifest", probs))
                (key == std::string("start") ? m.start : m.end) = d;
        }
    }
    std::string feats;
    if (fetch(j, "features", feats, "manifest", probs)) {
        try {
            market::parse_features(feats);
            m.features = feats;
        } catch (const Error& e) {
            probs.add("manifest.features: ", e.what());
        }
    }
    std::size_t w = 0;
    if (fetch(j, "window", w, "manifest", probs)) {
        if (w < 1)
            probs.add("manifest.window: must be at least 1");
        else
            m.window = w;
    }
    probs.check(path);
    return m;
}

market::Panel load_panel(const Manifest& m, const std::string& manifest_path) {
    const fs::path base = fs::path(manifest_path).parent_path();
    std::vector<market::AssetSeries> series;
    series.reserve(m.assets.size());
    for (const auto& a : m.assets) {
        fs::path p = a.path;
        if (p.is_relative()) p = base / p;
        market::AssetSeries s = market::load_ohlcv(p.string());
        s.asset_id = a.id;
        series.push_back(std::move(s));
    }
    market::Panel panel = market::align_and_fill(series);
    if (m.start || m.end) {
        std::size_t lo = m.start ? panel.index_at_or_after(*m.start) : 0;
        std::size_t hi = m.end ? panel.index_at_or_before(*m.end) + 1 : panel.num_days();
        panel = market::slice_panel(panel, lo, hi);
    }
    return panel;
}

RunConfig load_run_config(const std::string& path, const CliOverrides& overrides) {
    nlohmann::json j = parse_json_file(path, "run config");
    Problems probs;
    reject_unknown_keys(j,
                        "config",
                        {"manifest", "agent", "seed", "out_dir", "env", "arch", "train",
                         "split", "lookback", "ucrp_include_cash"},
                        probs);

    RunConfig cfg;
    if (!fetch(j, "manifest", cfg.manifest, "config", probs) || cfg.manifest.empty())
        probs.add("config.manifest: required path to a dataset manifest");
    if (!fetch(j, "agent", cfg.agent, "config", probs)) {
        probs.add("config.agent: required");
    } else if (cfg.agent != "pg" && cfg.agent != "ddpg" && cfg.agent != "ppo" &&
               cfg.agent != "ucrp" && cfg.agent != "winner" && cfg.agent != "loser") {
        probs.add("config.agent: unknown agent kind \"", cfg.agent,
                  "\" (expected pg, ddpg, ppo, ucrp, winner or loser)");
    }
    fetch(j, "seed", cfg.seed, "config", probs);
    if (!fetch(j, "out_dir", cfg.out_dir, "config", probs) || cfg.out_dir.empty())
        probs.add("config.out_dir: required output directory");
    fetch(j, "lookback", cfg.lookback, "config", probs);
    if (cfg.lookback < 1) probs.add("config.lookback: must be at least 1");
    fetch(j, "ucrp_include_cash", cfg.ucrp_include_cash, "config", probs);

    bool features_given = false;
    bool window_given = false;
    if (j.contains("env")) {
        const auto& e = j["env"];
        if (!e.is_object()) {
            probs.add("config.env: must be an object");
        } else {
            reject_unknown_keys(e, "config.env",
                                {"cost_rate", "gamma", "risk_beta", "risk_window",
                                 "window", "features", "noise_sigma"},
                                probs);
            fetch(e, "cost_rate", cfg.env.cost_rate, "config.env", probs);
            fetch(e, "gamma", cfg.env.gamma, "config.env", probs);
            fetch(e, "risk_beta", cfg.env.risk_beta, "config.env", probs);
            fetch(e, "risk_window", cfg.env.risk_window, "config.env", probs);
            window_given = fetch(e, "window", cfg.env.window, "config.env", probs);
            fetch(e, "noise_sigma", cfg.env.noise_sigma, "config.env", probs);
            std::string feats;
            if (fetch(e, "features", feats, "config.env", probs)) {
                try {
                    cfg.env.features = market::parse_features(feats);
                    features_given = true;
                } catch (const Error& ex) {
                    probs.add("config.env.features: ", ex.what());
                }
            }
            if (cfg.env.cost_rate < 0.0) probs.add("config.env.cost_rate: must be >= 0");
            if (!(cfg.env.gamma > 0.0 && cfg.env.gamma <= 1.0))
                probs.add("config.env.gamma: must be in (0, 1]");
            if (cfg.env.risk_beta < 0.0) probs.add("config.env.risk_beta: must be >= 0");
            if (cfg.env.risk_window < 1)
                probs.add("config.env.risk_window: must be at least 1");
            if (cfg.env.window < 1) probs.add("config.env.window: must be at least 1");
            if (cfg.env.noise_sigma < 0.0)
                probs.add("config.env.noise_sigma: must be >= 0");
        }
    }

    if (j.contains("arch")) {
        const auto& a = j["arch"];
        if (!a.is_object()) {
            probs.add("config.arch: must be an object");
        } else {
            reject_unknown_keys(a, "config.arch",
                                {"channels", "kernel", "residual_blocks", "embed",
                                 "init_scale", "std_floor"},
                                probs);
            fetch(a, "channels", cfg.arch.channels, "config.arch", probs);
            fetch(a, "kernel", cfg.arch.kernel, "config.arch", probs);
            fetch(a, "residual_blocks", cfg.arch.residual_blocks, "config.arch", probs);
            fetch(a, "embed", cfg.arch.embed, "config.arch", probs);
            fetch(a, "init_scale", cfg.arch.init_scale, "config.arch", probs);
            fetch(a, "std_floor", cfg.arch.std_floor, "config.arch", probs);
            if (cfg.arch.channels < 1) probs.add("config.arch.channels: must be >= 1");
            if (cfg.arch.kernel % 2 == 0 || cfg.arch.kernel < 1)
                probs.add("config.arch.kernel: must be odd and >= 1");
            if (cfg.arch.embed < 1) probs.add("config.arch.embed: must be >= 1");
            if (cfg.arch.init_scale <= 0.0)
                probs.add("config.arch.init_scale: must be > 0");
            if (cfg.arch.std_floor <= 0.0) probs.add("config.arch.std_floor: must be > 0");
        }
    }

    if (j.contains("train")) {
        const auto& t = j["train"];
        if (!t.is_object()) {
            probs.add("config.train: must be an object");
        } else {
            reject_unknown_keys(t, "config.train",
                                {"optimizer", "actor_lr", "critic_lr", "epochs",
                                 "episodes", "iterations", "inner_epochs", "clip", "tau",
                                 "buffer_capacity", "batch_size", "ou_theta", "ou_sigma",
                                 "ou_dt"},
                                probs);
            fetch(t, "optimizer", cfg.train.optimizer, "config.train", probs);
            if (!cfg.train.optimizer.empty() && cfg.train.optimizer != "adam" &&
                cfg.train.optimizer != "sgd")
                probs.add("config.train.optimizer: must be \"adam\" or \"sgd\", got \"",
                          cfg.train.optimizer, '"');
            double lr = 0.0;
            if (fetch(t, "actor_lr", lr, "config.train", probs)) {
                if (lr < 0.0)
                    probs.add("config.train.actor_lr: must be >= 0");
                else
                    cfg.train.actor_lr = lr;
            }
            if (fetch(t, "critic_lr", lr, "config.train", probs)) {
                if (lr < 0.0)
                    probs.add("config.train.critic_lr: must be >= 0");
                else
                    cfg.train.critic_lr = lr;
            }
            fetch(t, "epochs", cfg.train.epochs, "config.train", probs);
            fetch(t, "episodes", cfg.train.episodes, "config.train", probs);
            fetch(t, "iterations", cfg.train.iterations, "config.train", probs);
            fetch(t, "inner_epochs", cfg.train.inner_epochs, "config.train", probs);
            fetch(t, "clip", cfg.train.clip, "config.train", probs);
            fetch(t, "tau", cfg.train.tau, "config.train", probs);
            fetch(t, "buffer_capacity", cfg.train.buffer_capacity, "config.train", probs);
            fetch(t, "batch_size", cfg.train.batch_size, "config.train", probs);
            fetch(t, "ou_theta", cfg.train.ou_theta, "config.train", probs);
            fetch(t, "ou_sigma", cfg.train.ou_sigma, "config.train", probs);
            fetch(t, "ou_dt", cfg.train.ou_dt, "config.train", probs);
            if (cfg.train.inner_epochs < 1)
                probs.add("config.train.inner_epochs: must be at least 1");
            if (cfg.train.clip <= 0.0) probs.add("config.train.clip: must be > 0");
            if (!(cfg.train.tau > 0.0 && cfg.train.tau <= 1.0))
                probs.add("config.train.tau: must be in (0, 1]");
            if (cfg.train.buffer_capacity < 1)
                probs.add("config.train.buffer_capacity: must be at least 1");
            if (cfg.train.batch_size < 1)
                probs.add("config.train.batch_size: must be at least 1");
            if (cfg.train.batch_size > cfg.train.buffer_capacity)
                probs.add("config.train.batch_size: exceeds buffer_capacity");
            if (cfg.train.ou_theta < 0.0) probs.add("config.train.ou_theta: must be >= 0");
            if (cfg.train.ou_sigma < 0.0) probs.add("config.train.ou_sigma: must be >= 0");
            if (cfg.train.ou_dt <= 0.0) probs.add("config.train.ou_dt: must be > 0");
        }
    }

    if (!j.contains("split")) {
        probs.add("config.split: required (train_start, train_end, test_start, test_end)");
    } else if (!j["split"].is_object()) {
        probs.add("config.split: must be an object");
    } else {
        const auto& s = j["split"];
        reject_unknown_keys(s, "config.split",
                            {"train_start", "train_end", "test_start", "test_end"}, probs);
        bool ok = true;
        ok &= fetch_date(s, "train_start", cfg.split.train_start, "config.split", probs);
        ok &= fetch_date(s, "train_end", cfg.split.train_end, "config.split", probs);
        ok &= fetch_date(s, "test_start", cfg.split.test_start, "config.split", probs);
        ok &= fetch_date(s, "test_end", cfg.split.test_end, "config.split", probs);
        if (ok) {
            if (!(cfg.split.train_start < cfg.split.train_end))
                probs.add("config.split: train_start must precede train_end");
            if (!(cfg.split.test_start < cfg.split.test_end))
                probs.add("config.split: test_start must precede test_end");
            if (cfg.split.test_start < cfg.split.train_end)
                probs.add("config.split: test span overlaps the training span ",
                          "(test_start ", market::format_date(cfg.split.test_start),
                          " is before train_end ",
                          market::format_date(cfg.split.train_end), ")");
        }
    }

    // Apply command-line overrides before the defaults are materialized.
    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
    if (overrides.features) {
        try {
            cfg.env.features = market::parse_features(*overrides.features);
            features_given = true;
        } catch (const Error& ex) {
            probs.add("--features: ", ex.what());
        }
    }

    // Per-agent defaults for fields the config left open.
    if (cfg.train.optimizer.empty())
        cfg.train.optimizer = cfg.agent == "ppo" ? "sgd" : "adam";
    if (!cfg.train.actor_lr) cfg.train.actor_lr = 1e-3;
    if (!cfg.train.critic_lr) cfg.train.critic_lr = cfg.agent == "ddpg" ? 1e-1 : 1e-3;

    probs.check(path);

    // Resolve the manifest path relative to the config file so a config is
    // usable from any working directory.
    fs::path mp = cfg.manifest;
    if (mp.is_relative()) mp = fs::path(path).parent_path() / mp;
    cfg.manifest = mp.lexically_normal().string();

    // Pull manifest-level feature/window defaults only when the config and
    // command line were silent.
    Manifest man = load_manifest(cfg.manifest);
    if (!features_given && man.features) cfg.env.features = market::parse_features(*man.features);
    if (!window_given && man.window) cfg.env.window = *man.window;

    return cfg;
}

nlohmann::json run_config_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["manifest"] = fs::absolute(cfg.manifest).lexically_normal().string();
    j["agent"] = cfg.agent;
    j["seed"] = cfg.seed;
    j["out_dir"] = cfg.out_dir;
    j["lookback"] = cfg.lookback;
    j["ucrp_include_cash"] = cfg.ucrp_include_cash;
    j["env"] = {{"cost_rate", cfg.env.cost_rate},
                {"gamma", cfg.env.gamma},
                {"risk_beta", cfg.env.risk_beta},
                {"risk_window", cfg.env.risk_window},
                {"window", cfg.env.window},
                {"features", market::format_features(cfg.env.features)},
                {"noise_sigma", cfg.env.noise_sigma}};
    j["arch"] = {{"channels", cfg.arch.channels},
                 {"kernel", cfg.arch.kernel},
                 {"residual_blocks", cfg.arch.residual_blocks},
                 {"embed", cfg.arch.embed},
                 {"init_scale", cfg.arch.init_scale},
                 {"std_floor", cfg.arch.std_floor}};
    j["train"] = {{"optimizer", cfg.train.optimizer},
                  {"actor_lr", *cfg.train.actor_lr},
                  {"critic_lr", *cfg.train.critic_lr},
                  {"epochs", cfg.train.epochs},
                  {"episodes", cfg.train.episodes},
                  {"iterations", cfg.train.iterations},
                  {"inner_epochs", cfg.train.inner_epochs},
                  {"clip", cfg.train.clip},
                  {"tau", cfg.train.tau},
                  {"buffer_capacity", cfg.train.buffer_capacity},
                  {"batch_size", cfg.train.batch_size},
                  {"ou_theta", cfg.train.ou_theta},
                  {"ou_sigma", cfg.train.ou_sigma},
                  {"ou_dt", cfg.train.ou_dt}};
    j["split"] = {{"train_start", market::format_date(cfg.split.train_start)},
                  {"train_end", market::format_date(cfg.split.train_end)},
                  {"test_start", market::format_date(cfg.split.test_start)},
                  {"test_end", market::format_date(cfg.split.test_end)}};
    return j;
}

ResolvedRun resolve_run(const RunConfig& cfg) {
    ResolvedRun r;
    r.cfg = cfg;
    Manifest man = load_manifest(cfg.manifest);
    r.panel = load_panel(man, cfg.manifest);

    const std::size_t min_first = std::max<std::size_t>(
        cfg.env.window - 1, cfg.agent == "winner" || cfg.agent == "loser" ? cfg.lookback : 0);

    auto span = [&](market::Date d0, market::Date d1, const char* what) {
        std::size_t b = r.panel.index_at_or_after(d0);
        std::size_t e = r.panel.index_at_or_before(d1);
        require(b < e, what, " span [", market::format_date(d0), ", ",
                market::format_date(d1), "] maps to an empty decision range");
        require(e < r.panel.num_days(), what, " span end leaves no next-day relatives");
        require(b >= min_first, what, " span starts at ",
                market::format_date(r.panel.calendar[b]), " but the first usable decision",
                " day on this dataset is ", market::format_date(r.panel.calendar[min_first]),
                " (observation window ", cfg.env.window,
                cfg.agent == "winner" || cfg.agent == "loser"
                    ? msg(", baseline lookback ", cfg.lookback)
                    : std::string(),
                ")");
        return std::pair<std::size_t, std::size_t>(b, e);
    };

    std::tie(r.train_begin, r.train_end) = span(cfg.split.train_start, cfg.split.train_end,
                                                "train");
    std::tie(r.test_begin, r.test_end) = span(cfg.split.test_start, cfg.split.test_end,
                                              "test");
    require(r.test_begin >= r.train_end,
            "test span overlaps the training span after date resolution");
    return r;
}

} // namespace folio::cli
