#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "folio/env/env.hpp"
#include "folio/policy/nets.hpp"

namespace folio::cli {

// Dataset descriptor: asset CSV paths (relative to the manifest file),
// optional date clip, and default feature set / observation window for runs
// that do not set their own.
struct Manifest {
    struct Asset {
        std::string id;
        std::string path;
    };
    std::vector<Asset> assets;
    std::optional<market::Date> start, end;
    std::optional<std::string> features;
    std::optional<std::size_t> window;
};

Manifest load_manifest(const std::string& path);

// Loads every asset in the manifest, aligns to one calendar, and applies the
// manifest's date clip.
market::Panel load_panel(const Manifest& m, const std::string& manifest_path);

struct TrainConfig {
    std::string optimizer; // "adam" | "sgd"; empty = per-agent default
    std::optional<double> actor_lr, critic_lr;
    std::size_t epochs = 1000;    // pg rollout-update rounds
    std::size_t episodes = 50;    // ddpg episodes
    std::size_t iterations = 200; // ppo collection rounds
    std::size_t inner_epochs = 4; // ppo passes per round
    double clip = 0.2;
    double tau = 0.01;
    std::size_t buffer_capacity = 10000;
    std::size_t batch_size = 64;
    double ou_theta = 0.15, ou_sigma = 0.2, ou_dt = 1.0;
};

struct SplitConfig {
    market::Date train_start, train_end, test_start, test_end;
};

struct RunConfig {
    std::string manifest;
    std::string agent; // pg | ddpg | ppo | ucrp | winner | loser
    std::uint64_t seed = 0;
    std::string out_dir;
    env::EnvConfig env;
    policy::ArchConfig arch;
    TrainConfig train;
    SplitConfig split;
    std::size_t lookback = 10; // momentum-baseline window
    bool ucrp_include_cash = true;

    bool trainable() const { return agent == "pg" || agent == "ddpg" || agent == "ppo"; }
};

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> features;
};

// Parses and validates a run config, reporting every problem at once.
// Omitted optimizer/learning-rate fields are materialized per agent kind
// (pg: adam 1e-3; ddpg: adam, actor 1e-3, critic 1e-1; ppo: sgd 1e-3).
RunConfig load_run_config(const std::string& path, const CliOverrides& overrides = {});

// Fully materialized JSON snapshot; feeding it back through load_run_config
// reproduces the run. The manifest path is absolute in the snapshot.
nlohmann::json run_config_json(const RunConfig& cfg);

// The config with its data attached and split dates mapped to decision-index
// spans (a decision at index t consumes the relatives at t+1; the span
// [begin, end) therefore realizes returns from date(begin) to date(end)).
struct ResolvedRun {
    RunConfig cfg;
    market::Panel panel;
    std::size_t train_begin = 0, train_end = 0;
    std::size_t test_begin = 0, test_end = 0;
};

ResolvedRun resolve_run(const RunConfig& cfg);

} // namespace folio::cli
