#pragma once

#include <string>
#include <vector>

#include "folio/cli/config.hpp"

namespace folio::cli {

// Writes one CSV per synthetic asset plus a manifest.json into out_dir.
void cmd_gen_data(const std::string& spec_path, const std::string& out_dir,
                  std::uint64_t seed);

// Trains the configured agent on the training span and writes
// resolved_config.json, checkpoint.json (plus critic.json / value.json where
// the agent has one) and train_log.jsonl into the output directory.
void cmd_train(const std::string& config_path, const CliOverrides& overrides = {});

// Replays a frozen policy over the held-out test span and writes curve.csv,
// metrics.json and curve_vs_ucrp.csv. Trainable agents require a checkpoint;
// baselines run without one.
void cmd_backtest(const std::string& config_path, const std::string& checkpoint_path,
                  const CliOverrides& overrides = {});

// Welch-compares two groups of completed backtests (each directory must hold
// a metrics.json) and writes comparison.csv / comparison.json into out_dir.
void cmd_compare(const std::vector<std::string>& group_a,
                 const std::vector<std::string>& group_b, const std::string& out_dir);

} // namespace folio::cli
