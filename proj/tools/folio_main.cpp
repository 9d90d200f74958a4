#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "folio/cli/commands.hpp"
#include "folio/common.hpp"

int main(int argc, char** argv) {
    CLI::App app{"folio: deep reinforcement-learning portfolio management"};
    app.require_subcommand(1);

    // gen-data
    std::string spec_path, gen_out;
    std::uint64_t gen_seed = 0;
    CLI::App* gen = app.add_subcommand("gen-data", "generate a synthetic OHLCV dataset");
    gen->add_option("--spec", spec_path, "synthetic dataset spec (JSON)")->required();
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--seed", gen_seed, "random seed");

    auto add_run_flags = [](CLI::App* cmd, std::string& config, std::string& seed,
                            std::string& out, std::string& features) {
        cmd->add_option("--config", config, "run config (JSON)")->required();
        cmd->add_option("--seed", seed, "override the config's seed");
        cmd->add_option("--out", out, "override the config's output directory");
        cmd->add_option("--features", features,
                        "override the feature set, e.g. close or close+high+volume");
    };
    auto make_overrides = [](const std::string& seed, const std::string& out,
                             const std::string& features) {
        folio::cli::CliOverrides ov;
        if (!seed.empty()) ov.seed = std::stoull(seed);
        if (!out.empty()) ov.out_dir = out;
        if (!features.empty()) ov.features = features;
        return ov;
    };

    // train
    std::string train_config, train_seed, train_out, train_features;
    CLI::App* train = app.add_subcommand("train", "train an agent on the training span");
    add_run_flags(train, train_config, train_seed, train_out, train_features);

    // backtest
    std::string bt_config, bt_seed, bt_out, bt_features, bt_checkpoint;
    CLI::App* bt = app.add_subcommand("backtest",
                                      "replay a frozen policy over the test span");
    add_run_flags(bt, bt_config, bt_seed, bt_out, bt_features);
    bt->add_option("--checkpoint", bt_checkpoint, "trained policy parameters (JSON)");

    // compare
    std::vector<std::string> cmp_a, cmp_b;
    std::string cmp_out;
    CLI::App* cmp = app.add_subcommand("compare",
                                       "Welch-test two groups of backtest runs");
    cmp->add_option("--a", cmp_a, "run directories of group A")->required();
    cmp->add_option("--b", cmp_b, "run directories of group B")->required();
    cmp->add_option("--out", cmp_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            folio::cli::cmd_gen_data(spec_path, gen_out, gen_seed);
        } else if (train->parsed()) {
            folio::cli::cmd_train(train_config,
                                  make_overrides(train_seed, train_out, train_features));
        } else if (bt->parsed()) {
            folio::cli::cmd_backtest(bt_config, bt_checkpoint,
                                     make_overrides(bt_seed, bt_out, bt_features));
        } else if (cmp->parsed()) {
            folio::cli::cmd_compare(cmp_a, cmp_b, cmp_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
