#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "folio/cli/commands.hpp"
#include "folio/cli/config.hpp"
#include "folio/common.hpp"
#include "folio/eval/backtest.hpp"
#include "folio/eval/metrics.hpp"
#include "folio/eval/stats.hpp"
#include "folio/market/panel.hpp"
#include "folio/ndcore/checkpoint.hpp"
#include "folio/policy/nets.hpp"

#include "helpers.hpp"

using namespace folio;
using doctest::Contains;
namespace fs = std::filesystem;

namespace {

// The commands narrate to stdout; keep the test log quiet but capture the
// text so summaries can be asserted on.
struct CapturedCout {
    CapturedCout() : old_(std::cout.rdbuf(sink_.rdbuf())) {}
    ~CapturedCout() { std::cout.rdbuf(old_); }
    std::string text() const { return sink_.str(); }

private:
    std::ostringstream sink_;
    std::streambuf* old_;
};

template <typename Fn>
std::string error_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    FAIL("expected an Error to be thrown");
    return {};
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++n;
    return n;
}

nlohmann::json asset_spec(const std::string& id, double p0, double drift, double vol,
                          double volume = 1e6) {
    return {{"id", id},
            {"init_price", p0},
            {"drift", drift},
            {"volatility", vol},
            {"base_volume", volume}};
}

nlohmann::json dataset_spec(std::size_t days, const std::vector<nlohmann::json>& assets) {
    nlohmann::json j{{"days", days}, {"start", "2020-01-06"}, {"intraday_range", 0.002}};
    j["assets"] = nlohmann::json::array();
    for (const auto& a : assets) j["assets"].push_back(a);
    return j;
}

struct Dataset {
    std::string manifest;
    market::Panel panel;
};

// Generates a dataset under dir/<sub> and loads it back.
Dataset gen_dataset(const test::TempDir& dir, const nlohmann::json& spec,
                    std::uint64_t seed, const std::string& sub = "data") {
    const std::string spec_path = dir.str(sub + "_spec.json");
    test::write_file(spec_path, spec.dump(2));
    {
        CapturedCout quiet;
        cli::cmd_gen_data(spec_path, dir.str(sub), seed);
    }
    Dataset d;
    d.manifest = dir.str(sub + "/manifest.json");
    d.panel = cli::load_panel(cli::load_manifest(d.manifest), d.manifest);
    return d;
}

// Three mixed-drift assets over 90 days; generic fixture for config tests.
Dataset generic_dataset(const test::TempDir& dir, std::uint64_t seed = 7) {
    return gen_dataset(dir,
                       dataset_spec(90, {asset_spec("alpha", 100.0, 0.0004, 0.01),
                                         asset_spec("beta", 50.0, 0.0, 0.015),
                                         asset_spec("gamma", 20.0, -0.0003, 0.02)}),
                       seed);
}

// Noise-free panel where one asset strictly dominates; the policy-gradient
// learner should discover it quickly.
Dataset dominant_dataset(const test::TempDir& dir) {
    return gen_dataset(dir,
                       dataset_spec(60, {asset_spec("up", 100.0, 0.004, 0.0),
                                         asset_spec("flat", 100.0, 0.0, 0.0),
                                         asset_spec("down", 100.0, -0.004, 0.0)}),
                       1);
}

nlohmann::json tiny_arch_json() {
    return {{"channels", 1}, {"kernel", 1}, {"residual_blocks", 0}, {"embed", 2}};
}

nlohmann::json split_json(const market::Panel& p, std::size_t ts, std::size_t te,
                          std::size_t vs, std::size_t ve) {
    return {{"train_start", market::format_date(p.calendar[ts])},
            {"train_end", market::format_date(p.calendar[te])},
            {"test_start", market::format_date(p.calendar[vs])},
            {"test_end", market::format_date(p.calendar[ve])}};
}

// Baseline run config on the 90-day generic dataset: train decisions [4, 60),
// test decisions [60, 89), observation window 5.
nlohmann::json run_config(const Dataset& d, const std::string& agent,
                          const std::string& out_dir) {
    nlohmann::json j;
    j["manifest"] = d.manifest;
    j["agent"] = agent;
    j["seed"] = 3;
    j["out_dir"] = out_dir;
    j["env"] = {{"window", 5}};
    j["arch"] = tiny_arch_json();
    j["split"] = split_json(d.panel, 4, 60, 60, 89);
    return j;
}

std::string write_config(const test::TempDir& dir, const nlohmann::json& j,
                         const std::string& name) {
    const std::string path = dir.str(name);
    test::write_file(path, j.dump(2));
    return path;
}

std::string curve_csv_replica(const eval::EquityCurve& curve) {
    std::string out = "date,value,turnover\n";
    for (std::size_t i = 0; i < curve.values.size(); ++i) {
        out += market::format_date(curve.dates[i]) + "," + format_double(curve.values[i]) +
               "," + format_double(i == 0 ? 0.0 : curve.turnover[i - 1]) + "\n";
    }
    return out;
}

} // namespace

TEST_CASE("gen-data writes a loadable per-asset dataset with a manifest") {
    test::TempDir dir("cli_gen");
    nlohmann::json spec =
        dataset_spec(1500, {asset_spec("a1", 100.0, 0.0004, 0.01),
                            asset_spec("a2", 80.0, 0.0002, 0.015),
                            asset_spec("a3", 60.0, 0.0, 0.02),
                            asset_spec("a4", 40.0, -0.0002, 0.012),
                            asset_spec("a5", 20.0, -0.0004, 0.018)});
    const std::string spec_path = dir.str("spec.json");
    test::write_file(spec_path, spec.dump(2));

    CapturedCout quiet;
    cli::cmd_gen_data(spec_path, dir.str("out1"), 11);
    CHECK(quiet.text() == "generated 5 synthetic assets x 1500 days in " + dir.str("out1") +
                              "\n");

    // One CSV per asset, 1500 data rows under the OHLCV header.
    for (const std::string id : {"a1", "a2", "a3", "a4", "a5"}) {
        const std::string csv = test::read_file(dir.str("out1/" + id + ".csv"));
        std::vector<std::string> lines = lines_of(csv);
        REQUIRE(lines.size() == 1501);
        CHECK(lines[0] == "date,open,high,low,close,volume");
        CHECK(lines[1].substr(0, 11) == "2020-01-06,");
    }

    // The manifest round-trips through the loaders.
    cli::Manifest man = cli::load_manifest(dir.str("out1/manifest.json"));
    REQUIRE(man.assets.size() == 5);
    CHECK(man.assets[0].id == "a1");
    CHECK(man.assets[0].path == "a1.csv");
    REQUIRE(man.features.has_value());
    CHECK(*man.features == "close");
    REQUIRE(man.window.has_value());
    CHECK(*man.window == 10);

    market::Panel p = cli::load_panel(man, dir.str("out1/manifest.json"));
    CHECK(p.num_assets() == 5);
    CHECK(p.num_days() == 1500);
    CHECK(p.asset_ids == std::vector<std::string>{"a1", "a2", "a3", "a4", "a5"});
    CHECK(market::format_date(p.calendar.front()) == "2020-01-06");
    REQUIRE(man.start.has_value());
    REQUIRE(man.end.has_value());
    CHECK(*man.start == p.calendar.front());
    CHECK(*man.end == p.calendar.back());
    for (double c : p.close) CHECK(c > 0.0);

    // Same seed reproduces every file byte for byte; a different seed does not.
    cli::cmd_gen_data(spec_path, dir.str("out2"), 11);
    for (const std::string f :
         {"manifest.json", "a1.csv", "a2.csv", "a3.csv", "a4.csv", "a5.csv"})
        CHECK(test::read_file(dir.str("out1/" + f)) == test::read_file(dir.str("out2/" + f)));

    cli::cmd_gen_data(spec_path, dir.str("out3"), 12);
    CHECK(test::read_file(dir.str("out1/a1.csv")) != test::read_file(dir.str("out3/a1.csv")));
}

TEST_CASE("gen-data rejects bad specs and unwritable destinations") {
    test::TempDir dir("cli_gen_bad");
    CapturedCout quiet;

    auto write_spec = [&](const nlohmann::json& j, const std::string& name) {
        test::write_file(dir.str(name), j.dump());
        return dir.str(name);
    };

    // A single day supports no price relative.
    nlohmann::json one_day = dataset_spec(1, {asset_spec("x", 10.0, 0.0, 0.0)});
    CHECK_THROWS_WITH_AS(cli::cmd_gen_data(write_spec(one_day, "one.json"), dir.str("o"), 0),
                         Contains("days must be at least 2"), Error);

    nlohmann::json no_days{{"assets", nlohmann::json::array({asset_spec("x", 10, 0, 0)})}};
    CHECK_THROWS_WITH_AS(cli::cmd_gen_data(write_spec(no_days, "nd.json"), dir.str("o"), 0),
                         Contains("missing \"days\""), Error);

    nlohmann::json no_assets{{"days", 10}, {"assets", nlohmann::json::array()}};
    CHECK_THROWS_WITH_AS(cli::cmd_gen_data(write_spec(no_assets, "na.json"), dir.str("o"), 0),
                         Contains("\"assets\" must be a non-empty array"), Error);

    test::write_file(dir.str("arr.json"), "[1, 2]");
    CHECK_THROWS_WITH_AS(cli::cmd_gen_data(dir.str("arr.json"), dir.str("o"), 0),
                         Contains("must be a JSON object"), Error);

    CHECK_THROWS_WITH_AS(cli::cmd_gen_data(dir.str("absent.json"), dir.str("o"), 0),
                         Contains("cannot open synthetic spec file"), Error);

    // A regular file where a directory component should be makes the
    // destination uncreatable.
    test::write_file(dir.str("block"), "x");
    nlohmann::json ok = dataset_spec(5, {asset_spec("x", 10.0, 0.0, 0.0)});
    CHECK_THROWS_AS(cli::cmd_gen_data(write_spec(ok, "ok.json"), dir.str("block/sub"), 0),
                    std::exception);
}

TEST_CASE("manifest loading reports every defect in one shot") {
    test::TempDir dir("cli_manifest");

    nlohmann::json bad{
        {"comment", "nope"},
        {"assets", nlohmann::json::array(
                       {nlohmann::json{{"id", "ok"}, {"path", "ok.csv"}},
                        nlohmann::json{{"id", "broken"}}})},
        {"start", "2020-13-01"},
        {"features", "sharpe"},
        {"window", 0}};
    const std::string path = write_config(dir, bad, "manifest.json");

    const std::string m = error_of([&] { cli::load_manifest(path); });
    auto has = [&](const std::string& s) {
        INFO(m);
        CHECK(m.find(s) != std::string::npos);
    };
    has("invalid run config " + path + ":");
    has("manifest: unknown key \"comment\"");
    has("manifest.assets[]: each entry needs string id and path");
    has("manifest.start: invalid calendar date '2020-13-01'");
    has("manifest.features: feature set 'sharpe': unknown feature 'sharpe'");
    has("manifest.window: must be at least 1");
    CHECK(count_occurrences(m, "\n  - ") == 5);

    test::write_file(dir.str("empty.json"), "{\"window\": 2}");
    CHECK_THROWS_WITH_AS(cli::load_manifest(dir.str("empty.json")),
                         Contains("manifest.assets: must be a non-empty array"), Error);

    test::write_file(dir.str("arr.json"), "[]");
    CHECK_THROWS_WITH_AS(cli::load_manifest(dir.str("arr.json")),
                         Contains("must hold a JSON object"), Error);

    test::write_file(dir.str("torn.json"), "{\"assets\": [");
    CHECK_THROWS_WITH_AS(cli::load_manifest(dir.str("torn.json")),
                         Contains("is not valid JSON"), Error);

    CHECK_THROWS_WITH_AS(cli::load_manifest(dir.str("missing.json")),
                         Contains("cannot open manifest file"), Error);
}

TEST_CASE("run-config validation lists every problem before doing any work") {
    test::TempDir dir("cli_cfg_bad");

    nlohmann::json bad{
        {"bogus", 1},
        {"manifest", ""},
        {"agent", "sac"},
        {"seed", "x"},
        {"out_dir", ""},
        {"lookback", 0},
        {"env",
         {{"cost_rate", "expensive"}, {"gamma", 0.0}, {"noise_sigma", -0.1}, {"mystery", true}}},
        {"arch", {{"channels", 0}, {"kernel", 4}}},
        {"train",
         {{"optimizer", "rmsprop"},
          {"batch_size", 512},
          {"buffer_capacity", 16},
          {"tau", 0.0},
          {"clip", 0.0}}},
        {"split",
         {{"train_start", "2020-02-01"},
          {"train_end", "2020-01-10"},
          {"test_start", "2020-01-08"},
          {"test_end", "2020-01-05"}}}};
    const std::string path = write_config(dir, bad, "bad.json");

    const std::string m = error_of([&] { cli::load_run_config(path); });
    auto has = [&](const std::string& s) {
        INFO(m);
        CHECK(m.find(s) != std::string::npos);
    };
    has("invalid run config " + path + ":");
    has("config: unknown key \"bogus\"");
    has("config.seed: wrong type (\"x\")");
    has("config.manifest: required path to a dataset manifest");
    has("config.agent: unknown agent kind \"sac\" (expected pg, ddpg, ppo, ucrp, winner or loser)");
    has("config.out_dir: required output directory");
    has("config.lookback: must be at least 1");
    has("config.env: unknown key \"mystery\"");
    has("config.env.cost_rate: wrong type (\"expensive\")");
    has("config.env.gamma: must be in (0, 1]");
    has("config.env.noise_sigma: must be >= 0");
    has("config.arch.channels: must be >= 1");
    has("config.arch.kernel: must be odd and >= 1");
    has("config.train.optimizer: must be \"adam\" or \"sgd\", got \"rmsprop\"");
    has("config.train.tau: must be in (0, 1]");
    has("config.train.clip: must be > 0");
    has("config.train.batch_size: exceeds buffer_capacity");
    has("config.split: train_start must precede train_end");
    has("config.split: test_start must precede test_end");
    has("config.split: test span overlaps the training span "
        "(test_start 2020-01-08 is before train_end 2020-01-10)");
    CHECK(count_occurrences(m, "\n  - ") == 19);

    // A bare object is missing all four required pieces.
    const std::string empty_path = write_config(dir, nlohmann::json::object(), "empty.json");
    const std::string me = error_of([&] { cli::load_run_config(empty_path); });
    CHECK(me.find("config.manifest: required path to a dataset manifest") != std::string::npos);
    CHECK(me.find("config.agent: required") != std::string::npos);
    CHECK(me.find("config.out_dir: required output directory") != std::string::npos);
    CHECK(me.find("config.split: required (train_start, train_end, test_start, test_end)") !=
          std::string::npos);
    CHECK(count_occurrences(me, "\n  - ") == 4);

    // Sections must be objects.
    nlohmann::json shapes{{"manifest", "m.json"}, {"agent", "pg"},   {"out_dir", "o"},
                          {"env", 5},             {"arch", "wide"},  {"train", 3.5},
                          {"split", nlohmann::json::array()}};
    const std::string shapes_path = write_config(dir, shapes, "shapes.json");
    const std::string ms = error_of([&] { cli::load_run_config(shapes_path); });
    for (const std::string sect : {"env", "arch", "train", "split"})
        CHECK(ms.find("config." + sect + ": must be an object") != std::string::npos);

    // Dates must parse, and each split key is required.
    nlohmann::json dates{{"manifest", "m.json"},
                         {"agent", "pg"},
                         {"out_dir", "o"},
                         {"split",
                          {{"train_end", "2020-01-10"},
                           {"test_start", "2020-01-13"},
                           {"test_end", "junk"}}}};
    const std::string dates_path = write_config(dir, dates, "dates.json");
    const std::string md = error_of([&] { cli::load_run_config(dates_path); });
    CHECK(md.find("config.split.train_start: missing required date") != std::string::npos);
    CHECK(md.find("config.split.test_end: invalid ISO-8601 date 'junk'") != std::string::npos);

    CHECK_THROWS_WITH_AS(cli::load_run_config(dir.str("nope.json")),
                         Contains("cannot open run config file"), Error);
    test::write_file(dir.str("arr.json"), "[]");
    CHECK_THROWS_WITH_AS(cli::load_run_config(dir.str("arr.json")),
                         Contains("must hold a JSON object"), Error);
}

TEST_CASE("run-config defaults, manifest fallthrough, and command-line overrides") {
    test::TempDir dir("cli_cfg");
    Dataset d = generic_dataset(dir);

    SUBCASE("per-agent optimizer and learning-rate defaults") {
        nlohmann::json base{{"manifest", d.manifest},
                            {"out_dir", dir.str("out")},
                            {"split", split_json(d.panel, 10, 60, 60, 89)}};
        for (const auto& [agent, opt, alr, clr] :
             std::vector<std::tuple<std::string, std::string, double, double>>{
                 {"pg", "adam", 1e-3, 1e-3},
                 {"ddpg", "adam", 1e-3, 1e-1},
                 {"ppo", "sgd", 1e-3, 1e-3},
                 {"ucrp", "adam", 1e-3, 1e-3}}) {
            nlohmann::json j = base;
            j["agent"] = agent;
            cli::RunConfig cfg =
                cli::load_run_config(write_config(dir, j, "min_" + agent + ".json"));
            CAPTURE(agent);
            CHECK(cfg.train.optimizer == opt);
            REQUIRE(cfg.train.actor_lr.has_value());
            REQUIRE(cfg.train.critic_lr.has_value());
            CHECK(*cfg.train.actor_lr == alr);
            CHECK(*cfg.train.critic_lr == clr);

            // Untouched knobs keep their documented defaults.
            CHECK(cfg.seed == 0);
            CHECK(cfg.lookback == 10);
            CHECK(cfg.ucrp_include_cash);
            CHECK(cfg.train.epochs == 1000);
            CHECK(cfg.train.episodes == 50);
            CHECK(cfg.train.iterations == 200);
            CHECK(cfg.train.inner_epochs == 4);
            CHECK(cfg.train.clip == 0.2);
            CHECK(cfg.train.tau == 0.01);
            CHECK(cfg.arch.channels == 8);
            CHECK(cfg.arch.kernel == 3);
            CHECK(cfg.arch.residual_blocks == 1);
            CHECK(cfg.arch.embed == 16);
            CHECK(cfg.env.cost_rate == 0.0025);
            CHECK(cfg.env.gamma == 0.99);
        }

        // Explicit choices are never overwritten by the defaults.
        nlohmann::json j = base;
        j["agent"] = "pg";
        j["train"] = {{"optimizer", "sgd"}, {"actor_lr", 0.05}};
        cli::RunConfig cfg = cli::load_run_config(write_config(dir, j, "explicit.json"));
        CHECK(cfg.train.optimizer == "sgd");
        CHECK(*cfg.train.actor_lr == 0.05);
        CHECK(*cfg.train.critic_lr == 1e-3);
    }

    SUBCASE("manifest feature and window defaults apply only when unset") {
        // Rewrite the generated manifest with distinctive defaults.
        nlohmann::json man = nlohmann::json::parse(test::read_file(d.manifest));
        man["features"] = "close+volume";
        man["window"] = 7;
        const std::string man2 = dir.str("data/manifest2.json");
        test::write_file(man2, man.dump(2));

        nlohmann::json base{{"manifest", man2},
                            {"agent", "ucrp"},
                            {"out_dir", dir.str("out")},
                            {"split", split_json(d.panel, 10, 60, 60, 89)}};
        cli::RunConfig cfg = cli::load_run_config(write_config(dir, base, "fall.json"));
        CHECK(cfg.env.window == 7);
        CHECK(cfg.env.features ==
              std::vector<market::Feature>{market::Feature::Close, market::Feature::Volume});

        // An env section that stays silent on both still inherits them.
        nlohmann::json j = base;
        j["env"] = {{"cost_rate", 0.001}};
        cfg = cli::load_run_config(write_config(dir, j, "fall2.json"));
        CHECK(cfg.env.cost_rate == 0.001);
        CHECK(cfg.env.window == 7);
        CHECK(cfg.env.features.size() == 2);

        // Explicit env values win over the manifest.
        j["env"] = {{"window", 4}, {"features", "close"}};
        cfg = cli::load_run_config(write_config(dir, j, "fall3.json"));
        CHECK(cfg.env.window == 4);
        CHECK(cfg.env.features == std::vector<market::Feature>{market::Feature::Close});

        // And a command-line feature override wins over both.
        cli::CliOverrides ov;
        ov.features = "close+high";
        cfg = cli::load_run_config(dir.str("fall3.json"), ov);
        CHECK(cfg.env.features ==
              std::vector<market::Feature>{market::Feature::Close, market::Feature::High});
    }

    SUBCASE("seed and out_dir overrides, and override validation") {
        nlohmann::json j = run_config(d, "ucrp", dir.str("out"));
        const std::string path = write_config(dir, j, "ov.json");

        cli::CliOverrides ov;
        ov.seed = 99;
        ov.out_dir = dir.str("elsewhere");
        cli::RunConfig cfg = cli::load_run_config(path, ov);
        CHECK(cfg.seed == 99);
        CHECK(cfg.out_dir == dir.str("elsewhere"));

        cli::CliOverrides bad;
        bad.features = "banana";
        CHECK_THROWS_WITH_AS(cli::load_run_config(path, bad),
                             Contains("--features: feature set 'banana'"), Error);
    }

    SUBCASE("relative manifest paths resolve against the config file") {
        nlohmann::json j = run_config(d, "ucrp", dir.str("out"));
        j["manifest"] = "data/manifest.json";
        cli::RunConfig cfg = cli::load_run_config(write_config(dir, j, "rel.json"));
        CHECK(cfg.manifest ==
              (dir.path() / "data/manifest.json").lexically_normal().string());

        j["manifest"] = "data/ghost.json";
        CHECK_THROWS_WITH_AS(cli::load_run_config(write_config(dir, j, "ghost.json")),
                             Contains("cannot open manifest file"), Error);
    }
}

TEST_CASE("resolve_run maps split dates to decision spans and rejects unusable ones") {
    test::TempDir dir("cli_resolve");
    Dataset d = generic_dataset(dir);

    nlohmann::json j = run_config(d, "ucrp", dir.str("out"));
    cli::RunConfig cfg = cli::load_run_config(write_config(dir, j, "ok.json"));
    cli::ResolvedRun rr = cli::resolve_run(cfg);
    CHECK(rr.train_begin == 4);
    CHECK(rr.train_end == 60);
    CHECK(rr.test_begin == 60);
    CHECK(rr.test_end == 89);
    CHECK(rr.panel.num_days() == 90);

    // The observation window consumes the first window-1 days.
    j["split"] = split_json(d.panel, 0, 60, 60, 89);
    cfg = cli::load_run_config(write_config(dir, j, "early.json"));
    const std::string m1 = error_of([&] { cli::resolve_run(cfg); });
    CHECK(m1.find("train span starts at") != std::string::npos);
    CHECK(m1.find("first usable decision day") != std::string::npos);
    CHECK(m1.find("observation window 5") != std::string::npos);

    // Momentum baselines additionally need lookback days of history.
    j = run_config(d, "winner", dir.str("out"));
    j["lookback"] = 7;
    j["split"] = split_json(d.panel, 5, 60, 60, 89);
    cfg = cli::load_run_config(write_config(dir, j, "momentum.json"));
    const std::string m2 = error_of([&] { cli::resolve_run(cfg); });
    CHECK(m2.find("baseline lookback 7") != std::string::npos);
    CHECK(m2.find("first usable decision day") != std::string::npos);

    // Dates outside the panel are named in the failure.
    j = run_config(d, "ucrp", dir.str("out"));
    j["split"] = {{"train_start", "2021-06-01"},
                  {"train_end", "2021-06-10"},
                  {"test_start", "2021-06-10"},
                  {"test_end", "2021-06-20"}};
    cfg = cli::load_run_config(write_config(dir, j, "late.json"));
    CHECK_THROWS_WITH_AS(cli::resolve_run(cfg), Contains("is after the last panel date"),
                         Error);

    j["split"] = {{"train_start", "2019-01-01"},
                  {"train_end", "2019-01-05"},
                  {"test_start", "2019-01-06"},
                  {"test_end", "2019-01-10"}};
    cfg = cli::load_run_config(write_config(dir, j, "early2.json"));
    CHECK_THROWS_WITH_AS(cli::resolve_run(cfg), Contains("is before the first panel date"),
                         Error);

    SUBCASE("a split falling entirely into a calendar gap is empty") {
        // Hand-written two-week dataset with a nine-day hole in the middle.
        auto gap_csv = [&](double base) {
            std::string csv = "date,open,high,low,close,volume\n";
            auto row = [&](const std::string& date, double c) {
                csv += date + "," + format_double(c) + "," + format_double(c * 1.01) + "," +
                       format_double(c * 0.99) + "," + format_double(c) + ",1000\n";
            };
            auto january = [](int day) {
                return "2020-01-" + std::string(day < 10 ? "0" : "") + std::to_string(day);
            };
            int day = 6;
            for (int i = 0; i < 5; ++i, ++day) row(january(day), base + i);
            day = 20;
            for (int i = 5; i < 10; ++i, ++day) row(january(day), base + i);
            return csv;
        };
        test::write_file(dir.str("g0.csv"), gap_csv(50.0));
        test::write_file(dir.str("g1.csv"), gap_csv(30.0));
        nlohmann::json man{{"assets", nlohmann::json::array(
                                          {nlohmann::json{{"id", "g0"}, {"path", "g0.csv"}},
                                           nlohmann::json{{"id", "g1"}, {"path", "g1.csv"}}})}};
        test::write_file(dir.str("gap_manifest.json"), man.dump(2));

        nlohmann::json gj{{"manifest", dir.str("gap_manifest.json")},
                          {"agent", "ucrp"},
                          {"out_dir", dir.str("out")},
                          {"env", {{"window", 2}}},
                          {"split",
                           {{"train_start", "2020-01-11"},
                            {"train_end", "2020-01-19"},
                            {"test_start", "2020-01-20"},
                            {"test_end", "2020-01-24"}}}};
        cli::RunConfig gcfg = cli::load_run_config(write_config(dir, gj, "gap.json"));
        const std::string m3 = error_of([&] { cli::resolve_run(gcfg); });
        CHECK(m3.find("train span") != std::string::npos);
        CHECK(m3.find("maps to an empty decision range") != std::string::npos);

        // Shifting the training span onto real days makes the config usable.
        gj["split"]["train_start"] = "2020-01-07";
        gj["split"]["train_end"] = "2020-01-10";
        cli::ResolvedRun grr =
            cli::resolve_run(cli::load_run_config(write_config(dir, gj, "gap_ok.json")));
        CHECK(grr.train_begin == 1);
        CHECK(grr.train_end == 4);
        CHECK(grr.test_begin == 5);
        CHECK(grr.test_end == 9);
    }
}

TEST_CASE("train: learning run with artifacts, zero-epoch freeze, and rejections") {
    test::TempDir dir("cli_train");
    Dataset d = dominant_dataset(dir);

    nlohmann::json j;
    j["manifest"] = d.manifest;
    j["agent"] = "pg";
    j["seed"] = 3;
    j["out_dir"] = dir.str("run");
    j["env"] = {{"window", 5}};
    j["arch"] = tiny_arch_json();
    j["train"] = {{"epochs", 200}, {"actor_lr", 0.05}};
    j["split"] = split_json(d.panel, 4, 55, 55, 59);
    const std::string cfg_path = write_config(dir, j, "pg.json");

    CapturedCout quiet;
    cli::cmd_train(cfg_path, {});
    CHECK(quiet.text().find("trained pg for 200 epochs") != std::string::npos);

    CHECK(fs::exists(dir.str("run/resolved_config.json")));
    CHECK(fs::exists(dir.str("run/checkpoint.json")));
    CHECK(fs::exists(dir.str("run/train_log.jsonl")));

    // The epoch log carries one parseable record per epoch, and training on
    // the dominated panel makes clear progress.
    std::vector<std::string> lines = lines_of(test::read_file(dir.str("run/train_log.jsonl")));
    REQUIRE(lines.size() == 200);
    double first_apv = 0.0, last_apv = 0.0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        nlohmann::json rec = nlohmann::json::parse(lines[i]);
        CHECK(rec.at("agent") == "pg");
        CHECK(rec.at("epoch") == i);
        double apv = rec.at("apv").get<double>();
        CHECK(std::isfinite(rec.at("objective").get<double>()));
        if (i == 0) first_apv = apv;
        last_apv = apv;
    }
    CHECK(last_apv > first_apv);
    CHECK(last_apv > 1.02);

    // The checkpoint replays through a backtest.
    cli::cmd_backtest(cfg_path, dir.str("run/checkpoint.json"),
                      cli::CliOverrides{{}, dir.str("bt"), {}});
    nlohmann::json mj = nlohmann::json::parse(test::read_file(dir.str("bt/metrics.json")));
    CHECK(mj.at("agent") == "pg");
    CHECK(mj.at("steps") == 4);
    std::vector<std::string> curve_lines = lines_of(test::read_file(dir.str("bt/curve.csv")));
    REQUIRE(curve_lines.size() == 6);
    const std::string& last_row = curve_lines.back();
    const std::size_t c1 = last_row.find(',');
    const std::size_t c2 = last_row.find(',', c1 + 1);
    CHECK(std::stod(last_row.substr(c1 + 1, c2 - c1 - 1)) ==
          doctest::Approx(mj.at("final_apv").get<double>()).epsilon(1e-15));

    SUBCASE("zero epochs leaves the checkpoint at its initialization") {
        nlohmann::json j0 = j;
        j0["out_dir"] = dir.str("run0");
        j0["train"] = {{"epochs", 0}};
        cli::cmd_train(write_config(dir, j0, "pg0.json"), {});

        CHECK(test::read_file(dir.str("run0/train_log.jsonl")).empty());

        // Rebuild the initial network with the same seed and compare bytes.
        policy::ArchConfig arch;
        arch.channels = 1;
        arch.kernel = 1;
        arch.residual_blocks = 0;
        arch.embed = 2;
        Rng rng(3);
        policy::Actor fresh(3, 1, 5, arch, rng);
        nd::save_checkpoint(fresh.net(), dir.str("fresh.json"));
        CHECK(test::read_file(dir.str("run0/checkpoint.json")) ==
              test::read_file(dir.str("fresh.json")));
    }

    SUBCASE("non-trainable agents and broken datasets are rejected up front") {
        nlohmann::json ju = j;
        ju["agent"] = "ucrp";
        CHECK_THROWS_WITH_AS(cli::cmd_train(write_config(dir, ju, "ucrp.json"), {}),
                             Contains("has nothing to train"), Error);

        nlohmann::json man = nlohmann::json::parse(test::read_file(d.manifest));
        man["assets"][0]["path"] = "ghost.csv";
        test::write_file(dir.str("data/bad_manifest.json"), man.dump(2));
        nlohmann::json jb = j;
        jb["manifest"] = dir.str("data/bad_manifest.json");
        const std::string mb =
            error_of([&] { cli::cmd_train(write_config(dir, jb, "bad_data.json"), {}); });
        CHECK(mb.find("cannot open OHLCV file") != std::string::npos);
        CHECK(mb.find("ghost.csv") != std::string::npos);
    }
}

TEST_CASE("train: the resolved snapshot is complete and re-runnable") {
    test::TempDir dir("cli_snap");
    Dataset d = generic_dataset(dir);

    nlohmann::json j = run_config(d, "pg", dir.str("run"));
    j["train"] = {{"epochs", 2}};
    const std::string cfg_path = write_config(dir, j, "pg.json");

    CapturedCout quiet;
    cli::cmd_train(cfg_path, {});

    cli::RunConfig cfg = cli::load_run_config(cfg_path);
    nlohmann::json snap = cli::run_config_json(cfg);

    // The file on disk is exactly the materialized snapshot.
    CHECK(test::read_file(dir.str("run/resolved_config.json")) == snap.dump(2) + "\n");

    // Every tunable appears with its final value; nothing is left implicit.
    for (const std::string key :
         {"manifest", "agent", "seed", "out_dir", "lookback", "ucrp_include_cash", "env",
          "arch", "train", "split"})
        CHECK(snap.contains(key));
    CHECK(snap["train"]["optimizer"] == "adam");
    CHECK(snap["train"]["actor_lr"] == 1e-3);
    CHECK(snap["env"]["features"] == "close");
    CHECK(snap["env"]["window"] == 5);
    CHECK(snap["arch"]["channels"] == 1);
    CHECK(fs::path(snap["manifest"].get<std::string>()).is_absolute());

    // Feeding the snapshot back through the loader reproduces the run config.
    cli::RunConfig again = cli::load_run_config(dir.str("run/resolved_config.json"));
    CHECK(cli::run_config_json(again) == snap);

    // Re-running from the snapshot yields a byte-identical checkpoint.
    cli::cmd_train(dir.str("run/resolved_config.json"),
                   cli::CliOverrides{{}, dir.str("run2"), {}});
    CHECK(test::read_file(dir.str("run/checkpoint.json")) ==
          test::read_file(dir.str("run2/checkpoint.json")));
    CHECK(test::read_file(dir.str("run/train_log.jsonl")) ==
          test::read_file(dir.str("run2/train_log.jsonl")));
}

TEST_CASE("train: actor-critic agents write their extra networks") {
    test::TempDir dir("cli_train_ac");
    Dataset d = generic_dataset(dir);
    CapturedCout quiet;

    SUBCASE("ddpg saves actor and critic") {
        nlohmann::json j = run_config(d, "ddpg", dir.str("run"));
        j["arch"] = {{"channels", 2}, {"kernel", 3}, {"residual_blocks", 0}, {"embed", 4}};
        j["split"] = split_json(d.panel, 4, 20, 60, 89);
        j["train"] = {{"episodes", 2}, {"buffer_capacity", 64}, {"batch_size", 8}};
        const std::string cfg_path = write_config(dir, j, "ddpg.json");
        cli::cmd_train(cfg_path, {});

        CHECK(fs::exists(dir.str("run/checkpoint.json")));
        CHECK(fs::exists(dir.str("run/critic.json")));
        std::vector<std::string> lines =
            lines_of(test::read_file(dir.str("run/train_log.jsonl")));
        REQUIRE(lines.size() == 2);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            nlohmann::json rec = nlohmann::json::parse(lines[i]);
            CHECK(rec.at("agent") == "ddpg");
            CHECK(rec.at("episode") == i);
            CHECK(rec.contains("critic_loss"));
            CHECK(rec.at("updates").get<std::size_t>() > 0);
        }

        // The saved actor drives a deterministic backtest.
        cli::cmd_backtest(cfg_path, dir.str("run/checkpoint.json"),
                          cli::CliOverrides{{}, dir.str("bt1"), {}});
        cli::cmd_backtest(cfg_path, dir.str("run/checkpoint.json"),
                          cli::CliOverrides{{}, dir.str("bt2"), {}});
        for (const std::string f : {"curve.csv", "curve_vs_ucrp.csv", "metrics.json"})
            CHECK(test::read_file(dir.str("bt1/" + f)) == test::read_file(dir.str("bt2/" + f)));
    }

    SUBCASE("ppo saves policy and value head, and starts at ratio one") {
        nlohmann::json j = run_config(d, "ppo", dir.str("run"));
        j["split"] = split_json(d.panel, 5, 21, 60, 89);
        j["train"] = {{"iterations", 2}, {"inner_epochs", 1}};
        const std::string cfg_path = write_config(dir, j, "ppo.json");
        cli::cmd_train(cfg_path, {});

        CHECK(fs::exists(dir.str("run/checkpoint.json")));
        CHECK(fs::exists(dir.str("run/value.json")));
        std::vector<std::string> lines =
            lines_of(test::read_file(dir.str("run/train_log.jsonl")));
        REQUIRE(lines.size() == 2);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            nlohmann::json rec = nlohmann::json::parse(lines[i]);
            CHECK(rec.at("agent") == "ppo");
            CHECK(rec.at("iteration") == i);
            // With one inner pass, every update happens at the snapshot
            // parameters: the importance ratio is identically one.
            CHECK(rec.at("mean_ratio").get<double>() == 1.0);
            CHECK(rec.at("kl").get<double>() == 0.0);
            CHECK(std::isfinite(rec.at("value_loss").get<double>()));
            CHECK(std::isfinite(rec.at("surrogate").get<double>()));
        }

        cli::cmd_backtest(cfg_path, dir.str("run/checkpoint.json"),
                          cli::CliOverrides{{}, dir.str("bt1"), {}});
        cli::cmd_backtest(cfg_path, dir.str("run/checkpoint.json"),
                          cli::CliOverrides{{}, dir.str("bt2"), {}});
        for (const std::string f : {"curve.csv", "metrics.json"})
            CHECK(test::read_file(dir.str("bt1/" + f)) == test::read_file(dir.str("bt2/" + f)));
    }
}

TEST_CASE("backtest: baselines run from config alone and match the library curves") {
    test::TempDir dir("cli_bt");
    Dataset d = generic_dataset(dir);
    CapturedCout quiet;

    SUBCASE("uniform rebalancing, with and without cash") {
        for (bool with_cash : {true, false}) {
            const std::string out = dir.str(with_cash ? "cash" : "nocash");
            nlohmann::json j = run_config(d, "ucrp", out);
            j["ucrp_include_cash"] = with_cash;
            const std::string cfg_path =
                write_config(dir, j, with_cash ? "u1.json" : "u0.json");
            cli::cmd_backtest(cfg_path, "", {});

            // Independent replay through the evaluation library.
            cli::RunConfig cfg = cli::load_run_config(cfg_path);
            cli::ResolvedRun rr = cli::resolve_run(cfg);
            env::WeightVector w = eval::ucrp_weights(rr.panel.num_assets(), with_cash);
            eval::EquityCurve curve = eval::backtest(
                [&w](const market::StateTensor&, std::size_t) { return w; }, rr.panel,
                rr.test_begin, rr.test_end, cfg.env);
            eval::MetricsReport rep = eval::compute_metrics(curve);

            CHECK(test::read_file(out + "/curve.csv") == curve_csv_replica(curve));

            nlohmann::json mj = nlohmann::json::parse(test::read_file(out + "/metrics.json"));
            CHECK(mj.at("agent") == "ucrp");
            CHECK(mj.at("final_apv").get<double>() == rep.final_apv);
            CHECK(mj.at("adr_pct").get<double>() == rep.adr_pct);
            CHECK(mj.at("sharpe").get<double>() == rep.sharpe);
            CHECK(mj.at("sharpe_defined").get<bool>() == rep.sharpe_defined);
            CHECK(mj.at("mdd").get<double>() == rep.mdd);
            CHECK(mj.at("cvar").get<double>() == rep.cvar);
            CHECK(mj.at("steps") == 29);
            CHECK(mj.at("test_start") == market::format_date(d.panel.calendar[60]));
            CHECK(mj.at("test_end") == market::format_date(d.panel.calendar[89]));

            // For the uniform agent the comparison file repeats its own curve.
            std::vector<std::string> vs =
                lines_of(test::read_file(out + "/curve_vs_ucrp.csv"));
            REQUIRE(vs.size() == 31);
            CHECK(vs[0] == "date,agent,ucrp");
            for (std::size_t i = 1; i < vs.size(); ++i) {
                const std::size_t c1 = vs[i].find(',');
                const std::string rest = vs[i].substr(c1 + 1);
                const std::size_t c2 = rest.find(',');
                CHECK(rest.substr(0, c2) == rest.substr(c2 + 1));
            }
        }
        // Cash dilutes exposure, so the two variants genuinely differ.
        CHECK(test::read_file(dir.str("cash/curve.csv")) !=
              test::read_file(dir.str("nocash/curve.csv")));
    }

    SUBCASE("momentum baselines need only a lookback") {
        for (const std::string agent : {"winner", "loser"}) {
            nlohmann::json j = run_config(d, agent, dir.str(agent));
            j["lookback"] = 3;
            cli::cmd_backtest(write_config(dir, j, agent + ".json"), "", {});
            CHECK(fs::exists(dir.str(agent + "/metrics.json")));
        }
        CHECK(test::read_file(dir.str("winner/curve.csv")) !=
              test::read_file(dir.str("loser/curve.csv")));
    }

    SUBCASE("trainable agents demand a checkpoint; mismatched shapes are named") {
        nlohmann::json j = run_config(d, "pg", dir.str("pg_bt"));
        const std::string cfg_path = write_config(dir, j, "pg.json");
        CHECK_THROWS_WITH_AS(cli::cmd_backtest(cfg_path, "", {}),
                             Contains("agent \"pg\" needs --checkpoint"), Error);
        nlohmann::json jp = run_config(d, "ppo", dir.str("ppo_bt"));
        CHECK_THROWS_WITH_AS(cli::cmd_backtest(write_config(dir, jp, "ppo.json"), "", {}),
                             Contains("agent \"ppo\" needs --checkpoint"), Error);

        CHECK_THROWS_WITH_AS(cli::cmd_backtest(cfg_path, dir.str("nope.json"), {}),
                             Contains("checkpoint: cannot open"), Error);

        // Train a tiny network, then try to load it into a wider one.
        nlohmann::json jt = j;
        jt["out_dir"] = dir.str("trained");
        jt["train"] = {{"epochs", 1}};
        cli::cmd_train(write_config(dir, jt, "pg_small.json"), {});
        nlohmann::json jw = j;
        jw["arch"] = {{"channels", 2}, {"kernel", 3}, {"residual_blocks", 0}, {"embed", 4}};
        const std::string wide_path = write_config(dir, jw, "pg_wide.json");
        const std::string mm = error_of(
            [&] { cli::cmd_backtest(wide_path, dir.str("trained/checkpoint.json"), {}); });
        CHECK(mm.find("checkpoint: architecture mismatch") != std::string::npos);
        CHECK(mm.find("shape:") != std::string::npos);
    }
}

TEST_CASE("compare: Welch table over run directories") {
    test::TempDir dir("cli_cmp");

    // Two groups of synthesized metrics files with known statistics.
    auto write_metrics = [&](const std::string& sub, double apv, double adr, double sharpe,
                             double mdd, double cvar) {
        fs::create_directories(dir.str(sub));
        nlohmann::json mj{{"agent", "pg"},          {"final_apv", apv}, {"adr_pct", adr},
                          {"sharpe", sharpe},       {"sharpe_defined", true},
                          {"mdd", mdd},             {"cvar", cvar},     {"steps", 29}};
        test::write_file(dir.str(sub + "/metrics.json"), mj.dump(2) + "\n");
        return dir.str(sub);
    };
    auto report = [](double apv, double adr, double sharpe, double mdd, double cvar) {
        eval::MetricsReport r;
        r.final_apv = apv;
        r.adr_pct = adr;
        r.sharpe = sharpe;
        r.sharpe_defined = true;
        r.mdd = mdd;
        r.cvar = cvar;
        return r;
    };

    std::vector<std::string> dirs_a{write_metrics("a0", 1.30, 0.12, 1.1, 0.10, 0.011),
                                    write_metrics("a1", 1.25, 0.10, 1.3, 0.12, 0.013),
                                    write_metrics("a2", 1.20, 0.08, 0.9, 0.08, 0.012)};
    std::vector<std::string> dirs_b{write_metrics("b0", 1.10, 0.05, 0.5, 0.20, 0.018),
                                    write_metrics("b1", 1.05, 0.02, 0.6, 0.24, 0.022),
                                    write_metrics("b2", 1.08, 0.03, 0.4, 0.22, 0.020)};
    std::vector<eval::MetricsReport> rep_a{report(1.30, 0.12, 1.1, 0.10, 0.011),
                                           report(1.25, 0.10, 1.3, 0.12, 0.013),
                                           report(1.20, 0.08, 0.9, 0.08, 0.012)};
    std::vector<eval::MetricsReport> rep_b{report(1.10, 0.05, 0.5, 0.20, 0.018),
                                           report(1.05, 0.02, 0.6, 0.24, 0.022),
                                           report(1.08, 0.03, 0.4, 0.22, 0.020)};

    CapturedCout quiet;
    cli::cmd_compare(dirs_a, dirs_b, dir.str("cmp"));

    std::vector<eval::MetricComparison> rows = eval::compare_runs(rep_a, rep_b);
    CHECK(test::read_file(dir.str("cmp/comparison.csv")) == eval::comparison_csv(rows));
    CHECK(nlohmann::json::parse(test::read_file(dir.str("cmp/comparison.json"))) ==
          eval::comparison_json(rows));

    nlohmann::json cj = nlohmann::json::parse(test::read_file(dir.str("cmp/comparison.json")));
    REQUIRE(cj.size() == 3);
    CHECK(cj[0].at("metric") == "adr_pct");
    CHECK(cj[1].at("metric") == "sharpe");
    CHECK(cj[2].at("metric") == "mdd");
    // A clearly beats B on return and risk-adjusted return; A's drawdowns are
    // smaller, so the one-sided mdd p value lands near one.
    CHECK(cj[0].at("p").get<double>() < 0.05);
    CHECK(cj[1].at("p").get<double>() < 0.05);
    CHECK(cj[2].at("p").get<double>() > 0.9);

    SUBCASE("a group compared with itself sits exactly on the fence") {
        cli::cmd_compare(dirs_a, dirs_a, dir.str("self"));
        nlohmann::json sj =
            nlohmann::json::parse(test::read_file(dir.str("self/comparison.json")));
        REQUIRE(sj.size() == 3);
        for (const auto& row : sj) {
            CHECK(row.at("t").get<double>() == 0.0);
            CHECK(row.at("p").get<double>() == 0.5);
        }
    }

    SUBCASE("contract failures") {
        CHECK_THROWS_WITH_AS(
            cli::cmd_compare({dirs_a[0]}, {dirs_b[0]}, dir.str("cmp2")),
            Contains("compare_runs: each group needs at least two runs (got 1 and 1)"), Error);
        CHECK_THROWS_WITH_AS(
            cli::cmd_compare({dirs_a[0], dir.str("ghost")}, dirs_b, dir.str("cmp3")),
            Contains("cannot open metrics file"), Error);
    }
}

TEST_CASE("compare: end-to-end over freshly trained runs") {
    test::TempDir dir("cli_cmp_e2e");
    Dataset d = generic_dataset(dir);
    CapturedCout quiet;

    // Four quick policy-gradient runs differing only in seed.
    std::vector<std::string> bt_dirs;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const std::string tag = "s" + std::to_string(seed);
        nlohmann::json j = run_config(d, "pg", dir.str("train_" + tag));
        j["seed"] = seed;
        j["split"] = split_json(d.panel, 4, 20, 60, 89);
        j["train"] = {{"epochs", 2}};
        const std::string cfg_path = write_config(dir, j, tag + ".json");
        cli::cmd_train(cfg_path, {});
        cli::cmd_backtest(cfg_path, dir.str("train_" + tag + "/checkpoint.json"),
                          cli::CliOverrides{{}, dir.str("bt_" + tag), {}});
        bt_dirs.push_back(dir.str("bt_" + tag));
    }

    cli::cmd_compare({bt_dirs[0], bt_dirs[1]}, {bt_dirs[2], bt_dirs[3]}, dir.str("cmp"));
    nlohmann::json cj = nlohmann::json::parse(test::read_file(dir.str("cmp/comparison.json")));
    REQUIRE(cj.size() == 3);
    for (const auto& row : cj) {
        double p = row.at("p").get<double>();
        CHECK(std::isfinite(row.at("t").get<double>()));
        CHECK(row.at("df").get<double>() > 0.0);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
}

#ifdef FOLIO_CLI_PATH
TEST_CASE("the installed binary drives the whole pipeline") {
    test::TempDir dir("cli_bin");
    const std::string exe = FOLIO_CLI_PATH;
    auto sh = [&](const std::string& args) {
        return std::system((exe + " " + args).c_str());
    };

    nlohmann::json spec = dataset_spec(90, {asset_spec("alpha", 100.0, 0.0004, 0.01),
                                            asset_spec("beta", 50.0, 0.0, 0.015)});
    test::write_file(dir.str("spec.json"), spec.dump(2));
    CHECK(sh("gen-data --spec " + dir.str("spec.json") + " --out " + dir.str("gen") +
             " --seed 5 > /dev/null") == 0);
    REQUIRE(fs::exists(dir.str("gen/manifest.json")));

    // Config with a manifest path relative to the config file.
    market::Panel p = cli::load_panel(cli::load_manifest(dir.str("gen/manifest.json")),
                                      dir.str("gen/manifest.json"));
    nlohmann::json j;
    j["manifest"] = "gen/manifest.json";
    j["agent"] = "pg";
    j["seed"] = 3;
    j["out_dir"] = dir.str("run");
    j["env"] = {{"window", 5}};
    j["arch"] = tiny_arch_json();
    j["train"] = {{"epochs", 2}};
    j["split"] = split_json(p, 4, 20, 60, 89);
    test::write_file(dir.str("config.json"), j.dump(2));

    CHECK(sh("train --config " + dir.str("config.json") + " > /dev/null") == 0);
    REQUIRE(fs::exists(dir.str("run/checkpoint.json")));

    // Flag overrides land in the resolved snapshot.
    CHECK(sh("train --config " + dir.str("config.json") + " --seed 9 --out " +
             dir.str("run9") + " > /dev/null") == 0);
    nlohmann::json snap =
        nlohmann::json::parse(test::read_file(dir.str("run9/resolved_config.json")));
    CHECK(snap.at("seed") == 9);
    CHECK(snap.at("out_dir") == dir.str("run9"));

    CHECK(sh("backtest --config " + dir.str("config.json") + " --checkpoint " +
             dir.str("run/checkpoint.json") + " --out " + dir.str("bt") + " > /dev/null") ==
          0);
    CHECK(fs::exists(dir.str("bt/metrics.json")));
    CHECK(fs::exists(dir.str("bt/curve.csv")));
    CHECK(fs::exists(dir.str("bt/curve_vs_ucrp.csv")));

    // Failures surface on stderr with a nonzero exit status.
    CHECK(sh("backtest --config " + dir.str("config.json") + " 2> " + dir.str("err.txt") +
             " > /dev/null") != 0);
    CHECK(test::read_file(dir.str("err.txt")).find("error: agent \"pg\" needs --checkpoint") !=
          std::string::npos);
    CHECK(sh("frobnicate 2> /dev/null > /dev/null") != 0);
}
#endif
