#include "folio/cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "folio/agent/ddpg.hpp"
#include "folio/agent/pg.hpp"
#include "folio/agent/ppo.hpp"
#include "folio/common.hpp"
#include "folio/eval/backtest.hpp"
#include "folio/eval/metrics.hpp"
#include "folio/eval/stats.hpp"
#include "folio/market/synthetic.hpp"
#include "folio/ndcore/checkpoint.hpp"

namespace fs = std::filesystem;

namespace folio::cli {

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    require(out.good(), "cannot open ", path.string(), " for writing");
    out << text;
    require(out.good(), "failed writing ", path.string());
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

nlohmann::json read_json(const fs::path& path, const char* what) {
    std::ifstream in(path);
    require(in.good(), "cannot open ", what, " file ", path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(what, " file ", path.string(), " is not valid JSON: ", e.what());
    }
    return j;
}

std::string curve_csv(const eval::EquityCurve& curve) {
    std::string out = "date,value,turnover\n";
    for (std::size_t i = 0; i < curve.values.size(); ++i) {
        out += market::format_date(curve.dates[i]);
        out += ',';
        out += format_double(curve.values[i]);
        out += ',';
        out += format_double(i == 0 ? 0.0 : curve.turnover[i - 1]);
        out += '\n';
    }
    return out;
}

} // namespace

void cmd_gen_data(const std::string& spec_path, const std::string& out_dir,
                  std::uint64_t seed) {
    nlohmann::json j = read_json(spec_path, "synthetic spec");
    require(j.is_object(), "synthetic spec must be a JSON object");

    market::SyntheticSpec spec;
    std::size_t days = 0;
    require(j.contains("days"), "synthetic spec: missing \"days\"");
    days = j.at("days").get<std::size_t>();
    if (j.contains("start")) spec.start = market::parse_date(j.at("start").get<std::string>());
    if (j.contains("intraday_range")) spec.intraday_range = j.at("intraday_range").get<double>();
    require(j.contains("assets") && j.at("assets").is_array() && !j.at("assets").empty(),
            "synthetic spec: \"assets\" must be a non-empty array");
    for (const auto& a : j.at("assets")) {
        market::SyntheticAsset sa;
        sa.asset_id = a.at("id").get<std::string>();
        if (a.contains("init_price")) sa.init_price = a.at("init_price").get<double>();
        if (a.contains("drift")) sa.drift = a.at("drift").get<double>();
        if (a.contains("volatility")) sa.volatility = a.at("volatility").get<double>();
        if (a.contains("base_volume")) sa.base_volume = a.at("base_volume").get<double>();
        spec.assets.push_back(std::move(sa));
    }

    Rng rng(seed);
    market::Panel panel = market::gen_synthetic(spec, days, rng);

    fs::create_directories(out_dir);
    const std::size_t T = panel.num_days();
    nlohmann::json assets = nlohmann::json::array();
    for (std::size_t a = 0; a < panel.num_assets(); ++a) {
        std::string csv = "date,open,high,low,close,volume\n";
        for (std::size_t t = 0; t < T; ++t) {
            csv += market::format_date(panel.calendar[t]);
            for (market::Feature f :
                 {market::Feature::Open, market::Feature::High, market::Feature::Low,
                  market::Feature::Close, market::Feature::Volume}) {
                csv += ',';
                csv += format_double(panel.at(f, a, t));
            }
            csv += '\n';
        }
        std::string name = panel.asset_ids[a] + ".csv";
        write_text(fs::path(out_dir) / name, csv);
        assets.push_back({{"id", panel.asset_ids[a]}, {"path", name}});
    }
    nlohmann::json manifest{{"assets", assets},
                            {"start", market::format_date(panel.calendar.front())},
                            {"end", market::format_date(panel.calendar.back())},
                            {"features", "close"},
                            {"window", 10}};
    write_json(fs::path(out_dir) / "manifest.json", manifest);
    std::cout << "generated " << panel.num_assets() << " synthetic assets x " << T
              << " days in " << out_dir << "\n";
}

void cmd_train(const std::string& config_path, const CliOverrides& overrides) {
    RunConfig cfg = load_run_config(config_path, overrides);
    require(cfg.trainable(), "agent kind \"", cfg.agent,
            "\" has nothing to train; run the backtest command instead");
    ResolvedRun rr = resolve_run(cfg);

    fs::create_directories(cfg.out_dir);
    write_json(fs::path(cfg.out_dir) / "resolved_config.json", run_config_json(cfg));

    const std::size_t m = rr.panel.num_assets();
    const std::size_t F = cfg.env.features.size();
    const std::size_t W = cfg.env.window;
    const bool adam = cfg.train.optimizer == "adam";
    Rng rng(cfg.seed);
    std::ofstream log(fs::path(cfg.out_dir) / "train_log.jsonl");
    require(log.good(), "cannot open train log in ", cfg.out_dir);

    if (cfg.agent == "pg") {
        policy::Actor actor(m, F, W, cfg.arch, rng);
        agent::PgConfig pc;
        pc.epochs = cfg.train.epochs;
        pc.learning_rate = *cfg.train.actor_lr;
        pc.use_adam = adam;
        agent::PgResult res = agent::pg_train(actor, rr.panel, rr.train_begin, rr.train_end,
                                              cfg.env, pc, rng, &log);
        nd::save_checkpoint(actor.net(), (fs::path(cfg.out_dir) / "checkpoint.json").string());
        std::cout << "trained pg for " << pc.epochs << " epochs; final train APV "
                  << (res.apv.empty() ? 1.0 : res.apv.back()) << "\n";
    } else if (cfg.agent == "ddpg") {
        policy::Actor actor(m, F, W, cfg.arch, rng);
        policy::Critic critic(m, F, W, cfg.arch, rng);
        agent::DdpgConfig dc;
        dc.episodes = cfg.train.episodes;
        dc.actor_lr = *cfg.train.actor_lr;
        dc.critic_lr = *cfg.train.critic_lr;
        dc.tau = cfg.train.tau;
        dc.buffer_capacity = cfg.train.buffer_capacity;
        dc.batch_size = cfg.train.batch_size;
        dc.ou_theta = cfg.train.ou_theta;
        dc.ou_sigma = cfg.train.ou_sigma;
        dc.ou_dt = cfg.train.ou_dt;
        dc.use_adam = adam;
        agent::DdpgResult res = agent::ddpg_train(actor, critic, rr.panel, rr.train_begin,
                                                  rr.train_end, cfg.env, dc, rng, &log);
        nd::save_checkpoint(actor.net(), (fs::path(cfg.out_dir) / "checkpoint.json").string());
        nd::save_checkpoint(critic.net(), (fs::path(cfg.out_dir) / "critic.json").string());
        std::cout << "trained ddpg for " << dc.episodes << " episodes; final train APV "
                  << (res.apv.empty() ? 1.0 : res.apv.back()) << "\n";
    } else { // ppo
        policy::GaussianPolicy pol(m, F, W, cfg.arch, rng);
        agent::PpoConfig pc;
        pc.iterations = cfg.train.iterations;
        pc.inner_epochs = cfg.train.inner_epochs;
        pc.clip = cfg.train.clip;
        pc.actor_lr = *cfg.train.actor_lr;
        pc.critic_lr = *cfg.train.critic_lr;
        pc.use_adam = adam;
        agent::PpoResult res = agent::ppo_train(pol, rr.panel, rr.train_begin, rr.train_end,
                                                cfg.env, pc, rng, &log);
        nd::save_checkpoint(pol.actor_net(), (fs::path(cfg.out_dir) / "checkpoint.json").string());
        nd::save_checkpoint(pol.value_net(), (fs::path(cfg.out_dir) / "value.json").string());
        std::cout << "trained ppo for " << pc.iterations << " iterations; final train APV "
                  << (res.apv.empty() ? 1.0 : res.apv.back()) << "\n";
    }
    std::cout << "outputs written to " << cfg.out_dir << "\n";
}

void cmd_backtest(const std::string& config_path, const std::string& checkpoint_path,
                  const CliOverrides& overrides) {
    RunConfig cfg = load_run_config(config_path, overrides);
    ResolvedRun rr = resolve_run(cfg);

    const std::size_t m = rr.panel.num_assets();
    const std::size_t F = cfg.env.features.size();
    const std::size_t W = cfg.env.window;
    Rng rng(cfg.seed);

    // Networks live here so the WeightFn lambdas can hold references.
    std::unique_ptr<policy::Actor> actor;
    std::unique_ptr<policy::GaussianPolicy> gauss;
    eval::WeightFn fn;

    if (cfg.agent == "pg" || cfg.agent == "ddpg") {
        require(!checkpoint_path.empty(), "agent \"", cfg.agent,
                "\" needs --checkpoint pointing at a trained policy");
        actor = std::make_unique<policy::Actor>(m, F, W, cfg.arch, rng);
        nd::load_checkpoint(actor->net(), checkpoint_path);
        fn = [&actor](const market::StateTensor& s, std::size_t) { return actor->act(s); };
    } else if (cfg.agent == "ppo") {
        require(!checkpoint_path.empty(),
                "agent \"ppo\" needs --checkpoint pointing at a trained policy");
        gauss = std::make_unique<policy::GaussianPolicy>(m, F, W, cfg.arch, rng);
        nd::load_checkpoint(gauss->actor_net(), checkpoint_path);
        // Deterministic evaluation: execute the mean action.
        fn = [&gauss](const market::StateTensor& s, std::size_t) {
            return policy::GaussianPolicy::execute(gauss->moments(s).mean);
        };
    } else if (cfg.agent == "ucrp") {
        env::WeightVector w = eval::ucrp_weights(m, cfg.ucrp_include_cash);
        fn = [w](const market::StateTensor&, std::size_t) { return w; };
    } else if (cfg.agent == "winner" || cfg.agent == "loser") {
        const bool best = cfg.agent == "winner";
        const market::Panel& panel = rr.panel;
        const std::size_t lb = cfg.lookback;
        fn = [&panel, lb, best](const market::StateTensor&, std::size_t t) {
            return best ? eval::follow_winner(panel, t, lb)
                        : eval::follow_loser(panel, t, lb);
        };
    } else {
        fail("unknown agent kind \"", cfg.agent, '"');
    }

    eval::EquityCurve curve = eval::backtest(fn, rr.panel, rr.test_begin, rr.test_end,
                                             cfg.env);
    eval::MetricsReport rep = eval::compute_metrics(curve);

    env::WeightVector uw = eval::ucrp_weights(m, cfg.ucrp_include_cash);
    eval::EquityCurve ucrp = eval::backtest(
        [&uw](const market::StateTensor&, std::size_t) { return uw; }, rr.panel,
        rr.test_begin, rr.test_end, cfg.env);

    fs::create_directories(cfg.out_dir);
    write_text(fs::path(cfg.out_dir) / "curve.csv", curve_csv(curve));

    std::string vs = "date,agent,ucrp\n";
    for (std::size_t i = 0; i < curve.values.size(); ++i) {
        vs += market::format_date(curve.dates[i]);
        vs += ',';
        vs += format_double(curve.values[i]);
        vs += ',';
        vs += format_double(ucrp.values[i]);
        vs += '\n';
    }
    write_text(fs::path(cfg.out_dir) / "curve_vs_ucrp.csv", vs);

    nlohmann::json mj{{"agent", cfg.agent},
                      {"final_apv", rep.final_apv},
                      {"adr_pct", rep.adr_pct},
                      {"sharpe", rep.sharpe},
                      {"sharpe_defined", rep.sharpe_defined},
                      {"mdd", rep.mdd},
                      {"cvar", rep.cvar},
                      {"steps", curve.steps()},
                      {"test_start", market::format_date(curve.dates.front())},
                      {"test_end", market::format_date(curve.dates.back())}};
    write_json(fs::path(cfg.out_dir) / "metrics.json", mj);

    std::cout << "backtested " << cfg.agent << " over " << curve.steps() << " steps ("
              << market::format_date(curve.dates.front()) << " to "
              << market::format_date(curve.dates.back()) << ")\n"
              << "  final APV " << rep.final_apv << ", mean daily return " << rep.adr_pct
              << "%, sharpe "
              << (rep.sharpe_defined ? format_double(rep.sharpe) : std::string("undefined"))
              << ", max drawdown " << rep.mdd << ", cvar " << rep.cvar << "\n"
              << "outputs written to " << cfg.out_dir << "\n";
}

void cmd_compare(const std::vector<std::string>& group_a,
                 const std::vector<std::string>& group_b, const std::string& out_dir) {
    auto load_group = [](const std::vector<std::string>& dirs) {
        std::vector<eval::MetricsReport> reports;
        for (const auto& d : dirs) {
            nlohmann::json j = read_json(fs::path(d) / "metrics.json", "metrics");
            eval::MetricsReport r;
            r.final_apv = j.at("final_apv").get<double>();
            r.adr_pct = j.at("adr_pct").get<double>();
            r.sharpe = j.at("sharpe").get<double>();
            r.sharpe_defined = j.at("sharpe_defined").get<bool>();
            r.mdd = j.at("mdd").get<double>();
            r.cvar = j.at("cvar").get<double>();
            reports.push_back(r);
        }
        return reports;
    };
    std::vector<eval::MetricsReport> a = load_group(group_a);
    std::vector<eval::MetricsReport> b = load_group(group_b);
    std::vector<eval::MetricComparison> rows = eval::compare_runs(a, b);

    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / "comparison.csv", eval::comparison_csv(rows));
    write_json(fs::path(out_dir) / "comparison.json", eval::comparison_json(rows));

    std::cout << "metric      mean_a        mean_b        t         df        p (A > B)\n";
    for (const auto& r : rows) {
        std::cout << r.metric;
        for (std::size_t pad = r.metric.size(); pad < 12; ++pad) std::cout << ' ';
        std::cout << r.mean_a << "  " << r.mean_b << "  " << r.test.t << "  " << r.test.df
                  << "  " << r.test.p << "\n";
    }
    std::cout << "outputs written to " << out_dir << "\n";
}

} // namespace folio::cli
