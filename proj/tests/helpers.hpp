#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "folio/env/env.hpp"
#include "folio/market/panel.hpp"
#include "folio/ndcore/graph.hpp"

namespace folio::test {

// Temporary directory removed on destruction; each instance is unique.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("folio_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string str(const std::string& rel = "") const {
        return rel.empty() ? path_.string() : (path_ / rel).string();
    }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

// Panel with the given per-asset close paths; open tracks the previous
// close, high/low bracket it, volume is a positive constant.
inline market::Panel make_panel(const std::vector<std::vector<double>>& closes,
                                int start_serial = 16437) {
    market::Panel p;
    const std::size_t m = closes.size();
    const std::size_t T = closes.front().size();
    for (std::size_t a = 0; a < m; ++a) p.asset_ids.push_back("A" + std::to_string(a));
    for (std::size_t t = 0; t < T; ++t)
        p.calendar.push_back(market::Date{start_serial + static_cast<int>(t)});
    p.open.resize(m * T);
    p.high.resize(m * T);
    p.low.resize(m * T);
    p.close.resize(m * T);
    p.volume.resize(m * T);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t t = 0; t < T; ++t) {
            double c = closes[a][t];
            double o = t == 0 ? c : closes[a][t - 1];
            p.open[a * T + t] = o;
            p.high[a * T + t] = std::max(o, c) * 1.001;
            p.low[a * T + t] = std::min(o, c) * 0.999;
            p.close[a * T + t] = c;
            p.volume[a * T + t] = 1e6 + static_cast<double>(a * T + t);
        }
    }
    return p;
}

// Random-walk closes for quick multi-asset panels.
inline market::Panel random_panel(std::size_t m, std::size_t T, Rng& rng,
                                  double vol = 0.01) {
    std::normal_distribution<double> gauss(0.0, vol);
    std::vector<std::vector<double>> closes(m, std::vector<double>(T));
    for (std::size_t a = 0; a < m; ++a) {
        double c = 50.0 + 10.0 * static_cast<double>(a);
        for (std::size_t t = 0; t < T; ++t) {
            closes[a][t] = c;
            c *= std::exp(gauss(rng));
        }
    }
    return make_panel(closes);
}

inline env::WeightVector random_simplex(std::size_t dim, Rng& rng) {
    std::exponential_distribution<double> expo(1.0);
    env::WeightVector w;
    w.w.resize(dim);
    double s = 0.0;
    for (auto& x : w.w) {
        x = expo(rng);
        s += x;
    }
    for (auto& x : w.w) x /= s;
    return w;
}

// Acceptance-style gradient comparison: absolute floor plus relative band.
inline bool grad_close(double analytic, double numeric, double rel = 1e-4,
                       double floor = 1e-7) {
    double diff = std::abs(analytic - numeric);
    return diff <= floor || diff <= rel * std::max(std::abs(analytic), std::abs(numeric));
}

// Central finite differences of sum(seed . output) with respect to every
// parameter scalar of the graph. Inputs must already be set on the graph.
inline nd::GradMap fd_param_gradients(nd::Graph& g, const nd::TensorMap& seeds,
                                      double h = 1e-5) {
    auto objective = [&]() {
        g.run();
        double total = 0.0;
        for (const auto& [name, seed] : seeds) {
            const nd::Tensor& out = g.output(name);
            for (std::size_t i = 0; i < out.data.size(); ++i)
                total += seed.data[i] * out.data[i];
        }
        return total;
    };
    nd::GradMap fd;
    for (const auto& name : g.param_names()) {
        nd::Tensor& p = g.param_value(name);
        nd::Tensor grad = nd::Tensor::zeros(p.shape);
        for (std::size_t i = 0; i < p.data.size(); ++i) {
            const double saved = p.data[i];
            p.data[i] = saved + h;
            const double up = objective();
            p.data[i] = saved - h;
            const double down = objective();
            p.data[i] = saved;
            grad.data[i] = (up - down) / (2.0 * h);
        }
        fd[name] = std::move(grad);
    }
    return fd;
}

} // namespace folio::test
