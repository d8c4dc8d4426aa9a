#include "volcast/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <future>
#include <limits>
#include <memory>
#include <nlohmann/json.hpp>

#include "volcast/errors.hpp"
#include "volcast/io.hpp"
#include "volcast/simulate.hpp"

namespace volcast::harness {

namespace {

using ordered_json = nlohmann::ordered_json;

void reject_unknown_keys(const ordered_json& j, const std::vector<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const std::string& k : known) ok = ok || k == key;
        if (!ok) throw config_error("config: unknown key '" + key + "' in " + where);
    }
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("config: invalid JSON: ") + e.what());
    }
    try {
        reject_unknown_keys(j,
                            {"model", "prices_csv", "rv_csv", "simulate", "hidden",
                             "learning_rate", "epochs", "window", "samples", "seed", "split",
                             "scaler_mode", "min_day_obs"},
                            "top level");

        ExperimentConfig cfg;
        cfg.model = j.at("model").get<std::string>();
        if (cfg.model != "garch11" && cfg.model != "har" && cfg.model != "lstm" &&
            cfg.model != "sigma-lstm")
            throw config_error("config: unknown model '" + cfg.model + "'");

        if (!j.contains("seed")) throw config_error("config: seed is mandatory");
        cfg.seed = j.at("seed").get<std::uint64_t>();

        int sources = 0;
        if (j.contains("prices_csv")) {
            cfg.prices_csv = j.at("prices_csv").get<std::string>();
            ++sources;
        }
        if (j.contains("rv_csv")) {
            cfg.rv_csv = j.at("rv_csv").get<std::string>();
            ++sources;
        }
        if (j.contains("simulate")) {
            const ordered_json& s = j.at("simulate");
            reject_unknown_keys(s, {"omega", "alpha", "beta", "n", "burn_in", "rv_noise"},
                                "simulate");
            cfg.simulate.enabled = true;
            cfg.simulate.omega = s.at("omega").get<double>();
            cfg.simulate.alpha = s.at("alpha").get<double>();
            cfg.simulate.beta = s.at("beta").get<double>();
            cfg.simulate.n = s.at("n").get<std::size_t>();
            if (s.contains("burn_in")) cfg.simulate.burn_in = s.at("burn_in").get<std::size_t>();
            if (s.contains("rv_noise")) cfg.simulate.rv_noise = s.at("rv_noise").get<double>();
            ++sources;
        }
        if (sources != 1)
            throw config_error("config: exactly one of prices_csv, rv_csv, simulate required");

        if (j.contains("hidden")) cfg.hidden = j.at("hidden").get<int>();
        if (j.contains("learning_rate")) cfg.learning_rate = j.at("learning_rate").get<double>();
        if (j.contains("epochs")) cfg.epochs = j.at("epochs").get<std::size_t>();
        if (j.contains("window")) cfg.window = j.at("window").get<std::size_t>();
        if (j.contains("samples")) cfg.samples = j.at("samples").get<std::size_t>();
        if (j.contains("min_day_obs")) cfg.min_day_obs = j.at("min_day_obs").get<std::size_t>();
        if (j.contains("split")) {
            const ordered_json& s = j.at("split");
            reject_unknown_keys(s, {"n_val", "n_test"}, "split");
            if (s.contains("n_val")) cfg.split.n_val = s.at("n_val").get<std::size_t>();
            if (s.contains("n_test")) cfg.split.n_test = s.at("n_test").get<std::size_t>();
        }
        if (j.contains("scaler_mode"))
            cfg.scaler_mode = rvpipe::scaler_mode_from_string(j.at("scaler_mode").get<std::string>());

        if (cfg.hidden < 1) throw config_error("config: hidden must be >= 1");
        if (!(cfg.learning_rate > 0.0)) throw config_error("config: learning_rate must be > 0");
        if (cfg.window < 1) throw config_error("config: window must be >= 1");

        for (const std::string& path : {cfg.prices_csv, cfg.rv_csv})
            if (!path.empty() && !std::filesystem::exists(path))
                throw config_error("config: referenced path does not exist: " + path);
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("config: ") + e.what());
    }
}

ExperimentConfig load_experiment_config(const std::string& path) {
    if (!std::filesystem::exists(path)) throw config_error("config file does not exist: " + path);
    return parse_experiment_config(io::read_text_file(path));
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
    ordered_json j;
    j["model"] = cfg.model;
    if (!cfg.prices_csv.empty()) j["prices_csv"] = cfg.prices_csv;
    if (!cfg.rv_csv.empty()) j["rv_csv"] = cfg.rv_csv;
    if (cfg.simulate.enabled) {
        j["simulate"] = {{"omega", cfg.simulate.omega},   {"alpha", cfg.simulate.alpha},
                         {"beta", cfg.simulate.beta},     {"n", cfg.simulate.n},
                         {"burn_in", cfg.simulate.burn_in}, {"rv_noise", cfg.simulate.rv_noise}};
    }
    j["hidden"] = cfg.hidden;
    j["learning_rate"] = cfg.learning_rate;
    j["epochs"] = cfg.epochs;
    j["window"] = cfg.window;
    j["samples"] = cfg.samples;
    j["seed"] = cfg.seed;
    j["split"] = {{"n_val", cfg.split.n_val}, {"n_test", cfg.split.n_test}};
    j["scaler_mode"] = rvpipe::scaler_mode_name(cfg.scaler_mode);
    j["min_day_obs"] = cfg.min_day_obs;
    return j.dump(2) + "\n";
}

ExperimentData prepare_data(const ExperimentConfig& cfg) {
    ExperimentData data;
    if (cfg.simulate.enabled) {
        econo::GarchParams p;
        p.omega = cfg.simulate.omega;
        p.alpha = cfg.simulate.alpha;
        p.beta = cfg.simulate.beta;
        simgen::SimPath path =
            simgen::simulate_garch11(p, cfg.simulate.n, cfg.seed, cfg.simulate.burn_in);
        std::vector<double> rv =
            simgen::simulate_rv_from_path(path, cfg.simulate.rv_noise, cfg.seed + 1);
        data.series = simgen::to_rv_series(path, rv);
    } else if (!cfg.rv_csv.empty()) {
        data.series = rvpipe::load_rv_csv(cfg.rv_csv);
    } else {
        rvpipe::LoadedPrices prices = rvpipe::load_prices(cfg.prices_csv);
        data.series = rvpipe::daily_realized_vol(prices.series, cfg.min_day_obs);
    }

    // drop the first row: its close-to-close return is undefined
    if (!data.series.ret.empty() && std::isnan(data.series.ret[0])) {
        data.series.dates.erase(data.series.dates.begin());
        data.series.rv.erase(data.series.rv.begin());
        data.series.ret.erase(data.series.ret.begin());
    }
    for (double r : data.series.ret)
        if (std::isnan(r)) throw data_error("prepare_data: undefined return inside the series");

    data.split = rvpipe::split(data.series.rv.size(), cfg.split);
    return data;
}

namespace {

std::unique_ptr<OneStepModel> fit_model(const ExperimentConfig& cfg, const ExperimentData& data,
                                        std::vector<double>* loss_history) {
    const std::size_t train_end = data.split.train_end;
    std::span<const double> train_returns =
        std::span<const double>(data.series.ret).subspan(0, train_end);
    std::span<const double> train_rv = std::span<const double>(data.series.rv).subspan(0, train_end);

    if (cfg.model == "garch11") {
        econo::Garch11Fit fit = econo::garch11_fit(train_returns);
        return std::make_unique<GarchForecaster>(std::move(fit), train_end);
    }
    if (cfg.model == "har") {
        econo::HarFit fit = econo::har_fit(train_rv);
        return std::make_unique<HarForecaster>(std::move(fit), train_end);
    }

    TrainConfig tc;
    tc.hidden = cfg.hidden;
    tc.learning_rate = cfg.learning_rate;
    tc.epochs = cfg.epochs;
    tc.window = cfg.window;
    tc.seed = cfg.seed;

    if (cfg.model == "sigma-lstm") {
        rvpipe::Scaler scaler = rvpipe::Scaler::fit(train_returns, rvpipe::ScalerMode::scale_only);
        std::vector<double> scaled(train_returns.begin(), train_returns.end());
        scaler.apply(scaled);
        SigmaLstmTraining training = train_sigma_lstm(tc, scaled);
        if (loss_history) *loss_history = training.objective_history;
        return std::make_unique<SigmaLstmForecaster>(std::move(training.params), scaler, train_end,
                                                     cfg.samples, cfg.seed + 0x5eed);
    }
    if (cfg.model == "lstm") {
        rvpipe::Scaler scaler = rvpipe::Scaler::fit(train_rv, cfg.scaler_mode);
        // inputs are rv[t], targets rv[t+1], both in scaled units
        std::vector<double> inputs, targets;
        inputs.reserve(train_end - 1);
        targets.reserve(train_end - 1);
        for (std::size_t t = 0; t + 1 < train_end; ++t) {
            inputs.push_back(scaler.apply(data.series.rv[t]));
            targets.push_back(scaler.apply(data.series.rv[t + 1]));
        }
        VanillaLstmTraining training = train_vanilla_lstm(tc, inputs, targets);
        if (loss_history) *loss_history = training.mse_history;
        return std::make_unique<VanillaLstmForecaster>(std::move(training.params), scaler,
                                                       train_end);
    }
    throw config_error("unknown model '" + cfg.model + "'");
}

}  // namespace

std::string report_to_json(const RunResult& result) {
    ordered_json j;
    j["model"] = result.report.model;
    j["n_points"] = result.report.points.size();
    j["mse"] = result.report.metrics.mse;
    j["rmse"] = result.report.metrics.rmse;
    j["config"] = ordered_json::parse(experiment_config_to_json(result.config));
    return j.dump(2) + "\n";
}

std::string forecasts_to_csv(const ForecastReport& report) {
    std::string out = "date,prediction,target\n";
    for (const ForecastPoint& p : report.points) {
        out += io::format_date(p.date);
        out += ',';
        out += io::format17(p.prediction);
        out += ',';
        out += io::format17(p.target);
        out += '\n';
    }
    return out;
}

std::string loss_history_to_csv(const std::vector<double>& history) {
    std::string out = "epoch,objective\n";
    for (std::size_t i = 0; i < history.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += io::format17(history[i]);
        out += '\n';
    }
    return out;
}

RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    ExperimentData data = prepare_data(cfg);

    RunResult result;
    result.config = cfg;
    std::unique_ptr<OneStepModel> model = fit_model(cfg, data, &result.loss_history);
    result.report = rolling_forecast(*model, data.series, data.split.val_end, data.split.test_end);

    std::filesystem::create_directories(out_dir);
    io::write_text_file(out_dir + "/report.json", report_to_json(result));
    io::write_text_file(out_dir + "/forecasts.csv", forecasts_to_csv(result.report));
    io::write_text_file(out_dir + "/loss_history.csv", loss_history_to_csv(result.loss_history));
    io::write_text_file(out_dir + "/timing.txt",
                        "wall_seconds = " + io::format17(result.report.wall_seconds) + "\n");
    return result;
}

std::vector<GridPoint> default_grid() {
    std::vector<GridPoint> grid;
    for (int hidden : {4, 8, 16})
        for (double lr : {1e-3, 3e-3})
            for (std::size_t epochs : {std::size_t{50}, std::size_t{200}})
                grid.push_back({hidden, lr, epochs});
    return grid;
}

GridResult grid_search(const std::vector<GridPoint>& grid,
                       const std::function<double(const GridPoint&, std::size_t)>& score) {
    if (grid.empty()) throw std::invalid_argument("grid_search: empty grid");

    std::vector<std::future<GridEntry>> futures;
    futures.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        futures.push_back(std::async(std::launch::async, [&grid, &score, i]() {
            GridEntry entry;
            entry.point = grid[i];
            entry.index = i;
            try {
                entry.val_rmse = score(grid[i], i);
                entry.diverged = !std::isfinite(entry.val_rmse);
            } catch (const numeric_error&) {
                entry.diverged = true;
                entry.val_rmse = std::numeric_limits<double>::infinity();
            }
            return entry;
        }));
    }

    GridResult result;
    for (auto& f : futures) result.leaderboard.push_back(f.get());
    // leaderboard assembly is ordered by grid index, then sorted, so
    // concurrent scoring cannot change output bytes
    std::stable_sort(result.leaderboard.begin(), result.leaderboard.end(),
                     [](const GridEntry& a, const GridEntry& b) {
                         if (a.val_rmse != b.val_rmse) return a.val_rmse < b.val_rmse;
                         return a.index < b.index;
                     });
    if (result.leaderboard.front().diverged)
        throw numeric_error("grid_search: every grid point diverged");
    result.best = result.leaderboard.front();
    return result;
}

GridResult grid_search_experiment(const ExperimentConfig& base, const std::vector<GridPoint>& grid) {
    if (base.model != "sigma-lstm" && base.model != "lstm")
        throw config_error("grid search applies to the recurrent models only");
    ExperimentData data = prepare_data(base);

    auto score = [&base, &data](const GridPoint& point, std::size_t index) {
        ExperimentConfig cfg = base;
        cfg.hidden = point.hidden;
        cfg.learning_rate = point.learning_rate;
        cfg.epochs = point.epochs;
        cfg.seed = base.seed + index;  // independent derived seed per point
        std::unique_ptr<OneStepModel> model = fit_model(cfg, data, nullptr);
        ForecastReport report =
            rolling_forecast(*model, data.series, data.split.train_end, data.split.val_end);
        return report.metrics.rmse;
    };
    return grid_search(grid, score);
}

}  // namespace volcast::harness
