#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "volcast/forecast.hpp"
#include "volcast/rv_pipeline.hpp"
#include "volcast/train.hpp"

namespace volcast::harness {

/// Declarative run description; parsed from strict JSON (unknown keys are
/// rejected, seed is mandatory, referenced paths must exist).
struct ExperimentConfig {
    std::string model;  // garch11 | har | lstm | sigma-lstm

    // exactly one data source
    std::string prices_csv;
    std::string rv_csv;
    struct Simulation {
        bool enabled = false;
        double omega = 0.05;
        double alpha = 0.10;
        double beta = 0.85;
        std::size_t n = 5000;
        std::size_t burn_in = 1000;
        double rv_noise = 0.1;
    } simulate;

    int hidden = 8;
    double learning_rate = 3e-3;
    std::size_t epochs = 50;
    std::size_t window = 22;
    std::size_t samples = 1;  // forecast-time noise paths; 1 = zero-noise pass
    std::uint64_t seed = 0;
    rvpipe::SplitSpec split;
    rvpipe::ScalerMode scaler_mode = rvpipe::ScalerMode::minmax;  // LSTM rv inputs
    std::size_t min_day_obs = 30;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);
std::string experiment_config_to_json(const ExperimentConfig& cfg);

/// Dataset the pipeline operates on after ingestion: aligned rv targets
/// and returns (the undefined first-day return is trimmed).
struct ExperimentData {
    rvpipe::RvSeries series;
    rvpipe::SplitIndices split;
};

ExperimentData prepare_data(const ExperimentConfig& cfg);

struct RunResult {
    ForecastReport report;
    std::vector<double> loss_history;
    ExperimentConfig config;
};

/// Full pipeline: ingest -> split -> scale -> fit/train -> rolling test
/// forecast. Writes report.json, forecasts.csv, loss_history.csv and
/// timing.txt under out_dir (timing stays out of report.json so repeat
/// runs are byte-identical).
RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

struct GridPoint {
    int hidden = 8;
    double learning_rate = 3e-3;
    std::size_t epochs = 50;
};

struct GridEntry {
    GridPoint point;
    std::size_t index = 0;
    double val_rmse = 0.0;
    bool diverged = false;
};

struct GridResult {
    GridEntry best;
    std::vector<GridEntry> leaderboard;  // sorted by (rmse, index)
};

std::vector<GridPoint> default_grid();

/// Scores every grid point (concurrently; each point derives its own seed
/// upstream) and picks the lowest validation RMSE, ties to the lowest
/// index. Points whose scorer throws numeric_error count as diverged;
/// if all diverge the search fails.
GridResult grid_search(const std::vector<GridPoint>& grid,
                       const std::function<double(const GridPoint&, std::size_t)>& score);

/// Train-on-train / score-on-validation scorer for the recurrent models.
GridResult grid_search_experiment(const ExperimentConfig& base, const std::vector<GridPoint>& grid);

std::string report_to_json(const RunResult& result);
std::string forecasts_to_csv(const ForecastReport& report);
std::string loss_history_to_csv(const std::vector<double>& history);

}  // namespace volcast::harness
