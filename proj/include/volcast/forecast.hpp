#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "volcast/garch.hpp"
#include "volcast/har.hpp"
#include "volcast/rng.hpp"
#include "volcast/rv_pipeline.hpp"
#include "volcast/sigma_lstm.hpp"
#include "volcast/vanilla_lstm.hpp"

namespace volcast::harness {

struct Metrics {
    double mse = 0.0;
    double rmse = 0.0;
};

Metrics evaluate(std::span<const double> predictions, std::span<const double> targets);

/// One-step-ahead forecaster protocol. rolling_forecast drives it so that
/// a prediction for index t can only ever see observations through t-1:
/// warm_up replays pre-test history, then predict_next / observe alternate.
class OneStepModel {
public:
    virtual ~OneStepModel() = default;
    virtual void warm_up(std::span<const double> returns, std::span<const double> rv) = 0;
    virtual double predict_next() = 0;
    virtual void observe(double r, double rv) = 0;
    /// One past the last index used when fitting (lookahead guard).
    virtual std::size_t fitted_through() const = 0;
    virtual std::string name() const = 0;
};

struct ForecastPoint {
    std::int64_t date = 0;
    double prediction = 0.0;
    double target = 0.0;
};

struct ForecastReport {
    std::string model;
    std::vector<ForecastPoint> points;
    Metrics metrics;
    double wall_seconds = 0.0;
};

/// Forecast targets series.rv over [span_begin, span_end). The model must
/// have been fitted strictly before the span.
ForecastReport rolling_forecast(OneStepModel& model, const rvpipe::RvSeries& series,
                                std::size_t span_begin, std::size_t span_end);

class GarchForecaster final : public OneStepModel {
public:
    GarchForecaster(econo::Garch11Fit fit, std::size_t fitted_through);
    void warm_up(std::span<const double> returns, std::span<const double> rv) override;
    double predict_next() override;
    void observe(double r, double rv) override;
    std::size_t fitted_through() const override { return fitted_through_; }
    std::string name() const override { return "garch11"; }

private:
    econo::Garch11Fit fit_;
    std::size_t fitted_through_;
    double sigma2_next_ = 0.0;
};

class HarForecaster final : public OneStepModel {
public:
    HarForecaster(econo::HarFit fit, std::size_t fitted_through);
    void warm_up(std::span<const double> returns, std::span<const double> rv) override;
    double predict_next() override;
    void observe(double r, double rv) override;
    std::size_t fitted_through() const override { return fitted_through_; }
    std::string name() const override { return "har"; }

private:
    econo::HarFit fit_;
    std::size_t fitted_through_;
    std::deque<double> window_;  // trailing 22 observed rv values
};

/// sigma-LSTM defaults to the deterministic zero-noise pass; with
/// samples > 1 the variance estimate averages that many seeded
/// reparameterized paths.
class SigmaLstmForecaster final : public OneStepModel {
public:
    SigmaLstmForecaster(cells::SigmaLstmParams params, rvpipe::Scaler return_scaler,
                        std::size_t fitted_through, std::size_t samples = 1,
                        std::uint64_t noise_seed = 0);
    void warm_up(std::span<const double> returns, std::span<const double> rv) override;
    double predict_next() override;
    void observe(double r, double rv) override;
    std::size_t fitted_through() const override { return fitted_through_; }
    std::string name() const override { return "sigma-lstm"; }

private:
    cells::SigmaLstmParams params_;
    rvpipe::Scaler scaler_;
    std::size_t fitted_through_;
    std::size_t samples_;
    std::uint64_t noise_seed_;
    std::vector<cells::SigmaLstmState> states_;
    std::vector<SplitMix64> rngs_;
    double sigma2_mean_ = cells::kVarianceFloor;  // scaled units, mean over samples
};

class VanillaLstmForecaster final : public OneStepModel {
public:
    VanillaLstmForecaster(cells::VanillaLstmParams params, rvpipe::Scaler rv_scaler,
                          std::size_t fitted_through);
    void warm_up(std::span<const double> returns, std::span<const double> rv) override;
    double predict_next() override;
    void observe(double r, double rv) override;
    std::size_t fitted_through() const override { return fitted_through_; }
    std::string name() const override { return "lstm"; }

private:
    cells::VanillaLstmParams params_;
    rvpipe::Scaler scaler_;
    std::size_t fitted_through_;
    cells::VanillaState state_;
    double pending_ = 0.0;
};

/// Always predicts the same level (the no-skill baseline).
class ConstantForecaster final : public OneStepModel {
public:
    ConstantForecaster(double level, std::size_t fitted_through)
        : level_(level), fitted_through_(fitted_through) {}
    void warm_up(std::span<const double>, std::span<const double>) override {}
    double predict_next() override { return level_; }
    void observe(double, double) override {}
    std::size_t fitted_through() const override { return fitted_through_; }
    std::string name() const override { return "constant"; }

private:
    double level_;
    std::size_t fitted_through_;
};

}  // namespace volcast::harness
