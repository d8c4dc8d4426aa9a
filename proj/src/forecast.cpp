#include "volcast/forecast.hpp"

#include <chrono>
#include <cmath>

#include "volcast/errors.hpp"

namespace volcast::harness {

Metrics evaluate(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size())
        throw std::invalid_argument("evaluate: prediction/target length mismatch (" +
                                    std::to_string(predictions.size()) + " vs " +
                                    std::to_string(targets.size()) + ")");
    if (predictions.empty()) throw std::invalid_argument("evaluate: empty inputs");
    double acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        double d = predictions[i] - targets[i];
        acc += d * d;
    }
    Metrics m;
    m.mse = acc / static_cast<double>(predictions.size());
    m.rmse = std::sqrt(m.mse);
    return m;
}

ForecastReport rolling_forecast(OneStepModel& model, const rvpipe::RvSeries& series,
                                std::size_t span_begin, std::size_t span_end) {
    const std::size_t n = series.rv.size();
    if (span_begin >= span_end || span_end > n)
        throw std::invalid_argument("rolling_forecast: bad span [" + std::to_string(span_begin) +
                                    ", " + std::to_string(span_end) + ") over " +
                                    std::to_string(n) + " points");
    if (model.fitted_through() > span_begin)
        throw std::invalid_argument("rolling_forecast: model fitted through index " +
                                    std::to_string(model.fitted_through()) +
                                    " overlaps forecast span starting at " +
                                    std::to_string(span_begin));

    // ret[0] is undefined by construction; feed it as 0 so state replay
    // stays finite.
    std::vector<double> returns(series.ret.begin(), series.ret.end());
    for (double& r : returns)
        if (std::isnan(r)) r = 0.0;

    auto start = std::chrono::steady_clock::now();
    model.warm_up(std::span<const double>(returns).subspan(0, span_begin),
                  std::span<const double>(series.rv).subspan(0, span_begin));

    ForecastReport report;
    report.model = model.name();
    report.points.reserve(span_end - span_begin);
    for (std::size_t t = span_begin; t < span_end; ++t) {
        double pred = model.predict_next();
        report.points.push_back({series.dates[t], pred, series.rv[t]});
        model.observe(returns[t], series.rv[t]);
    }

    std::vector<double> preds, targets;
    preds.reserve(report.points.size());
    targets.reserve(report.points.size());
    for (const ForecastPoint& p : report.points) {
        preds.push_back(p.prediction);
        targets.push_back(p.target);
    }
    report.metrics = evaluate(preds, targets);
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

GarchForecaster::GarchForecaster(econo::Garch11Fit fit, std::size_t fitted_through)
    : fit_(std::move(fit)), fitted_through_(fitted_through) {}

void GarchForecaster::warm_up(std::span<const double> returns, std::span<const double>) {
    if (returns.empty()) throw std::invalid_argument("garch warm_up: empty history");
    std::vector<double> eps(returns.begin(), returns.end());
    for (double& v : eps) v -= fit_.train_mean;
    double sigma2 = econo::sample_variance(eps);
    if (!(sigma2 > 0.0)) throw numeric_error("garch warm_up: degenerate history variance");
    // replay the filter recursion over the warm span, then step once ahead
    const econo::GarchParams& p = fit_.params;
    for (std::size_t t = 1; t < eps.size(); ++t)
        sigma2 = p.omega + p.alpha * (eps[t - 1] * eps[t - 1]) + p.beta * sigma2;
    sigma2_next_ = p.omega + p.alpha * (eps.back() * eps.back()) + p.beta * sigma2;
}

double GarchForecaster::predict_next() { return std::sqrt(sigma2_next_); }

void GarchForecaster::observe(double r, double) {
    double eps = r - fit_.train_mean;
    sigma2_next_ = fit_.params.omega + fit_.params.alpha * (eps * eps) +
                   fit_.params.beta * sigma2_next_;
}

HarForecaster::HarForecaster(econo::HarFit fit, std::size_t fitted_through)
    : fit_(std::move(fit)), fitted_through_(fitted_through) {}

void HarForecaster::warm_up(std::span<const double>, std::span<const double> rv) {
    window_.clear();
    for (double v : rv) {
        window_.push_back(v);
        if (window_.size() > 22) window_.pop_front();
    }
}

double HarForecaster::predict_next() {
    if (window_.size() < 22)
        throw std::invalid_argument("har predict: needs 22 trailing observations, have " +
                                    std::to_string(window_.size()));
    econo::HarFeatureRow f;
    f.d = window_.back();
    double w = 0.0;
    for (std::size_t i = 17; i < 22; ++i) w += window_[i];
    f.w = w / 5.0;
    double m = 0.0;
    for (double v : window_) m += v;
    f.m = m / 22.0;
    return econo::har_forecast(fit_.params, f);
}

void HarForecaster::observe(double, double rv) {
    window_.push_back(rv);
    if (window_.size() > 22) window_.pop_front();
}

SigmaLstmForecaster::SigmaLstmForecaster(cells::SigmaLstmParams params, rvpipe::Scaler return_scaler,
                                         std::size_t fitted_through, std::size_t samples,
                                         std::uint64_t noise_seed)
    : params_(std::move(params)),
      scaler_(return_scaler),
      fitted_through_(fitted_through),
      samples_(samples < 1 ? 1 : samples),
      noise_seed_(noise_seed) {
    states_.assign(samples_, cells::SigmaLstmState::zero(params_.hidden));
    rngs_.reserve(samples_);
    for (std::size_t s = 0; s < samples_; ++s) rngs_.emplace_back(noise_seed_ + s);
}

void SigmaLstmForecaster::warm_up(std::span<const double> returns, std::span<const double>) {
    states_.assign(samples_, cells::SigmaLstmState::zero(params_.hidden));
    rngs_.clear();
    for (std::size_t s = 0; s < samples_; ++s) rngs_.emplace_back(noise_seed_ + s);
    sigma2_mean_ = cells::kVarianceFloor;
    for (double r : returns) observe(r, 0.0);
}

double SigmaLstmForecaster::predict_next() {
    // the step-t state emits the estimate used for t+1; de-scale to target units
    return scaler_.invert(std::sqrt(sigma2_mean_));
}

void SigmaLstmForecaster::observe(double r, double) {
    const double x = scaler_.apply(r);
    const std::size_t h = params_.hidden;
    std::vector<double> eps(h, 0.0);
    double acc = 0.0;
    for (std::size_t s = 0; s < samples_; ++s) {
        if (samples_ > 1)
            for (double& e : eps) e = rngs_[s].next_normal();
        cells::StepOutput step = cells::sigma_lstm_step(params_, states_[s], x, eps);
        states_[s] = std::move(step.next);
        acc += step.sigma2;
    }
    sigma2_mean_ = acc / static_cast<double>(samples_);
}

VanillaLstmForecaster::VanillaLstmForecaster(cells::VanillaLstmParams params,
                                             rvpipe::Scaler rv_scaler, std::size_t fitted_through)
    : params_(std::move(params)),
      scaler_(rv_scaler),
      fitted_through_(fitted_through),
      state_(cells::VanillaState::zero(params_.hidden)) {}

void VanillaLstmForecaster::warm_up(std::span<const double>, std::span<const double> rv) {
    state_ = cells::VanillaState::zero(params_.hidden);
    pending_ = 0.0;
    for (double v : rv) observe(0.0, v);
}

double VanillaLstmForecaster::predict_next() { return scaler_.invert(pending_); }

void VanillaLstmForecaster::observe(double, double rv) {
    pending_ = cells::vanilla_lstm_step(params_, state_, scaler_.apply(rv));
}

}  // namespace volcast::harness
