#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace volcast::econo {

/// Reduced-form HAR coefficients: next-day RV regressed on the daily value
/// and the 5-day / 22-day trailing means.
struct HarParams {
    double c = 0.0;
    double beta_d = 0.0;
    double beta_w = 0.0;
    double beta_m = 0.0;
};

struct HarFeatureRow {
    std::size_t t = 0;  // index into the rv series this row describes
    double d = 0.0;
    double w = 0.0;  // mean over rv[t-4 .. t]
    double m = 0.0;  // mean over rv[t-21 .. t]
};

/// One row per index with a full 22-day window (t >= 21, zero-based).
/// Requires at least 23 observations.
std::vector<HarFeatureRow> har_features(std::span<const double> rv);

struct HarFit {
    HarParams params;
    std::size_t rows = 0;
    bool used_fallback = false;  // rank-revealing QR path was taken
};

/// OLS of rv[t+1] on (1, d, w, m) via normal equations; a rank-revealing
/// orthogonal decomposition takes over when the design is near singular
/// (dropped columns get zero coefficients). Needs >= 30 usable rows.
HarFit har_fit(std::span<const double> rv);

double har_forecast(const HarParams& p, const HarFeatureRow& features);

std::string export_har_fit_text(const HarFit& fit);
HarFit parse_har_fit_text(const std::string& text);

}  // namespace volcast::econo
